#pragma once

#include <cstdint>
#include <string>

namespace fbic {

/// Hex digest of the SHA-256 hash of `data` (used for config provenance).
std::string sha256_hex(const std::string& data);

}  // namespace fbic
