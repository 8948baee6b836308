// Command-line front end for the freezable-BIC library. Everything numerical
// goes through the C API in fbic/fbic.h; this tool only parses flags, reads
// the config and formats CSV/JSON output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbic/fbic.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitNumericError = 3;

int exit_code_for(fbic_status st) {
    switch (st) {
        case FBIC_OK: return kExitOk;
        case FBIC_VERIFY_FAILED: return kExitVerifyFailed;
        case FBIC_INVALID_CONFIG: return kExitInvalidConfig;
        default: return kExitNumericError;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

struct ScenarioHandle {
    fbic_scenario* sc = nullptr;
    ~ScenarioHandle() { fbic_scenario_free(sc); }
};

void write_sidecar(const fs::path& out_dir, const std::string& stem, const fbic_scenario* sc, const json& extra) {
    char hash[65] = {0};
    fbic_scenario_config_hash(sc, hash);
    char* canonical = nullptr;
    fbic_scenario_canonical_json(sc, &canonical);
    json meta = {{"config_hash", hash}, {"config", json::parse(canonical ? canonical : "{}")}};
    fbic_string_free(canonical);
    meta.update(extra);
    std::ofstream out(out_dir / (stem + ".json"));
    out << meta.dump(2) << "\n";
}

int cmd_potential(const ScenarioHandle& handle, const std::vector<double>& times, const fs::path& out_dir) {
    size_t n = 0;
    fbic_grid_size(handle.sc, &n);
    std::vector<double> xs(n);
    fbic_grid_nodes(handle.sc, xs.data(), n);
    std::vector<std::vector<double>> cols;
    for (double t : times) {
        std::vector<double> v(n);
        fbic_status st = fbic_potential_slice(handle.sc, t, v.data(), n);
        if (st != FBIC_OK) {
            std::cerr << "error: " << fbic_last_error() << "\n";
            return exit_code_for(st);
        }
        cols.push_back(std::move(v));
    }
    std::ofstream out(out_dir / "potential.csv");
    out << "x";
    for (double t : times) out << ",V_t=" << fmt17(t);
    out << "\n";
    for (size_t i = 0; i < n; ++i) {
        out << fmt17(xs[i]);
        for (const auto& c : cols) out << "," << fmt17(c[i]);
        out << "\n";
    }
    write_sidecar(out_dir, "potential", handle.sc, {{"command", "potential"}, {"times", times}});
    return kExitOk;
}

int cmd_states(const ScenarioHandle& handle, const std::vector<double>& energies, const std::vector<double>& times,
               const fs::path& out_dir) {
    size_t n = 0;
    fbic_grid_size(handle.sc, &n);
    std::vector<double> xs(n);
    fbic_grid_nodes(handle.sc, xs.data(), n);
    const size_t n_steps = fbic_num_steps(handle.sc);

    std::ofstream out(out_dir / "states.csv");
    out << "x";
    std::vector<std::vector<double>> cols;
    std::vector<std::string> labels;
    for (size_t j = 0; j < n_steps; ++j) {
        for (double t : times) {
            std::vector<double> v(n);
            fbic_status st = fbic_bound_density_slice(handle.sc, j, t, v.data(), n);
            if (st != FBIC_OK) {
                std::cerr << "error: " << fbic_last_error() << "\n";
                return exit_code_for(st);
            }
            cols.push_back(std::move(v));
            labels.push_back("bic" + std::to_string(j) + "_t=" + fmt17(t));
        }
    }
    for (double e : energies) {
        for (double t : times) {
            std::vector<double> v(n);
            fbic_status st = fbic_scattering_density_slice(handle.sc, e, t, v.data(), n);
            if (st != FBIC_OK) {
                std::cerr << "error: " << fbic_last_error() << "\n";
                return exit_code_for(st);
            }
            cols.push_back(std::move(v));
            labels.push_back("scat_E=" + fmt17(e) + "_t=" + fmt17(t));
        }
    }
    for (const auto& l : labels) out << ",density_" << l;
    out << "\n";
    for (size_t i = 0; i < n; ++i) {
        out << fmt17(xs[i]);
        for (const auto& c : cols) out << "," << fmt17(c[i]);
        out << "\n";
    }
    write_sidecar(out_dir, "states", handle.sc,
                  {{"command", "states"}, {"times", times}, {"energies", energies}});
    return kExitOk;
}

int cmd_evolve(const ScenarioHandle& handle, const std::string& kind_name, double energy,
               const std::vector<double>& times, const fs::path& out_dir) {
    fbic_run_kind kind;
    if (kind_name == "gauge_removed") kind = FBIC_RUN_FROZEN_GAUGE_REMOVED;
    else if (kind_name == "raw") kind = FBIC_RUN_FROZEN_RAW;
    else if (kind_name == "scattering") kind = FBIC_RUN_FROZEN_SCATTERING;
    else if (kind_name == "prefreeze") kind = FBIC_RUN_PREFREEZE_AGREEMENT;
    else {
        std::cerr << "error: unknown run kind '" << kind_name << "'\n";
        return kExitInvalidConfig;
    }
    size_t n = 0;
    fbic_grid_size(handle.sc, &n);
    std::vector<double> densities(times.size() * n);
    fbic_run_report report{};
    fbic_status st = fbic_evolve_run(handle.sc, kind, energy, times.empty() ? nullptr : times.data(), times.size(),
                                     times.empty() ? nullptr : densities.data(), n, &report);
    if (st != FBIC_OK) {
        std::cerr << "error: " << fbic_last_error() << "\n";
        return exit_code_for(st);
    }
    if (!times.empty()) {
        std::vector<double> xs(n);
        fbic_grid_nodes(handle.sc, xs.data(), n);
        std::ofstream out(out_dir / "evolve.csv");
        out << "x";
        for (double t : times) out << ",density_dt=" << fmt17(t);
        out << "\n";
        for (size_t i = 0; i < n; ++i) {
            out << fmt17(xs[i]);
            for (size_t s = 0; s < times.size(); ++s) out << "," << fmt17(densities[s * n + i]);
            out << "\n";
        }
    }
    write_sidecar(out_dir, "evolve", handle.sc,
                  {{"command", "evolve"},
                   {"kind", kind_name},
                   {"snapshot_offsets", times},
                   {"report",
                    {{"drift_or_error", report.drift_or_error},
                     {"max_leak", report.max_leak},
                     {"norm_drift_rel", report.norm_drift_rel}}}});
    std::cout << "drift_or_error = " << fmt17(report.drift_or_error) << "\n";
    return kExitOk;
}

int cmd_verify(const ScenarioHandle& handle, bool skip_propagation, const fs::path& out_dir) {
    char* text = nullptr;
    fbic_status st = fbic_verify_json(handle.sc, skip_propagation ? 0 : 1, &text);
    if (!text) {
        std::cerr << "error: " << fbic_last_error() << "\n";
        return exit_code_for(st);
    }
    std::ofstream out(out_dir / "verify.json");
    out << text << "\n";
    json rep = json::parse(text);
    fbic_string_free(text);
    for (const auto& c : rep.at("checks")) {
        char line[256];
        std::snprintf(line, sizeof(line), "[%s] %s: %.9g %s %.9g", c.at("pass").get<bool>() ? "PASS" : "FAIL",
                      c.at("name").get<std::string>().c_str(), c.at("measured").get<double>(),
                      c.at("comparison").get<std::string>().c_str(), c.at("threshold").get<double>());
        std::cout << line << "\n";
    }
    if (st == FBIC_VERIFY_FAILED) {
        std::cerr << "verification failed\n";
        return kExitVerifyFailed;
    }
    return exit_code_for(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-dependent potentials with freezable bound states in the continuum"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string times_csv;
    std::string energies_csv;
    std::string kind = "gauge_removed";
    double energy = 2.0;
    bool skip_propagation = false;

    app.add_option("--config", config_path, "scenario config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");

    auto* p = app.add_subcommand("potential", "export V_F(x, t) slices");
    p->add_option("--times", times_csv, "comma-separated times")->required();

    auto* s = app.add_subcommand("states", "export |phi_F|^2 for bound and scattering states");
    s->add_option("--times", times_csv, "comma-separated times")->required();
    s->add_option("--energies", energies_csv, "comma-separated scattering energies");

    auto* e = app.add_subcommand("evolve", "Crank-Nicolson run with drift report");
    e->add_option("--kind", kind, "gauge_removed | raw | scattering | prefreeze");
    e->add_option("--energy", energy, "scattering energy for --kind scattering");
    e->add_option("--times", times_csv, "density snapshot offsets from t_F");

    auto* v = app.add_subcommand("verify", "run the verification battery");
    v->add_flag("--skip-propagation", skip_propagation, "skip the Crank-Nicolson checks");

    CLI11_PARSE(app, argc, argv);

    try {
        fs::create_directories(out_dir);
        std::string config_text = read_file(config_path);
        ScenarioHandle handle;
        fbic_status st = fbic_scenario_parse(config_text.c_str(), &handle.sc);
        if (st != FBIC_OK) {
            std::cerr << "error: " << fbic_last_error() << "\n";
            return exit_code_for(st);
        }
        std::vector<double> times = parse_list(times_csv);
        std::vector<double> energies = parse_list(energies_csv);
        if (p->parsed()) return cmd_potential(handle, times, out_dir);
        if (s->parsed()) return cmd_states(handle, energies, times, out_dir);
        if (e->parsed()) return cmd_evolve(handle, kind, energy, times, out_dir);
        if (v->parsed()) return cmd_verify(handle, skip_propagation, out_dir);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNumericError;
    }
    return kExitOk;
}
