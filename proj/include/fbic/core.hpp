#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace fbic {

using Complex = std::complex<double>;

/// Thrown when an operation meets a node or a value below its safety floor.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, std::size_t node)
        : std::runtime_error(what + " (node " + std::to_string(node) + ")"), node_(node) {}
    std::size_t node() const { return node_; }

private:
    std::size_t node_;
};

/// Thrown when omega + integral of u^2 changes sign on the grid.
class RegularityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a mapped energy coincides with a factorization energy.
class DegenerateEnergyError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown by the propagator when the boundary leak monitor trips.
class LeakError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown on malformed or inconsistent scenario configuration; carries the field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("config field '" + field + "': " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Uniform 1D sample lattice. Units: hbar = 1, 2m = 1.
struct Grid {
    double y_min = 0.0;
    double y_max = 1.0;
    std::size_t n = 3;

    Grid() = default;
    Grid(double y_min_, double y_max_, std::size_t n_) : y_min(y_min_), y_max(y_max_), n(n_) {
        if (!(y_min < y_max)) throw std::invalid_argument("Grid: y_min must be < y_max");
        if (n < 3) throw std::invalid_argument("Grid: need at least 3 samples");
    }

    /// Grid covering [y_min, y_max] with spacing as close to h_target as an integer node count allows.
    static Grid with_spacing(double y_min, double y_max, double h_target) {
        if (!(h_target > 0.0)) throw std::invalid_argument("Grid: spacing must be positive");
        auto n = static_cast<std::size_t>(std::llround((y_max - y_min) / h_target)) + 1;
        return Grid(y_min, y_max, n < 3 ? 3 : n);
    }

    double h() const { return (y_max - y_min) / static_cast<double>(n - 1); }
    double node(std::size_t i) const { return y_min + static_cast<double>(i) * h(); }
    bool contains(double y) const { return y >= y_min && y <= y_max; }

    bool operator==(const Grid& o) const { return y_min == o.y_min && y_max == o.y_max && n == o.n; }
};

namespace detail {
template <class T>
void check_field(const Grid& grid, const std::vector<T>& values) {
    if (values.size() != grid.n) throw std::invalid_argument("field: values length must equal grid.n");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if constexpr (std::is_same_v<T, double>) {
            if (!std::isfinite(values[i])) throw std::invalid_argument("field: non-finite entry at node " + std::to_string(i));
        } else {
            if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
                throw std::invalid_argument("field: non-finite entry at node " + std::to_string(i));
        }
    }
}
}  // namespace detail

/// Real-valued samples on a Grid (potentials, seeds).
struct RealField {
    Grid grid;
    std::vector<double> values;

    RealField() = default;
    RealField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) { detail::check_field(grid, values); }

    template <class F>
    static RealField sample(const Grid& g, F&& f) {
        std::vector<double> v(g.n);
        for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.node(i));
        return RealField(g, std::move(v));
    }

    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

/// Complex-valued samples on a Grid (wavefunctions).
struct ComplexField {
    Grid grid;
    std::vector<Complex> values;

    ComplexField() = default;
    ComplexField(Grid g, std::vector<Complex> v) : grid(g), values(std::move(v)) { detail::check_field(grid, values); }

    template <class F>
    static ComplexField sample(const Grid& g, F&& f) {
        std::vector<Complex> v(g.n);
        for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.node(i));
        return ComplexField(g, std::move(v));
    }

    static ComplexField from_real(const RealField& f) {
        std::vector<Complex> v(f.values.begin(), f.values.end());
        return ComplexField(f.grid, std::move(v));
    }

    Complex operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

}  // namespace fbic
