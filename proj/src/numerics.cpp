#include "fbic/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace fbic {

namespace {

template <class T>
void d1_impl(std::span<const T> f, double h, std::span<T> g) {
    const std::size_t n = f.size();
    if (n < 6) throw std::invalid_argument("derivative: need at least 6 samples");
    if (g.size() != n) throw std::invalid_argument("derivative: output size mismatch");
    const double s = 1.0 / (12.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i)
        g[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    g[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    g[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    g[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * s;
    g[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * s;
}

template <class T>
void d2_impl(std::span<const T> f, double h, std::span<T> g) {
    const std::size_t n = f.size();
    if (n < 7) throw std::invalid_argument("second_derivative: need at least 7 samples");
    if (g.size() != n) throw std::invalid_argument("second_derivative: output size mismatch");
    const double s = 1.0 / (12.0 * h * h);
    for (std::size_t i = 2; i + 2 < n; ++i)
        g[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * s;
    g[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) * s;
    g[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * s;
    g[n - 1] =
        (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5] - 10.0 * f[n - 6]) * s;
    g[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]) * s;
}

// Integral of the interpolating cubic over one panel [i, i+1].
double panel_increment(std::span<const double> f, std::size_t i, double h) {
    const std::size_t n = f.size();
    const double c = h / 24.0;
    if (i == 0) return c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    if (i + 2 >= n) return c * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
    return c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
}

// Integral of the interpolating cubic from node i to node i + frac, 0 <= frac <= 1.
double partial_panel(std::span<const double> f, std::size_t i, double h, double frac) {
    const std::size_t n = f.size();
    // Cubic through four consecutive samples; base index chosen so the panel is covered.
    std::size_t b = (i == 0) ? 0 : (i + 2 >= n ? n - 4 : i - 1);
    const double f0 = f[b], f1 = f[b + 1], f2 = f[b + 2], f3 = f[b + 3];
    // Newton forward coefficients in the local variable s = (y - y_b)/h.
    const double a0 = f0;
    const double a1 = f1 - f0;
    const double a2 = (f2 - 2.0 * f1 + f0) / 2.0;
    const double a3 = (f3 - 3.0 * f2 + 3.0 * f1 - f0) / 6.0;
    auto antider = [&](double s) {
        // integral of a0 + a1 s + a2 s(s-1) + a3 s(s-1)(s-2) ds
        return a0 * s + a1 * s * s / 2.0 + a2 * (s * s * s / 3.0 - s * s / 2.0) +
               a3 * (s * s * s * s / 4.0 - s * s * s + s * s);
    };
    const double s0 = static_cast<double>(i - b);
    return h * (antider(s0 + frac) - antider(s0));
}

}  // namespace

void derivative(std::span<const double> f, double h, std::span<double> out) { d1_impl(f, h, out); }
void derivative(std::span<const Complex> f, double h, std::span<Complex> out) { d1_impl(f, h, out); }
void second_derivative(std::span<const double> f, double h, std::span<double> out) { d2_impl(f, h, out); }
void second_derivative(std::span<const Complex> f, double h, std::span<Complex> out) { d2_impl(f, h, out); }

RealField derivative(const RealField& f) {
    std::vector<double> g(f.size());
    d1_impl<double>(f.values, f.grid.h(), g);
    return RealField(f.grid, std::move(g));
}

RealField second_derivative(const RealField& f) {
    std::vector<double> g(f.size());
    d2_impl<double>(f.values, f.grid.h(), g);
    return RealField(f.grid, std::move(g));
}

ComplexField derivative(const ComplexField& f) {
    std::vector<Complex> g(f.size());
    d1_impl<Complex>(f.values, f.grid.h(), g);
    return ComplexField(f.grid, std::move(g));
}

ComplexField second_derivative(const ComplexField& f) {
    std::vector<Complex> g(f.size());
    d2_impl<Complex>(f.values, f.grid.h(), g);
    return ComplexField(f.grid, std::move(g));
}

double simpson_integral(const RealField& f) {
    const auto& v = f.values;
    const std::size_t n = v.size();
    const double h = f.grid.h();
    if (n < 4) {  // single Simpson panel (n == 3)
        return (h / 3.0) * (v[0] + 4.0 * v[1] + v[2]);
    }
    double acc = 0.0;
    std::size_t stop = (n % 2 == 1) ? n - 1 : n - 4;  // even interval count handled by a 3/8 tail
    double s4 = 0.0, s2 = 0.0;
    for (std::size_t i = 1; i < stop; i += 2) s4 += v[i];
    for (std::size_t i = 2; i < stop; i += 2) s2 += v[i];
    acc = (h / 3.0) * (v[0] + v[stop] + 4.0 * s4 + 2.0 * s2);
    if (n % 2 == 0) acc += (3.0 * h / 8.0) * (v[n - 4] + 3.0 * v[n - 3] + 3.0 * v[n - 2] + v[n - 1]);
    return acc;
}

RealField cumulative_integral(const RealField& f, double y0) {
    const Grid& g = f.grid;
    if (!g.contains(y0)) throw std::invalid_argument("cumulative_integral: y0 outside the grid");
    if (g.n < 4) throw std::invalid_argument("cumulative_integral: need at least 4 samples");
    const double h = g.h();
    std::vector<double> F(g.n, 0.0);
    for (std::size_t i = 1; i < g.n; ++i) F[i] = F[i - 1] + panel_increment(f.values, i - 1, h);
    // Shift so that F(y0) = 0.
    double pos = (y0 - g.y_min) / h;
    auto i0 = static_cast<std::size_t>(pos);
    if (i0 >= g.n - 1) i0 = g.n - 2;
    double frac = pos - static_cast<double>(i0);
    double offset = F[i0] + (frac > 0.0 ? partial_panel(f.values, i0, h, frac) : 0.0);
    for (auto& x : F) x -= offset;
    return RealField(g, std::move(F));
}

void require_sign_definite(const RealField& f, double floor_rel, const char* what) {
    const auto& v = f.values;
    double m = max_abs(v);
    if (m == 0.0) throw SingularityError(std::string(what) + ": field is identically zero", 0);
    const double floor = floor_rel * m;
    const bool positive = v[0] > 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if ((v[i] > 0.0) != positive || std::abs(v[i]) < floor)
            throw SingularityError(std::string(what) + ": sign change or magnitude below floor", i);
    }
}

RealField second_log_derivative(const RealField& f, double floor_rel) {
    require_sign_definite(f, floor_rel, "second_log_derivative");
    std::vector<double> lf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) lf[i] = std::log(std::abs(f.values[i]));
    std::vector<double> g(f.size());
    d2_impl<double>(lf, f.grid.h(), g);
    return RealField(f.grid, std::move(g));
}

double l2_norm_sq(const ComplexField& psi) {
    std::vector<double> dens(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) dens[i] = std::norm(psi.values[i]);
    return simpson_integral(RealField(psi.grid, std::move(dens)));
}

double l2_norm_sq(const RealField& psi) {
    std::vector<double> dens(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) dens[i] = psi.values[i] * psi.values[i];
    return simpson_integral(RealField(psi.grid, std::move(dens)));
}

namespace {
template <class Field>
double residual_impl(const Field& psi, const RealField& V, double E, std::size_t skip) {
    if (!(psi.grid == V.grid)) throw std::invalid_argument("eigen_residual: fields must share a grid");
    Field dd = second_derivative(psi);
    double worst = 0.0;
    const std::size_t n = psi.size();
    if (2 * skip + 1 >= n) throw std::invalid_argument("eigen_residual: skip too large for grid");
    for (std::size_t i = skip; i + skip < n; ++i) {
        double r = std::abs(-dd.values[i] + (V.values[i] - E) * psi.values[i]);
        worst = std::max(worst, r);
    }
    return worst;
}
}  // namespace

double eigen_residual(const RealField& psi, const RealField& V, double E, std::size_t skip) {
    return residual_impl(psi, V, E, skip);
}
double eigen_residual(const ComplexField& psi, const RealField& V, double E, std::size_t skip) {
    return residual_impl(psi, V, E, skip);
}

namespace {
template <class Field>
auto interp_impl(const Field& f, double y) {
    const Grid& g = f.grid;
    if (!g.contains(y)) throw std::invalid_argument("interpolate: point outside the grid");
    if (g.n < 6) throw std::invalid_argument("interpolate: need at least 6 samples");
    const double h = g.h();
    double pos = (y - g.y_min) / h;
    auto center = static_cast<long>(std::floor(pos));
    long b = center - 2;
    b = std::clamp(b, 0L, static_cast<long>(g.n) - 6);
    // 6-point Lagrange in the local variable s.
    double s = pos - static_cast<double>(b);
    std::remove_cvref_t<decltype(f.values[0])> acc{};
    for (int j = 0; j < 6; ++j) {
        double lj = 1.0;
        for (int m = 0; m < 6; ++m)
            if (m != j) lj *= (s - m) / static_cast<double>(j - m);
        acc += f.values[static_cast<std::size_t>(b + j)] * lj;
    }
    return acc;
}
}  // namespace

double interpolate(const RealField& f, double y) { return interp_impl(f, y); }
Complex interpolate(const ComplexField& f, double y) { return interp_impl(f, y); }

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace fbic
