#include "fbic/point_map.hpp"

#include <cmath>

namespace fbic {

double y_of_xt(double x, double t, const PointMapConstants& c) {
    c.require_regular(t);
    return (2.0 * x - c.c2) / (2.0 * c.scale(t));
}

double x_of_yt(double y, double t, const PointMapConstants& c) {
    c.require_regular(t);
    return y * c.scale(t) + c.c2 / 2.0;
}

double transform_potential(const std::function<double(double)>& V2_eval, double x, double t,
                           const PointMapConstants& c) {
    c.require_regular(t);
    const double s = c.scale(t);
    return V2_eval(y_of_xt(x, t, c)) / (s * s);
}

double transform_phase(double x, double t, const PointMapConstants& c) {
    const double s = c.scale(t);
    return (x * x - c.c2 * x + (c.E + c.c2 * c.c2) / 4.0) / s;
}

Complex transform_wavefunction(const std::function<Complex(double)>& psi_eval, double x, double t,
                               const PointMapConstants& c) {
    const double s = c.scale(t);
    if (!(s > 0.0)) throw std::domain_error("transform_wavefunction: requires 4t + c1 > 0");
    return psi_eval(y_of_xt(x, t, c)) * std::exp(Complex(0.0, transform_phase(x, t, c))) / std::sqrt(s);
}

// ---- GeneralMap ----

namespace {
// 5-point Boole rule over [a, b].
template <class F>
double boole(F&& f, double a, double b) {
    const double h = (b - a) / 4.0;
    return (b - a) / 90.0 * (7.0 * f(a) + 32.0 * f(a + h) + 12.0 * f(a + 2.0 * h) + 32.0 * f(a + 3.0 * h) + 7.0 * f(b));
}
}  // namespace

GeneralMap::GeneralMap(GeneralMapSpec spec, double t_max, std::size_t cells) : spec_(std::move(spec)), t_max_(t_max) {
    if (!spec_.A || !spec_.B) throw std::invalid_argument("GeneralMap: A and B must be callable");
    if (!(t_max_ > spec_.t0)) throw std::invalid_argument("GeneralMap: t_max must exceed t0");
    if (cells < 8) cells = 8;
    dt_ = (t_max_ - spec_.t0) / static_cast<double>(cells);
    tab_A_.assign(cells + 1, 0.0);
    tab_Be4_.assign(cells + 1, 0.0);
    tab_e8_.assign(cells + 1, 0.0);
    tab_B2_.assign(cells + 1, 0.0);
    for (std::size_t j = 1; j <= cells; ++j) {
        const double a = spec_.t0 + static_cast<double>(j - 1) * dt_;
        const double b = a + dt_;
        tab_A_[j] = tab_A_[j - 1] + boole(spec_.A, a, b);
        // integrands that need int A at interior points query the running value
        auto iA = [&](double tau) { return tab_A_[j - 1] + boole(spec_.A, a, tau); };
        tab_Be4_[j] = tab_Be4_[j - 1] + boole([&](double tau) { return spec_.B(tau) * std::exp(4.0 * iA(tau)); }, a, b);
        tab_e8_[j] = tab_e8_[j - 1] + boole([&](double tau) { return std::exp(8.0 * iA(tau)); }, a, b);
        tab_B2_[j] = tab_B2_[j - 1] + boole([&](double tau) { double v = spec_.B(tau); return v * v; }, a, b);
    }
}

template <class F>
double GeneralMap::table_query(const std::vector<double>& table, F&& integrand, double t) const {
    if (t < spec_.t0 || t > t_max_ + 1e-12)
        throw std::domain_error("GeneralMap: time outside the cached interval");
    double pos = (t - spec_.t0) / dt_;
    auto j = static_cast<std::size_t>(pos);
    if (j >= table.size() - 1) j = table.size() - 2;
    const double a = spec_.t0 + static_cast<double>(j) * dt_;
    if (t <= a) return table[j];
    return table[j] + boole(integrand, a, t);
}

double GeneralMap::int_A(double t) const { return table_query(tab_A_, spec_.A, t); }

double GeneralMap::int_B_e4(double t) const {
    auto f = [&](double tau) { return spec_.B(tau) * std::exp(4.0 * int_A(tau)); };
    return table_query(tab_Be4_, f, t);
}

double GeneralMap::int_e8(double t) const {
    auto f = [&](double tau) { return std::exp(8.0 * int_A(tau)); };
    return table_query(tab_e8_, f, t);
}

double GeneralMap::int_B2(double t) const {
    auto f = [&](double tau) { double v = spec_.B(tau); return v * v; };
    return table_query(tab_B2_, f, t);
}

double GeneralMap::y(double x, double t) const { return x * std::exp(4.0 * int_A(t)) + 2.0 * int_B_e4(t); }

Complex GeneralMap::wavefunction(const std::function<Complex(double)>& psi_eval, double x, double t) const {
    // The 2iA piece of the phase integral is a real amplitude exp(2 int A).
    const double amp = std::exp(2.0 * int_A(t));
    const double phase = -(spec_.A(t) * x * x + spec_.B(t) * x + spec_.E * int_e8(t) + int_B2(t));
    return psi_eval(y(x, t)) * amp * std::exp(Complex(0.0, phase));
}

double GeneralMap::potential(const std::function<double(double)>& V2_eval, double x, double t) const {
    auto [qc, lc] = monomial_coefficients(t);
    return std::exp(8.0 * int_A(t)) * V2_eval(y(x, t)) + qc * x * x + lc * x;
}

GeneralMapPoint GeneralMap::evaluate(const std::function<Complex(double)>& psi_eval,
                                     const std::function<double(double)>& V2_eval, double x, double t) const {
    return {y(x, t), wavefunction(psi_eval, x, t), potential(V2_eval, x, t)};
}

std::pair<double, double> GeneralMap::monomial_coefficients(double t) const {
    const double d = 1e-4;
    auto ddt = [&](const std::function<double(double)>& f) {
        return (f(t - 2.0 * d) - 8.0 * f(t - d) + 8.0 * f(t + d) - f(t + 2.0 * d)) / (12.0 * d);
    };
    const double A = spec_.A(t), B = spec_.B(t);
    return {ddt(spec_.A) - 4.0 * A * A, ddt(spec_.B) - 4.0 * A * B};
}

}  // namespace fbic
