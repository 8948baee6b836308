#include "fbic/models.hpp"

#include <algorithm>
#include <cmath>

#include "fbic/numerics.hpp"

namespace fbic::models {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double v2_closed(double y, const FreeParticleBicModel& m) {
    const double k = m.k, om = m.omega;
    const double s = 2.0 * k * y;
    if (std::abs(s) < 1e-3) {
        // numerator and denominator to O(s^6); the value vanishes linearly at y = 0
        const double kw = k * om;
        const double num16 = -2.0 * kw * s + (kw / 3.0) * s * s * s + s * s * s * s / 24.0 -
                             (kw / 60.0) * s * s * s * s * s - s * s * s * s * s * s / 360.0;
        const double d = 4.0 * kw + s * s * s / 6.0 - s * s * s * s * s / 120.0;
        return 16.0 * k * k * num16 / (d * d);
    }
    const double num = 16.0 * k * k * (1.0 - k * (2.0 * om + y) * std::sin(s) - std::cos(s));
    const double den = std::sin(s) - 2.0 * k * (2.0 * om + y);
    return num / (den * den);
}

double bic_closed(double y, const FreeParticleBicModel& m) {
    const double k = m.k, om = m.omega;
    return m.C * 4.0 * k * std::sin(k * y) / (2.0 * k * (2.0 * om + y) - std::sin(2.0 * k * y));
}

double scattering_closed(double y, double q, const FreeParticleBicModel& m) {
    const double k = m.k, om = m.omega;
    if (q * q == k * k) throw DegenerateEnergyError("scattering_closed: q^2 equals the embedded energy");
    // cot(ky) sin^2(ky) written as sin(ky) cos(ky) to stay finite at the nodes of sin.
    const double num =
        4.0 * k * std::sin(k * y) * (k * std::cos(k * y) * std::sin(q * y) - q * std::sin(k * y) * std::cos(q * y));
    const double den = (q * q - k * k) * (2.0 * k * (2.0 * om + y) - std::sin(2.0 * k * y));
    return num / den - std::sin(q * y);
}

double second_seed_closed(double y, double k1, double k2, double omega1) {
    if (k1 == k2) throw DegenerateEnergyError("second_seed_closed: factorization energies coincide");
    return scattering_closed(y, k2, FreeParticleBicModel(k1, omega1));
}

double bic_norm_sq_bound(const FreeParticleBicModel& m) {
    return 1.0 / m.omega + 8.0 * m.k / (8.0 * m.k * m.omega + kPi - 2.0);
}

double v_xt_closed(double x, double t, const FreeParticleBicModel& m) {
    const double s = 4.0 * t + 1.0;
    return v2_closed(x / s, m) / (s * s);
}

Complex phi_eps_closed(double x, double t, const FreeParticleBicModel& m) {
    const double k = m.k, om = m.omega;
    const double s = 4.0 * t + 1.0;
    const Complex phase = std::exp(Complex(0.0, (4.0 * x * x + k * k) / (16.0 * t + 4.0)));
    const double den = s * std::sin(2.0 * k * x / s) - 2.0 * k * (2.0 * om + 8.0 * om * t + x);
    return m.C * Complex(0.0, 4.0 * k) * std::sqrt(s) * phase * std::sin(k * x / s) / den;
}

Complex phi_scattering_closed(double x, double t, double q, const FreeParticleBicModel& m) {
    const double k = m.k, om = m.omega;
    if (q * q == k * k) throw DegenerateEnergyError("phi_scattering_closed: q^2 equals the embedded energy");
    const double s = 4.0 * t + 1.0;
    const double yy = x / s;
    const Complex phase = std::exp(Complex(0.0, (4.0 * x * x + q * q) / (16.0 * t + 4.0)));
    const double chi_num =
        4.0 * k * std::sin(k * yy) * (k * std::cos(k * yy) * std::sin(q * yy) - q * std::sin(k * yy) * std::cos(q * yy));
    const double chi_den = (q * q - k * k) * (4.0 * k * om + 2.0 * k * yy - std::sin(2.0 * k * yy));
    const double chi = chi_num / chi_den;
    return phase / Complex(0.0, std::sqrt(s)) * (chi - std::sin(q * yy));
}

bool envelope_holds(const RealField& psi, const EnvelopeFit& fit, double y_from) {
    return envelope_excess(psi, fit, y_from) <= 1.0;
}

double envelope_excess(const RealField& psi, const EnvelopeFit& fit, double y_from) {
    if (!(fit.a > 0.0) || !(fit.b > 0.0)) throw std::invalid_argument("envelope: a and b must be positive");
    double worst = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double y = psi.grid.node(i);
        if (y < y_from) continue;
        worst = std::max(worst, std::abs(psi.values[i]) * (fit.b + y) / fit.a);
    }
    return worst;
}

namespace {
EnvelopeFit min_a_fit(const RealField& psi, double y_from, double y_to) {
    double best_a = 0.0, best_b = 0.0;
    for (int j = 0; j < 400; ++j) {
        double b = 0.1 * std::pow(1000.0 / 0.1, j / 399.0);  // log grid over [0.1, 1000]
        double a = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            double y = psi.grid.node(i);
            if (y < y_from || y > y_to) continue;
            a = std::max(a, std::abs(psi.values[i]) * (b + y));
        }
        if (best_a == 0.0 || a < best_a) {
            best_a = a;
            best_b = b;
        }
    }
    return {best_a, best_b};
}
}  // namespace

EnvelopeFitResult fit_envelope(const RealField& psi, double y_from) {
    const double y_max = psi.grid.y_max;
    EnvelopeFit full = min_a_fit(psi, y_from, y_max);
    if (!(full.a > 0.0)) return {full, false, 0.0};
    EnvelopeFit half = min_a_fit(psi, y_from, y_from + (y_max - y_from) / 2.0);
    if (!(half.a > 0.0)) return {full, false, 0.0};
    double ratio = full.a / half.a;
    return {full, ratio <= 1.5, ratio};
}

AdmissibilityReport admissibility_check(const RealField& V0, double tail_start, double growth_tol) {
    const Grid& g = V0.grid;
    if (!g.contains(tail_start)) throw std::invalid_argument("admissibility_check: tail_start outside the grid");
    RealField dV = derivative(V0);
    RealField ddV = second_derivative(V0);
    auto segment = [&](const RealField& f, double lo, double hi, bool square) {
        // Simpson over the sub-grid [lo, hi]
        auto i0 = static_cast<std::size_t>(std::ceil((lo - g.y_min) / g.h()));
        auto i1 = static_cast<std::size_t>(std::floor((hi - g.y_min) / g.h()));
        if (i1 <= i0 + 2) return 0.0;
        std::vector<double> vals(f.values.begin() + static_cast<long>(i0), f.values.begin() + static_cast<long>(i1) + 1);
        for (auto& x : vals) x = square ? x * x : std::abs(x);
        Grid sub(g.node(i0), g.node(i1), vals.size());
        return simpson_integral(RealField(sub, std::move(vals)));
    };
    const double y_end = g.y_max;
    const double mid = tail_start + (y_end - tail_start) / 2.0;
    AdmissibilityReport rep;
    double g1 = segment(dV, tail_start, mid, true);
    double g2 = segment(dV, mid, y_end, true);
    double c1 = segment(ddV, tail_start, mid, false);
    double c2 = segment(ddV, mid, y_end, false);
    rep.grad_sq_integral = g1 + g2;
    rep.curv_abs_integral = c1 + c2;
    const double tiny = 1e-14;
    rep.grad_sq_growth = (g1 > tiny) ? g2 / g1 : 0.0;
    rep.curv_abs_growth = (c1 > tiny) ? c2 / c1 : 0.0;
    rep.pass = rep.grad_sq_growth <= 1.0 + growth_tol && rep.curv_abs_growth <= 1.0 + growth_tol;
    return rep;
}

TailReport tail_validator(const RealField& V2, const RealField& psi_bic, double V_r, double tail_bound) {
    if (!(V2.grid == psi_bic.grid)) throw std::invalid_argument("tail_validator: fields must share a grid");
    const Grid& g = V2.grid;
    TailReport rep;
    const double decade_start = g.y_max - (g.y_max - g.y_min) / 10.0;
    for (std::size_t i = 0; i < V2.size(); ++i)
        if (g.node(i) >= decade_start)
            rep.potential_tail_sup = std::max(rep.potential_tail_sup, std::abs(V2.values[i] - V_r));
    rep.potential_ok = rep.potential_tail_sup < tail_bound;
    EnvelopeFitResult fit = fit_envelope(psi_bic);
    rep.fit = fit.fit;
    rep.envelope_ok = fit.stable && fit.fit.a > 0.0;
    rep.pass = rep.potential_ok && rep.envelope_ok;
    return rep;
}

}  // namespace fbic::models
