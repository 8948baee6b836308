#include "fbic/freeze.hpp"

#include <cmath>

#include "fbic/numerics.hpp"

namespace fbic {

double frozen_potential(const std::function<double(double, double)>& V_eval, double x, double t, const FreezeSpec& f) {
    if (t < 0.0) throw std::domain_error("frozen_potential: t must be nonnegative");
    return V_eval(x, std::min(t, f.t_F));
}

double gauge_phase(double x, double E, const FreezeSpec& f) { return GaugePhase(E, f).g(x); }

Complex frozen_state(const std::function<Complex(double)>& psibar_eval,
                     const std::function<Complex(double, double)>& phi_eval, double E, double x, double t,
                     const FreezeSpec& f) {
    if (t < 0.0) throw std::domain_error("frozen_state: t must be nonnegative");
    if (t < f.t_F) return phi_eval(x, t);
    const double s = f.scale();
    const double eps_F = E / (s * s);
    const double y = y_of_xt(x, f.t_F, f.constants);
    return psibar_eval(y) / std::sqrt(s) * std::exp(Complex(0.0, -eps_F * (t - f.t_F)));
}

double magnetic_residual(const ComplexField& phi_slice, const RealField& V_slice, double E, const FreezeSpec& f,
                         std::size_t skip) {
    if (!(phi_slice.grid == V_slice.grid)) throw std::invalid_argument("magnetic_residual: fields must share a grid");
    const Grid& g = phi_slice.grid;
    GaugePhase gauge(E, f);
    ComplexField d1 = derivative(phi_slice);
    ComplexField d2 = second_derivative(phi_slice);
    const double s = f.scale();
    const double eps_F = E / (s * s);
    const double dA = gauge.dA_x();
    double worst = 0.0;
    if (2 * skip + 1 >= g.n) throw std::invalid_argument("magnetic_residual: skip too large for grid");
    for (std::size_t i = skip; i + skip < g.n; ++i) {
        const double x = g.node(i);
        const double A = gauge.A_x(x);
        // (-i d/dx + A)^2 = -d2 - i A' - 2 i A d1 + A^2
        Complex r = -d2.values[i] - Complex(0.0, dA) * phi_slice.values[i] -
                    Complex(0.0, 2.0 * A) * d1.values[i] + (A * A + V_slice.values[i] - eps_F) * phi_slice.values[i];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

ReversedPair time_reversal(std::function<Complex(double, double)> phi_eval, std::function<double(double, double)> V_eval) {
    ReversedPair out;
    out.phi = [phi = std::move(phi_eval)](double x, double t) { return std::conj(phi(x, -t)); };
    out.V = [V = std::move(V_eval)](double x, double t) { return V(x, -t); };
    return out;
}

}  // namespace fbic
