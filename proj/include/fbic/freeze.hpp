#pragma once

#include <array>
#include <functional>

#include "fbic/point_map.hpp"

namespace fbic {

/// Freeze time plus the map constants of the scenario.
struct FreezeSpec {
    double t_F = 0.2;
    PointMapConstants constants;

    FreezeSpec() = default;
    FreezeSpec(double t_F_, PointMapConstants c) : t_F(t_F_), constants(c) {
        if (!(t_F > 0.0)) throw std::invalid_argument("FreezeSpec: t_F must be positive");
        if (!(constants.scale(t_F) > 0.0)) throw std::invalid_argument("FreezeSpec: 4 t_F + c1 must be positive");
    }

    double scale() const { return constants.scale(t_F); }
};

/// Position-dependent phase left on the states at the freeze time, and the
/// curl-free vector potential -g'(x) it generates.
class GaugePhase {
public:
    GaugePhase(double E, const FreezeSpec& f) : E_(E), f_(f) {}

    double g(double x) const {
        const auto& c = f_.constants;
        return (x * x - c.c2 * x + (E_ + c.c2 * c.c2) / 4.0) / f_.scale();
    }
    double A_x(double x) const { return -(2.0 * x - f_.constants.c2) / f_.scale(); }
    double dA_x() const { return -2.0 / f_.scale(); }

    /// The full vector potential (A_x(x), 0, 0); its curl vanishes identically
    /// because the only nonzero component depends on x alone.
    std::array<double, 3> vector_potential(double x) const { return {A_x(x), 0.0, 0.0}; }

private:
    double E_;
    FreezeSpec f_;
};

/// V_F(x,t): the time-dependent potential until t_F, then held at its t_F slice.
double frozen_potential(const std::function<double(double, double)>& V_eval, double x, double t, const FreezeSpec& f);

/// g(x) accessor matching the GaugePhase convention.
double gauge_phase(double x, double E, const FreezeSpec& f);

/// The piecewise solution of the frozen problem: phi(x,t) before t_F; after
/// t_F the gauge-removed slice evolving with the frozen eigenvalue
/// E/(4 t_F + c1)^2, continuous with exp(-i g) phi(., t_F) at the joint.
Complex frozen_state(const std::function<Complex(double)>& psibar_eval,
                     const std::function<Complex(double, double)>& phi_eval, double E, double x, double t,
                     const FreezeSpec& f);

/// Interior sup-norm of [(-i d/dx + A_x)^2 + V] phi - E/(4 t_F + c1)^2 phi on
/// the t_F slice, with 4th-order stencils.
double magnetic_residual(const ComplexField& phi_slice, const RealField& V_slice, double E, const FreezeSpec& f,
                         std::size_t skip = 5);

/// Time reversal: (phi, V) solving the time-dependent equation on [0, T] are
/// mapped to (conj phi(x,-t), V(x,-t)) solving it on [-T, 0].
struct ReversedPair {
    std::function<Complex(double, double)> phi;
    std::function<double(double, double)> V;
};
ReversedPair time_reversal(std::function<Complex(double, double)> phi_eval,
                           std::function<double(double, double)> V_eval);

}  // namespace fbic
