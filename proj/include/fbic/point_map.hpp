#pragma once

#include <functional>

#include "fbic/core.hpp"

namespace fbic {

/// Constants of the special solution A = -1/(4t + c1), B = c2/(4t + c1).
/// E is the energy label of the state being transported (it enters the phase).
struct PointMapConstants {
    double c1 = 1.0;
    double c2 = 0.0;
    double t0 = 0.0;
    double E = 0.0;

    double scale(double t) const { return 4.0 * t + c1; }
    void require_regular(double t) const {
        if (scale(t) == 0.0) throw std::domain_error("point map: singular time t = -c1/4");
    }
};

/// y(x, t) = (2x - c2) / (2 (4t + c1)).
double y_of_xt(double x, double t, const PointMapConstants& c);

/// Inverse of the spatial map at fixed t.
double x_of_yt(double y, double t, const PointMapConstants& c);

/// V(x, t) = V2(y(x,t)) / (4t + c1)^2.
double transform_potential(const std::function<double(double)>& V2_eval, double x, double t,
                           const PointMapConstants& c);

/// phi(x, t) = psi(y(x,t)) exp{ i [x^2 - c2 x + (E + c2^2)/4] / (4t + c1) } / sqrt(4t + c1).
/// Requires 4t + c1 > 0.
Complex transform_wavefunction(const std::function<Complex(double)>& psi_eval, double x, double t,
                               const PointMapConstants& c);

/// The phase exponent of the map at (x, t) (handy for gauge bookkeeping).
double transform_phase(double x, double t, const PointMapConstants& c);

// ---- general map with arbitrary A(t), B(t) ----

struct GeneralMapSpec {
    std::function<double(double)> A;
    std::function<double(double)> B;
    double t0 = 0.0;
    double E = 0.0;
};

struct GeneralMapPoint {
    double y = 0.0;
    Complex phi;
    double V = 0.0;
};

/// Evaluates the general transformation. Time integrals are cached as
/// cumulative tables over [t0, t_max] (refreshed if queried beyond t_max),
/// with a local Boole correction for off-node times.
class GeneralMap {
public:
    GeneralMap(GeneralMapSpec spec, double t_max, std::size_t cells = 2000);

    double y(double x, double t) const;
    Complex wavefunction(const std::function<Complex(double)>& psi_eval, double x, double t) const;
    double potential(const std::function<double(double)>& V2_eval, double x, double t) const;

    GeneralMapPoint evaluate(const std::function<Complex(double)>& psi_eval,
                             const std::function<double(double)>& V2_eval, double x, double t) const;

    /// Coefficients of the x^2 and x terms of the transformed potential:
    /// A' - 4A^2 and B' - 4AB, with the derivatives by central differences.
    std::pair<double, double> monomial_coefficients(double t) const;

private:
    double int_A(double t) const;        // int_{t0}^t A
    double int_B_e4(double t) const;     // int B(tau) exp(4 int A) dtau
    double int_e8(double t) const;       // int exp(8 int A) dtau
    double int_B2(double t) const;       // int B^2 dtau

    template <class F>
    double table_query(const std::vector<double>& table, F&& integrand, double t) const;

    GeneralMapSpec spec_;
    double t_max_;
    double dt_;
    std::vector<double> tab_A_, tab_Be4_, tab_e8_, tab_B2_;
};

}  // namespace fbic
