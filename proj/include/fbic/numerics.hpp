#pragma once

#include <span>

#include "fbic/core.hpp"

namespace fbic {

// Finite-difference stencils, 4th order: central in the interior, one-sided at
// the edges. Shared by the residual oracle and the field-level operators.
void derivative(std::span<const double> f, double h, std::span<double> out);
void derivative(std::span<const Complex> f, double h, std::span<Complex> out);
void second_derivative(std::span<const double> f, double h, std::span<double> out);
void second_derivative(std::span<const Complex> f, double h, std::span<Complex> out);

RealField derivative(const RealField& f);
RealField second_derivative(const RealField& f);
ComplexField derivative(const ComplexField& f);
ComplexField second_derivative(const ComplexField& f);

/// Definite integral over the whole grid by composite Simpson
/// (3/8 rule on the last panel when the interval count is odd).
double simpson_integral(const RealField& f);

/// Running integral F(y) = int_{y0}^{y} f dz. Cubic-interpolant panel rule,
/// exact for cubics, O(h^4) at every node; y0 may fall between nodes.
RealField cumulative_integral(const RealField& f, double y0);

/// d^2/dy^2 ln|f| for sign-definite f. |f| must stay above floor_rel * max|f|.
RealField second_log_derivative(const RealField& f, double floor_rel = 1e-10);

/// int |psi|^2 dy by composite Simpson.
double l2_norm_sq(const ComplexField& psi);
double l2_norm_sq(const RealField& psi);

/// Interior sup-norm of the stationary residual -psi'' + V psi - E psi.
/// The first and last `skip` nodes are excluded (one-sided stencil zone).
double eigen_residual(const RealField& psi, const RealField& V, double E, std::size_t skip = 5);
double eigen_residual(const ComplexField& psi, const RealField& V, double E, std::size_t skip = 5);

/// 6-point Lagrange interpolation on the uniform grid.
double interpolate(const RealField& f, double y);
Complex interpolate(const ComplexField& f, double y);

/// Throws SingularityError if f changes sign or |f| dips below floor_rel * max|f|.
void require_sign_definite(const RealField& f, double floor_rel, const char* what);

double max_abs(std::span<const double> v);
double max_abs(std::span<const Complex> v);

}  // namespace fbic
