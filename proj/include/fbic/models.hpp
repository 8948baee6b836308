#pragma once

#include "fbic/core.hpp"

namespace fbic::models {

/// Free-particle family on the positive semi-axis: one embedded bound state at
/// energy k^2 added by a confluent transformation with weight constant omega.
struct FreeParticleBicModel {
    double k = 1.0;
    double omega = 1.0;
    double C = 1.0;  // amplitude of the embedded state

    FreeParticleBicModel() = default;
    FreeParticleBicModel(double k_, double omega_, double C_ = 1.0) : k(k_), omega(omega_), C(C_) {
        if (!(k > 0.0)) throw std::invalid_argument("FreeParticleBicModel: k must be positive");
        if (!(omega > 0.0)) throw std::invalid_argument("FreeParticleBicModel: omega must be positive");
    }

    double epsilon() const { return k * k; }
};

/// Stationary partner potential of the free particle (closed form).
double v2_closed(double y, const FreeParticleBicModel& m);

/// The embedded bound state C 4k sin(ky) / (2k(2 omega + y) - sin 2ky).
double bic_closed(double y, const FreeParticleBicModel& m);

/// Scattering eigenstate at energy q^2 of the partner potential. Throws
/// DegenerateEnergyError when q^2 == k^2.
double scattering_closed(double y, double q, const FreeParticleBicModel& m);

/// Seed for a second transformation: the scattering state at energy k2^2 of
/// the once-transformed system with parameters (k1, omega1).
double second_seed_closed(double y, double k1, double k2, double omega1);

/// Closed-form upper bound for the squared norm of the embedded state (C = 1).
double bic_norm_sq_bound(const FreeParticleBicModel& m);

// Time-dependent closed forms for the special map constants c1 = 1, c2 = 0.
double v_xt_closed(double x, double t, const FreeParticleBicModel& m);
Complex phi_eps_closed(double x, double t, const FreeParticleBicModel& m);
Complex phi_scattering_closed(double x, double t, double q, const FreeParticleBicModel& m);

/// Envelope a/(b + y) certifying the 1/y decay of a bound state's tail.
struct EnvelopeFit {
    double a = 0.0;
    double b = 0.0;
};

/// True when |psi| <= a/(b + y) at every node with y >= y_from.
bool envelope_holds(const RealField& psi, const EnvelopeFit& fit, double y_from = 0.0);

/// Largest |psi(y)| (b + y) / a over nodes with y >= y_from (<= 1 means the bound holds).
double envelope_excess(const RealField& psi, const EnvelopeFit& fit, double y_from = 0.0);

/// Minimize a over a log-spaced scan of b so that |psi| <= a/(b+y) at every
/// node with y >= y_from; stable = the fit is reproduced (within 1.5x) when
/// refit on the first half of the window, i.e. it is not driven by tail growth.
struct EnvelopeFitResult {
    EnvelopeFit fit;
    bool stable = false;
    double stability_ratio = 0.0;  // full-window a over half-window a
};
EnvelopeFitResult fit_envelope(const RealField& psi, double y_from = 0.0);

/// Tail admissibility proxies: integrals of |V'|^2 and |V''| over [tail_start, y_max],
/// with growth ratios of the two half-window increments. pass = neither integral's
/// increments grow (ratio <= 1 + tol), so the potential's tail is not divergence-driving.
struct AdmissibilityReport {
    double grad_sq_integral = 0.0;
    double curv_abs_integral = 0.0;
    double grad_sq_growth = 0.0;  // increment over the 2nd half / increment over the 1st half
    double curv_abs_growth = 0.0;
    bool pass = false;
};
AdmissibilityReport admissibility_check(const RealField& V0, double tail_start, double growth_tol = 0.10);

/// Tail checks for a transformed potential and its localized state:
/// (a) sup |V2 - V_r| over the last decade of the grid stays below tail_bound,
/// (b) a stable envelope fit exists for the state.
struct TailReport {
    double potential_tail_sup = 0.0;
    bool potential_ok = false;
    EnvelopeFit fit;
    bool envelope_ok = false;
    bool pass = false;
};
TailReport tail_validator(const RealField& V2, const RealField& psi_bic, double V_r, double tail_bound = 0.5);

}  // namespace fbic::models
