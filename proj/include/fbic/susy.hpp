#pragma once

#include <optional>

#include "fbic/numerics.hpp"

namespace fbic {

/// A factorization energy with its seed solution of -u'' + V0 u = epsilon u.
/// `du` is the seed's derivative; supply it analytically when available —
/// a finite-difference fallback is used otherwise, which is accurate enough
/// for single transformations but adds node-level noise that chained
/// intertwinings would amplify.
struct SeedSpec {
    double epsilon = 0.0;
    RealField u;
    std::optional<RealField> du;
    double omega = 0.0;
    double y0 = 0.0;

    RealField seed_derivative() const { return du ? *du : derivative(u); }
};

struct SeedValidation {
    double residual;      // interior sup of -u'' + V0 u - eps u
    double residual_tol;  // absolute tolerance it was checked against
    double w_min_abs;     // min |omega + int u^2|
    double w_max_abs;
};

/// Checks the seed equation and the regularity of w = omega + int_{y0} u^2.
/// Throws std::invalid_argument on a residual failure, RegularityError when w
/// is not sign-definite (margin: min|w| >= margin_rel * max|w|).
SeedValidation validate_seed(const RealField& V0, const SeedSpec& seed, double residual_tol_rel = 1e-6,
                             double margin_rel = 1e-6);

/// w = omega + int_{y0}^{y} u^2 dz; throws RegularityError if it is not sign-definite.
RealField regularity_weight(const SeedSpec& seed, double margin_rel = 1e-6);

// ---- first-order transformation ----

/// V1 = V0 - 2 (ln u)''. The seed must be nodeless.
RealField first_order_partner(const RealField& V0, const RealField& u);

/// Missing state c / u of the first-order partner.
RealField first_order_missing(const RealField& u, double c);

/// (1/sqrt|E - eps|) (-psi' + (u'/u) psi). Throws DegenerateEnergyError when E == eps.
ComplexField apply_first_intertwiner(const RealField& u, const ComplexField& psi, double E, double epsilon);

// ---- confluent (second-order, equal factorization energies) ----

/// Reduction-of-order auxiliary v = w / u. v is genuinely singular at interior
/// zeros of u; nodes where |u| is below the floor are filled by quadratic
/// interpolation from valid neighbours. Diagnostic use only — the partner
/// potential and states are always built from w.
RealField confluent_auxiliary(const SeedSpec& seed, double floor_rel = 1e-10);

/// V2 = V0 - 2 (ln w)'' with w = omega + int u^2. Regular across zeros of u.
RealField confluent_partner(const RealField& V0, const SeedSpec& seed);

/// Missing state C u / w. Pass normalize = true to fix C so that the L2 norm
/// over the grid is 1 (throws std::domain_error if the norm is not usable).
RealField confluent_missing(const SeedSpec& seed, double C, bool normalize = false);

/// Node-safe composed intertwiner: maps an eigenstate of V0 at energy E to one
/// of the confluent partner. Uses the reduction via the seed equation,
///   L psi = psi'' - (w'/w) psi' + (u u'/w - V0 + eps) psi,  result = L psi / (E - eps),
/// with psi', psi'' from 4th-order finite differences.
ComplexField apply_confluent_intertwiner(const RealField& V0, const SeedSpec& seed, const ComplexField& psi, double E);

// ---- chained transformations ----

struct TransformChain {
    RealField base_potential;
    std::vector<SeedSpec> steps;
};

/// A state together with its derivative, both needed to push it through
/// further confluent steps without finite-difference noise.
struct StateWithDerivative {
    ComplexField value;
    ComplexField deriv;
};

/// Precomputed chain: per-level potentials and regularity weights, with each
/// seed validated against the potential of its own level. State propagation
/// through a step uses the seed equation and the input state's own eigenvalue
/// equation to eliminate all derivatives except the ones carried along, so the
/// chained states stay quadrature-smooth.
class ConfluentLadder {
public:
    explicit ConfluentLadder(const TransformChain& chain, double residual_tol_rel = 1e-6);

    std::size_t depth() const { return steps_.size(); }
    const Grid& grid() const { return potentials_.front().grid; }

    /// V_{2k}: level 0 is the base potential, level depth() the final partner.
    const RealField& potential(std::size_t level) const { return potentials_.at(level); }

    /// Missing state of step j (levels are 1-based here: step j produces level j+...).
    StateWithDerivative missing_state(std::size_t step, double C = 1.0) const;

    /// Push a state at energy E from level `from` one step up.
    StateWithDerivative map_through(std::size_t step, const StateWithDerivative& state, double E) const;

    /// Map an eigenstate of the base potential at energy E to the top level.
    StateWithDerivative map_to_top(const StateWithDerivative& state0, double E) const;

    /// BIC of the final system associated with step j's factorization energy:
    /// step j's missing state pushed through the remaining steps.
    StateWithDerivative bound_state(std::size_t step, double C = 1.0) const;

    double step_epsilon(std::size_t step) const { return steps_.at(step).epsilon; }

private:
    struct StepData {
        double epsilon;
        RealField u;
        RealField du;
        RealField w;  // omega + int u^2
    };
    std::vector<StepData> steps_;
    std::vector<RealField> potentials_;  // depth() + 1 entries, from analytic recursion
};

/// Fold of confluent_partner / intertwiner over the chain (per-step analytic
/// propagation). The initial derivative is taken by finite differences; prefer
/// the overload with an explicit derivative when one is known analytically.
std::pair<RealField, ComplexField> iterate_chain(const TransformChain& chain, const ComplexField& psi0, double E);
std::pair<RealField, ComplexField> iterate_chain(const TransformChain& chain, const ComplexField& psi0,
                                                 const ComplexField& dpsi0, double E);

}  // namespace fbic
