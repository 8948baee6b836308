#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fbic/freeze.hpp"
#include "fbic/susy.hpp"
#include "fbic/tdse.hpp"

namespace fbic {

/// One confluent step of the scenario chain: energy epsilon = k^2 and weight omega.
struct StepParams {
    double epsilon = 1.0;
    double omega = 1.0;
};

/// Full pipeline description. Parsed from JSON; every physical quantity is in
/// the dimensionless units of the library (hbar = 1, 2m = 1).
struct ScenarioConfig {
    std::vector<StepParams> steps{{1.0, 1.0}};
    double c1 = 1.0;
    double c2 = 0.0;
    double t_F = 0.2;
    double y_max = 40.0;       // stationary-grid extent requested by the user
    double h_stationary = 1e-3;
    double x_max = 80.0;       // propagation domain [0, x_max]
    double h_propagator = 5e-3;
    double dt = 1e-4;
    double t_end = 1.2;        // propagation horizon
    double leak_threshold = 0.05;
    double density_sample_dt = 0.005;
    bool time_reversed = false;

    static ScenarioConfig from_json(const std::string& text);
    std::string to_canonical_json() const;
    std::string hash() const;  // sha256 of the canonical form
    void validate() const;     // throws ConfigError with the offending field
};

/// Assembled pipeline: engine chain for the stationary system plus evaluators
/// for the time-dependent and frozen quantities. The free particle on the
/// positive semi-axis is the base system; seeds are sin(k y) with analytic
/// derivatives, later seeds are engine-mapped scattering states.
class Scenario {
public:
    explicit Scenario(ScenarioConfig cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const ConfluentLadder& ladder() const { return *ladder_; }
    const Grid& stationary_grid() const { return ladder_->grid(); }
    const RealField& top_potential() const { return ladder_->potential(ladder_->depth()); }
    FreezeSpec freeze_spec(double E) const;

    /// Left end of the spatial domain: the image of y = 0, fixed in time.
    double x_min() const { return cfg_.c2 / 2.0; }
    /// Export / propagation lattice [x_min, x_max] at the propagator spacing.
    Grid propagation_grid() const { return Grid::with_spacing(x_min(), cfg_.x_max, cfg_.h_propagator); }

    /// Bound state of the final system tied to step j (C = 1), with derivative.
    const StateWithDerivative& bound_state(std::size_t step) const;
    /// Scattering state of the final system at energy E (from sin(qy) below).
    StateWithDerivative scattering_state(double E) const;

    // (x, t) evaluators; x in [0, x_max], t >= 0 and nonsingular.
    double V_xt(double x, double t) const;
    double V_frozen(double x, double t) const;
    Complex phi_bound(std::size_t step, double x, double t) const;      // point-transformed, not frozen
    Complex phi_frozen_bound(std::size_t step, double x, double t) const;
    /// Generic transported / frozen evaluators for a caller-held stationary
    /// state (fetch scattering states once; these are called per grid point).
    Complex phi_of_state(const ComplexField& psi, double E, double x, double t) const;
    Complex phi_frozen_of_state(const ComplexField& psi, double E, double x, double t) const;

    // Reversed-scenario slices (time-reversal of the frozen pipeline; the
    // display time runs from the flat t_F slice back toward the stationary
    // potential, freezing there).
    double V_reversed(double x, double t) const;
    double density_reversed_bound(std::size_t step, double x, double t) const;

    /// Potential filler on the caller's propagation grid (frozen or time-dependent).
    TimePotential propagator_potential(bool frozen, const Grid& g) const;

    double frozen_eigenvalue(std::size_t step) const;

private:
    ScenarioConfig cfg_;
    std::unique_ptr<ConfluentLadder> ladder_;
    std::vector<StateWithDerivative> bound_states_;
};

/// Free-particle chain on [0, y_extent]: step seeds validated against the
/// evolving potential; the first seed is sin(k1 y), each later seed the
/// engine-mapped scattering state at its own energy.
TransformChain build_free_particle_chain(const Grid& grid, const std::vector<StepParams>& steps);

}  // namespace fbic
