#pragma once

#include <functional>

#include "fbic/core.hpp"

namespace fbic {

/// Fills V(., t) on the propagator grid.
using TimePotential = std::function<void(double t, std::vector<double>& out)>;

/// Settings for a propagation run. The grid must be wide enough that |phi| at
/// the right boundary stays below leak_threshold; the run aborts otherwise.
struct PropagatorConfig {
    Grid grid;
    double dt = 1e-4;
    double t_start = 0.0;
    double t_end = 1.0;
    bool dirichlet_both = true;          // only supported boundary; kept for config round-trips
    bool frozen_gauge_removed = false;   // scenario assembly flag: evolve exp(-ig) phi under the frozen Hamiltonian
    double leak_threshold = 0.05;
    std::vector<double> sample_times;    // full state snapshots
    double density_sample_dt = 0.005;    // cadence of density snapshots for drift metrics

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("PropagatorConfig: dt must be positive");
        if (!(t_end > t_start)) throw std::invalid_argument("PropagatorConfig: t_end must exceed t_start");
        if (!(leak_threshold > 0.0)) throw std::invalid_argument("PropagatorConfig: leak_threshold must be positive");
        if (!dirichlet_both) throw std::invalid_argument("PropagatorConfig: only Dirichlet boundaries are supported");
        if (grid.n < 7) throw std::invalid_argument("PropagatorConfig: grid too small");
    }
};

/// One Crank-Nicolson step with the potential averaged between the two slices:
/// (1 + i dt/2 H) phi_next = (1 - i dt/2 H) phi,  H = -d^2/dx^2 + (V_now + V_next)/2,
/// Dirichlet at both ends, tridiagonal elimination.
ComplexField step(const ComplexField& phi, const RealField& V_now, const RealField& V_next, double dt);

struct Trajectory {
    Grid grid;
    std::vector<double> sample_times;                  // actually hit sample times
    std::vector<std::vector<Complex>> states;          // one snapshot per sample time
    std::vector<double> density_times;
    std::vector<std::vector<double>> densities;        // |phi|^2 snapshots at density_times
    std::vector<double> norm_history;                  // norm^2 at density_times
    double max_leak = 0.0;                             // max |phi| at the last interior node
};

/// Propagate phi0 under V(., t). Snapshots at cfg.sample_times, densities every
/// cfg.density_sample_dt, leak monitored each step.
Trajectory evolve(const ComplexField& phi0, const TimePotential& V_of_t, const PropagatorConfig& cfg);

/// max over sampled t >= t_ref of sup_x | |phi(x,t)|^2 - |phi(x,t_ref)|^2 |.
/// t_ref must be one of the density sample times.
double density_drift(const Trajectory& traj, double t_ref);

}  // namespace fbic
