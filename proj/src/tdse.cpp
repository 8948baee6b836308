#include "fbic/tdse.hpp"

#include <algorithm>
#include <cmath>

#include "fbic/numerics.hpp"

namespace fbic {

namespace {

// Thomas elimination for the CN system. diag/rhs are overwritten.
void solve_tridiagonal(std::vector<Complex>& diag, Complex off, std::vector<Complex>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == Complex(0.0, 0.0)) throw std::runtime_error("tridiagonal solve breakdown");
        Complex m = off / diag[i - 1];
        diag[i] -= m * off;
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off * rhs[i + 1]) / diag[i];
}

// Interior CN sweep; phi[0] and phi[n-1] are pinned to zero.
void cn_step_inplace(std::vector<Complex>& phi, const std::vector<double>& V_half, double h, double dt) {
    const std::size_t n = phi.size();
    const Complex lam(0.0, dt / 2.0);
    const double inv_h2 = 1.0 / (h * h);
    const Complex off = -lam * inv_h2;
    const std::size_t m = n - 2;
    std::vector<Complex> diag(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double Hd = 2.0 * inv_h2 + V_half[i + 1];
        diag[i] = 1.0 + lam * Hd;
        const Complex left = (i == 0) ? Complex(0.0) : phi[i];
        const Complex right = (i == m - 1) ? Complex(0.0) : phi[i + 2];
        rhs[i] = phi[i + 1] - lam * (Hd * phi[i + 1] - (left + right) * inv_h2);
    }
    solve_tridiagonal(diag, off, rhs);
    phi[0] = 0.0;
    phi[n - 1] = 0.0;
    for (std::size_t i = 0; i < m; ++i) phi[i + 1] = rhs[i];
}

// The discrete l2 norm h sum |phi|^2 is the quantity the Cayley scheme
// conserves exactly (ends are pinned to zero, so this is also the trapezoid).
double grid_norm_sq(const std::vector<Complex>& phi, const Grid& g) {
    double acc = 0.0;
    for (const auto& v : phi) acc += std::norm(v);
    return acc * g.h();
}

}  // namespace

ComplexField step(const ComplexField& phi, const RealField& V_now, const RealField& V_next, double dt) {
    if (!(phi.grid == V_now.grid) || !(phi.grid == V_next.grid))
        throw std::invalid_argument("step: fields must share a grid");
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    std::vector<double> V_half(phi.size());
    for (std::size_t i = 0; i < V_half.size(); ++i) V_half[i] = 0.5 * (V_now.values[i] + V_next.values[i]);
    std::vector<Complex> out = phi.values;
    cn_step_inplace(out, V_half, phi.grid.h(), dt);
    return ComplexField(phi.grid, std::move(out));
}

Trajectory evolve(const ComplexField& phi0, const TimePotential& V_of_t, const PropagatorConfig& cfg) {
    cfg.validate();
    if (!(phi0.grid == cfg.grid)) throw std::invalid_argument("evolve: initial state not on the configured grid");
    const Grid& g = cfg.grid;
    const double h = g.h();
    const auto n_steps = static_cast<std::size_t>(std::llround((cfg.t_end - cfg.t_start) / cfg.dt));
    const auto density_stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.density_sample_dt / cfg.dt)));

    Trajectory traj;
    traj.grid = g;
    std::vector<Complex> phi = phi0.values;
    phi.front() = 0.0;
    phi.back() = 0.0;

    std::vector<double> V_half(g.n);
    std::vector<double> sample_left = cfg.sample_times;
    std::sort(sample_left.begin(), sample_left.end());

    auto record_density = [&](double t) {
        std::vector<double> dens(g.n);
        for (std::size_t i = 0; i < g.n; ++i) dens[i] = std::norm(phi[i]);
        traj.density_times.push_back(t);
        traj.norm_history.push_back(grid_norm_sq(phi, g));
        traj.densities.push_back(std::move(dens));
    };
    auto maybe_record_state = [&](double t) {
        while (!sample_left.empty() && sample_left.front() <= t + cfg.dt / 2.0) {
            traj.sample_times.push_back(sample_left.front());
            traj.states.push_back(phi);
            sample_left.erase(sample_left.begin());
        }
    };

    record_density(cfg.t_start);
    maybe_record_state(cfg.t_start);

    double t = cfg.t_start;
    for (std::size_t k = 0; k < n_steps; ++k) {
        V_of_t(t + cfg.dt / 2.0, V_half);
        if (V_half.size() != g.n) throw std::runtime_error("evolve: potential filler changed the grid size");
        cn_step_inplace(phi, V_half, h, cfg.dt);
        t = cfg.t_start + static_cast<double>(k + 1) * cfg.dt;
        const double edge = std::abs(phi[g.n - 2]);
        traj.max_leak = std::max(traj.max_leak, edge);
        if (edge > cfg.leak_threshold)
            throw LeakError("evolve: boundary leak " + std::to_string(edge) + " exceeds threshold at t = " +
                            std::to_string(t) + " (domain too small)");
        if ((k + 1) % density_stride == 0 || k + 1 == n_steps) record_density(t);
        maybe_record_state(t);
    }
    return traj;
}

double density_drift(const Trajectory& traj, double t_ref) {
    const auto& times = traj.density_times;
    auto it = std::find_if(times.begin(), times.end(),
                           [&](double t) { return std::abs(t - t_ref) < 1e-12 + 1e-9 * std::abs(t_ref); });
    if (it == times.end()) throw std::invalid_argument("density_drift: t_ref is not a sampled time");
    const std::size_t ref = static_cast<std::size_t>(it - times.begin());
    const auto& base = traj.densities[ref];
    double worst = 0.0;
    for (std::size_t s = ref; s < traj.densities.size(); ++s) {
        const auto& d = traj.densities[s];
        for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(d[i] - base[i]));
    }
    return worst;
}

}  // namespace fbic
