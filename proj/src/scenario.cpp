#include "fbic/scenario.hpp"

#include <cmath>
#include <memory>

#include <json.hpp>

#include "fbic/sha256.hpp"

namespace fbic {

using nlohmann::json;

namespace {

double require_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(path + key, "missing");
    if (!j.at(key).is_number()) throw ConfigError(path + key, "must be a number");
    return j.at(key).get<double>();
}

double optional_number(const json& j, const char* key, double fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(path + key, "must be a number");
    return j.at(key).get<double>();
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("not valid JSON: ") + e.what());
    }
    ScenarioConfig cfg;
    if (j.contains("model")) {
        const auto& model = j.at("model");
        if (!model.contains("steps") || !model.at("steps").is_array() || model.at("steps").empty())
            throw ConfigError("model.steps", "must be a non-empty array");
        cfg.steps.clear();
        std::size_t idx = 0;
        for (const auto& s : model.at("steps")) {
            std::string path = "model.steps[" + std::to_string(idx) + "].";
            StepParams p;
            p.epsilon = require_number(s, path, "epsilon");
            p.omega = require_number(s, path, "omega");
            cfg.steps.push_back(p);
            ++idx;
        }
    }
    if (j.contains("point_map")) {
        cfg.c1 = optional_number(j.at("point_map"), "c1", cfg.c1, "point_map.");
        cfg.c2 = optional_number(j.at("point_map"), "c2", cfg.c2, "point_map.");
    }
    if (j.contains("freeze")) cfg.t_F = optional_number(j.at("freeze"), "t_F", cfg.t_F, "freeze.");
    if (j.contains("stationary_grid")) {
        const auto& g = j.at("stationary_grid");
        cfg.y_max = optional_number(g, "y_max", cfg.y_max, "stationary_grid.");
        cfg.h_stationary = optional_number(g, "h", cfg.h_stationary, "stationary_grid.");
    }
    if (j.contains("propagator")) {
        const auto& p = j.at("propagator");
        cfg.x_max = optional_number(p, "x_max", cfg.x_max, "propagator.");
        cfg.h_propagator = optional_number(p, "h", cfg.h_propagator, "propagator.");
        cfg.dt = optional_number(p, "dt", cfg.dt, "propagator.");
        cfg.t_end = optional_number(p, "t_end", cfg.t_end, "propagator.");
        cfg.leak_threshold = optional_number(p, "leak_threshold", cfg.leak_threshold, "propagator.");
        cfg.density_sample_dt = optional_number(p, "density_sample_dt", cfg.density_sample_dt, "propagator.");
    }
    if (j.contains("time_reversed")) {
        if (!j.at("time_reversed").is_boolean()) throw ConfigError("time_reversed", "must be a boolean");
        cfg.time_reversed = j.at("time_reversed").get<bool>();
    }
    cfg.validate();
    return cfg;
}

std::string ScenarioConfig::to_canonical_json() const {
    json steps_json = json::array();
    for (const auto& s : steps) steps_json.push_back({{"epsilon", s.epsilon}, {"omega", s.omega}});
    json j = {{"model", {{"steps", steps_json}}},
              {"point_map", {{"c1", c1}, {"c2", c2}}},
              {"freeze", {{"t_F", t_F}}},
              {"stationary_grid", {{"y_max", y_max}, {"h", h_stationary}}},
              {"propagator",
               {{"x_max", x_max},
                {"h", h_propagator},
                {"dt", dt},
                {"t_end", t_end},
                {"leak_threshold", leak_threshold},
                {"density_sample_dt", density_sample_dt}}},
              {"time_reversed", time_reversed}};
    return j.dump(2);
}

std::string ScenarioConfig::hash() const { return sha256_hex(to_canonical_json()); }

void ScenarioConfig::validate() const {
    if (steps.empty()) throw ConfigError("model.steps", "at least one transformation step is required");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::string path = "model.steps[" + std::to_string(i) + "].";
        if (!(steps[i].epsilon > 0.0))
            throw ConfigError(path + "epsilon", "factorization energy must lie in the continuum (epsilon > 0)");
        if (!(steps[i].omega > 0.0))
            throw ConfigError(path + "omega",
                              "omega must be positive so that omega + int_0^y u^2 stays sign-definite (regularity)");
        for (std::size_t k = 0; k < i; ++k)
            if (steps[k].epsilon == steps[i].epsilon)
                throw ConfigError(path + "epsilon", "factorization energies must be distinct");
    }
    if (!(4.0 * t_F + c1 > 0.0)) throw ConfigError("freeze.t_F", "4 t_F + c1 must be positive (singular map time)");
    if (!(t_F > 0.0)) throw ConfigError("freeze.t_F", "must be positive");
    if (!(y_max > 0.0)) throw ConfigError("stationary_grid.y_max", "must be positive");
    if (!(h_stationary > 0.0) || h_stationary > y_max / 8.0)
        throw ConfigError("stationary_grid.h", "must be positive and resolve the domain");
    if (!(x_max > c2 / 2.0 + 1.0))
        throw ConfigError("propagator.x_max", "must exceed the left domain end c2/2 by at least 1");
    if (!(h_propagator > 0.0) || h_propagator > (x_max - c2 / 2.0) / 8.0)
        throw ConfigError("propagator.h", "must be positive and resolve the domain");
    if (!(dt > 0.0)) throw ConfigError("propagator.dt", "must be positive");
    if (!(t_end > t_F)) throw ConfigError("propagator.t_end", "must exceed the freeze time");
    if (!(leak_threshold > 0.0)) throw ConfigError("propagator.leak_threshold", "must be positive");
    if (!(density_sample_dt >= dt)) throw ConfigError("propagator.density_sample_dt", "must be at least dt");
}

TransformChain build_free_particle_chain(const Grid& grid, const std::vector<StepParams>& steps) {
    TransformChain chain;
    chain.base_potential = RealField(grid, std::vector<double>(grid.n, 0.0));
    for (std::size_t j = 0; j < steps.size(); ++j) {
        const double k = std::sqrt(steps[j].epsilon);
        SeedSpec seed;
        seed.epsilon = steps[j].epsilon;
        seed.omega = steps[j].omega;
        seed.y0 = 0.0;
        if (j == 0) {
            seed.u = RealField::sample(grid, [&](double y) { return std::sin(k * y); });
            seed.du = RealField::sample(grid, [&](double y) { return k * std::cos(k * y); });
        } else {
            // Seed of the next step: scattering state of the current system at
            // the new factorization energy, built by the engine with its
            // derivative propagated analytically.
            ConfluentLadder lad(chain);
            StateWithDerivative st{
                ComplexField::sample(grid, [&](double y) { return Complex(std::sin(k * y), 0.0); }),
                ComplexField::sample(grid, [&](double y) { return Complex(k * std::cos(k * y), 0.0); })};
            StateWithDerivative mapped = lad.map_to_top(st, steps[j].epsilon);
            std::vector<double> u(grid.n), du(grid.n);
            for (std::size_t i = 0; i < grid.n; ++i) {
                u[i] = mapped.value.values[i].real();
                du[i] = mapped.deriv.values[i].real();
            }
            seed.u = RealField(grid, std::move(u));
            seed.du = RealField(grid, std::move(du));
        }
        chain.steps.push_back(std::move(seed));
    }
    return chain;
}

Scenario::Scenario(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    // The engine grid must cover every y the point map can request:
    // y = (2x - c2)/(2(4t + c1)) peaks at t = 0 over [x_min, x_max].
    const double extent = std::max(cfg_.y_max, (2.0 * cfg_.x_max - cfg_.c2) / (2.0 * cfg_.c1));
    Grid grid = Grid::with_spacing(0.0, extent, cfg_.h_stationary);
    TransformChain chain = build_free_particle_chain(grid, cfg_.steps);
    ladder_ = std::make_unique<ConfluentLadder>(chain);
    for (std::size_t j = 0; j < cfg_.steps.size(); ++j) bound_states_.push_back(ladder_->bound_state(j));
}

FreezeSpec Scenario::freeze_spec(double E) const {
    PointMapConstants c{cfg_.c1, cfg_.c2, 0.0, E};
    return FreezeSpec(cfg_.t_F, c);
}

const StateWithDerivative& Scenario::bound_state(std::size_t step) const { return bound_states_.at(step); }

StateWithDerivative Scenario::scattering_state(double E) const {
    for (const auto& s : cfg_.steps)
        if (E == s.epsilon)
            throw DegenerateEnergyError("scattering_state: energy coincides with a chain factorization energy");
    const Grid& g = stationary_grid();
    const double q = std::sqrt(E);
    StateWithDerivative st{ComplexField::sample(g, [&](double y) { return Complex(std::sin(q * y), 0.0); }),
                           ComplexField::sample(g, [&](double y) { return Complex(q * std::cos(q * y), 0.0); })};
    return ladder_->map_to_top(st, E);
}

double Scenario::V_xt(double x, double t) const {
    PointMapConstants c{cfg_.c1, cfg_.c2, 0.0, 0.0};
    return transform_potential([&](double y) { return interpolate(top_potential(), y); }, x, t, c);
}

double Scenario::V_frozen(double x, double t) const {
    return frozen_potential([&](double xx, double tt) { return V_xt(xx, tt); }, x, t, freeze_spec(0.0));
}

Complex Scenario::phi_bound(std::size_t step, double x, double t) const {
    PointMapConstants c{cfg_.c1, cfg_.c2, 0.0, cfg_.steps.at(step).epsilon};
    const ComplexField& psi = bound_states_.at(step).value;
    return transform_wavefunction([&](double y) { return interpolate(psi, y); }, x, t, c);
}

Complex Scenario::phi_frozen_bound(std::size_t step, double x, double t) const {
    const double E = cfg_.steps.at(step).epsilon;
    const ComplexField& psi = bound_states_.at(step).value;
    return frozen_state([&](double y) { return interpolate(psi, y); },
                        [&](double xx, double tt) { return phi_bound(step, xx, tt); }, E, x, t, freeze_spec(E));
}

Complex Scenario::phi_of_state(const ComplexField& psi, double E, double x, double t) const {
    PointMapConstants c{cfg_.c1, cfg_.c2, 0.0, E};
    return transform_wavefunction([&](double y) { return interpolate(psi, y); }, x, t, c);
}

Complex Scenario::phi_frozen_of_state(const ComplexField& psi, double E, double x, double t) const {
    return frozen_state([&](double y) { return interpolate(psi, y); },
                        [&](double xx, double tt) { return phi_of_state(psi, E, xx, tt); }, E, x, t, freeze_spec(E));
}

double Scenario::V_reversed(double x, double t) const {
    const double tau = std::max(cfg_.t_F - t, 0.0);
    return V_xt(x, tau);
}

double Scenario::density_reversed_bound(std::size_t step, double x, double t) const {
    const double tau = std::max(cfg_.t_F - t, 0.0);
    return std::norm(phi_bound(step, x, tau));
}

TimePotential Scenario::propagator_potential(bool frozen, const Grid& g) const {
    if (frozen) {
        std::vector<double> V(g.n);
        for (std::size_t i = 0; i < g.n; ++i) V[i] = V_xt(g.node(i), cfg_.t_F);
        return [V = std::move(V)](double, std::vector<double>& out) { out = V; };
    }
    // Captures `this`; the scenario must outlive the propagation run.
    return [this, g](double t, std::vector<double>& out) {
        for (std::size_t i = 0; i < g.n; ++i) out[i] = V_xt(g.node(i), t);
    };
}

double Scenario::frozen_eigenvalue(std::size_t step) const {
    const double s = 4.0 * cfg_.t_F + cfg_.c1;
    return cfg_.steps.at(step).epsilon / (s * s);
}

}  // namespace fbic
