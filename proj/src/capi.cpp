#include "fbic/fbic.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>

#include "fbic/models.hpp"
#include "fbic/numerics.hpp"
#include "fbic/verify.hpp"

namespace {

thread_local std::string g_last_error;

fbic_status fail(fbic_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

fbic_status guard(const std::function<fbic_status()>& body) {
    try {
        return body();
    } catch (const fbic::ConfigError& e) {
        return fail(FBIC_INVALID_CONFIG, e.what());
    } catch (const fbic::DegenerateEnergyError& e) {
        return fail(FBIC_INVALID_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(FBIC_BAD_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(FBIC_NUMERIC_ERROR, e.what());
    }
}

}  // namespace

struct fbic_scenario {
    fbic::ScenarioConfig config;
    std::unique_ptr<fbic::Scenario> scenario;
    fbic::Grid export_grid{0.0, 1.0, 3};

    // Scattering states are expensive to build; cache them per energy.
    mutable std::mutex cache_mutex;
    mutable std::map<double, fbic::StateWithDerivative> scattering_cache;

    const fbic::StateWithDerivative& scattering(double E) const {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = scattering_cache.find(E);
        if (it == scattering_cache.end()) it = scattering_cache.emplace(E, scenario->scattering_state(E)).first;
        return it->second;
    }
};

extern "C" {

const char* fbic_last_error(void) { return g_last_error.c_str(); }

fbic_status fbic_scenario_parse(const char* json_text, fbic_scenario** out) {
    if (!json_text || !out) return fail(FBIC_BAD_ARGUMENT, "null argument");
    *out = nullptr;
    return guard([&] {
        auto handle = std::make_unique<fbic_scenario>();
        handle->config = fbic::ScenarioConfig::from_json(json_text);
        handle->scenario = std::make_unique<fbic::Scenario>(handle->config);
        handle->export_grid = handle->scenario->propagation_grid();
        *out = handle.release();
        return FBIC_OK;
    });
}

void fbic_scenario_free(fbic_scenario* sc) { delete sc; }

fbic_status fbic_scenario_canonical_json(const fbic_scenario* sc, char** out) {
    if (!sc || !out) return fail(FBIC_BAD_ARGUMENT, "null argument");
    return guard([&] {
        std::string text = sc->config.to_canonical_json();
        *out = static_cast<char*>(std::malloc(text.size() + 1));
        if (!*out) return fail(FBIC_NUMERIC_ERROR, "allocation failure");
        std::memcpy(*out, text.c_str(), text.size() + 1);
        return FBIC_OK;
    });
}

fbic_status fbic_scenario_config_hash(const fbic_scenario* sc, char* out65) {
    if (!sc || !out65) return fail(FBIC_BAD_ARGUMENT, "null argument");
    return guard([&] {
        std::string h = sc->config.hash();
        std::memcpy(out65, h.c_str(), h.size() + 1);
        return FBIC_OK;
    });
}

void fbic_string_free(char* s) { std::free(s); }

size_t fbic_num_steps(const fbic_scenario* sc) { return sc ? sc->config.steps.size() : 0; }

fbic_status fbic_grid_size(const fbic_scenario* sc, size_t* n) {
    if (!sc || !n) return fail(FBIC_BAD_ARGUMENT, "null argument");
    *n = sc->export_grid.n;
    return FBIC_OK;
}

fbic_status fbic_grid_nodes(const fbic_scenario* sc, double* xs, size_t n) {
    if (!sc || !xs) return fail(FBIC_BAD_ARGUMENT, "null argument");
    if (n != sc->export_grid.n) return fail(FBIC_BAD_ARGUMENT, "grid size mismatch");
    for (size_t i = 0; i < n; ++i) xs[i] = sc->export_grid.node(i);
    return FBIC_OK;
}

namespace {

// Reversed scenarios display time running from the flat freeze slice back to
// the stationary potential; densities are conjugation-invariant.
double display_time(const fbic_scenario* sc, double t) {
    if (!sc->config.time_reversed) return t;
    return std::max(sc->config.t_F - t, 0.0);
}

}  // namespace

fbic_status fbic_potential_slice(const fbic_scenario* sc, double t, double* out, size_t n) {
    if (!sc || !out) return fail(FBIC_BAD_ARGUMENT, "null argument");
    if (n != sc->export_grid.n) return fail(FBIC_BAD_ARGUMENT, "grid size mismatch");
    return guard([&] {
        if (t < 0.0) return fail(FBIC_BAD_ARGUMENT, "time must be nonnegative");
        for (size_t i = 0; i < n; ++i) {
            double x = sc->export_grid.node(i);
            out[i] = sc->config.time_reversed ? sc->scenario->V_xt(x, display_time(sc, t))
                                              : sc->scenario->V_frozen(x, t);
        }
        return FBIC_OK;
    });
}

fbic_status fbic_bound_density_slice(const fbic_scenario* sc, size_t step, double t, double* out, size_t n) {
    if (!sc || !out) return fail(FBIC_BAD_ARGUMENT, "null argument");
    if (n != sc->export_grid.n) return fail(FBIC_BAD_ARGUMENT, "grid size mismatch");
    if (step >= sc->config.steps.size()) return fail(FBIC_BAD_ARGUMENT, "step index out of range");
    return guard([&] {
        if (t < 0.0) return fail(FBIC_BAD_ARGUMENT, "time must be nonnegative");
        for (size_t i = 0; i < n; ++i) {
            double x = sc->export_grid.node(i);
            out[i] = sc->config.time_reversed
                         ? std::norm(sc->scenario->phi_bound(step, x, display_time(sc, t)))
                         : std::norm(sc->scenario->phi_frozen_bound(step, x, t));
        }
        return FBIC_OK;
    });
}

fbic_status fbic_scattering_density_slice(const fbic_scenario* sc, double e, double t, double* out, size_t n) {
    if (!sc || !out) return fail(FBIC_BAD_ARGUMENT, "null argument");
    if (n != sc->export_grid.n) return fail(FBIC_BAD_ARGUMENT, "grid size mismatch");
    return guard([&] {
        if (t < 0.0) return fail(FBIC_BAD_ARGUMENT, "time must be nonnegative");
        const auto& st = sc->scattering(e);
        const double E = e;
        for (size_t i = 0; i < n; ++i) {
            double x = sc->export_grid.node(i);
            out[i] = sc->config.time_reversed
                         ? std::norm(sc->scenario->phi_of_state(st.value, E, x, display_time(sc, t)))
                         : std::norm(sc->scenario->phi_frozen_of_state(st.value, E, x, t));
        }
        return FBIC_OK;
    });
}

fbic_status fbic_evolve_run(const fbic_scenario* sc, fbic_run_kind kind, double energy, const double* times,
                            size_t n_times, double* densities, size_t n, fbic_run_report* report) {
    if (!sc || !report) return fail(FBIC_BAD_ARGUMENT, "null argument");
    if (n_times > 0 && (!times || !densities)) return fail(FBIC_BAD_ARGUMENT, "snapshot buffers missing");
    if (n_times > 0 && n != sc->export_grid.n) return fail(FBIC_BAD_ARGUMENT, "grid size mismatch");
    return guard([&] {
        const auto& cfg = sc->config;
        const double horizon = cfg.t_end - cfg.t_F;
        std::vector<double> offsets(times, times + n_times);
        fbic::FreezeRunResult res;
        if (kind == FBIC_RUN_PREFREEZE_AGREEMENT) {
            auto pre = fbic::prefreeze_agreement_run(*sc->scenario, sc->scenario->bound_state(0).value,
                                                     cfg.steps[0].epsilon, 8.0);
            report->drift_or_error = pre.windowed_state_error;
            report->max_leak = pre.max_leak;
            report->norm_drift_rel = 0.0;
            return FBIC_OK;
        }
        switch (kind) {
            case FBIC_RUN_FROZEN_GAUGE_REMOVED:
                res = fbic::freeze_drift_run(*sc->scenario, sc->scenario->bound_state(0).value, cfg.steps[0].epsilon,
                                             true, horizon, cfg.leak_threshold, offsets);
                break;
            case FBIC_RUN_FROZEN_RAW:
                res = fbic::freeze_drift_run(*sc->scenario, sc->scenario->bound_state(0).value, cfg.steps[0].epsilon,
                                             false, horizon, 1.0, offsets);
                break;
            case FBIC_RUN_FROZEN_SCATTERING: {
                const auto& st = sc->scattering(energy);
                res = fbic::freeze_drift_run(*sc->scenario, st.value, energy, false, horizon, 10.0, offsets);
                break;
            }
            default:
                return fail(FBIC_BAD_ARGUMENT, "unknown run kind");
        }
        report->drift_or_error = res.drift;
        report->max_leak = res.max_leak;
        report->norm_drift_rel = res.norm_drift_rel;
        for (size_t s = 0; s < res.snapshot_densities.size() && s < n_times; ++s)
            std::memcpy(densities + s * n, res.snapshot_densities[s].data(), n * sizeof(double));
        return FBIC_OK;
    });
}

fbic_status fbic_verify(const fbic_scenario* sc, int include_propagation, fbic_check* checks, size_t cap,
                        size_t* n_out) {
    if (!sc || !n_out) return fail(FBIC_BAD_ARGUMENT, "null argument");
    return guard([&] {
        fbic::VerificationReport rep = fbic::run_verification(sc->config, include_propagation != 0);
        *n_out = rep.checks.size();
        if (checks) {
            for (size_t i = 0; i < rep.checks.size() && i < cap; ++i) {
                const auto& c = rep.checks[i];
                std::snprintf(checks[i].name, sizeof(checks[i].name), "%s", c.name.c_str());
                checks[i].measured = c.measured;
                checks[i].threshold = c.threshold;
                checks[i].less_than = c.less_than ? 1 : 0;
                checks[i].pass = c.pass ? 1 : 0;
            }
        }
        return rep.all_pass() ? FBIC_OK : fail(FBIC_VERIFY_FAILED, "one or more verification checks failed");
    });
}

fbic_status fbic_verify_json(const fbic_scenario* sc, int include_propagation, char** out_json) {
    if (!sc || !out_json) return fail(FBIC_BAD_ARGUMENT, "null argument");
    return guard([&] {
        fbic::VerificationReport rep = fbic::run_verification(sc->config, include_propagation != 0);
        std::string text = rep.to_json(sc->config);
        *out_json = static_cast<char*>(std::malloc(text.size() + 1));
        if (!*out_json) return fail(FBIC_NUMERIC_ERROR, "allocation failure");
        std::memcpy(*out_json, text.c_str(), text.size() + 1);
        return rep.all_pass() ? FBIC_OK : fail(FBIC_VERIFY_FAILED, "one or more verification checks failed");
    });
}

}  // extern "C"
