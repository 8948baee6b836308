#include "fbic/susy.hpp"

#include <algorithm>
#include <cmath>

namespace fbic {

namespace {

void check_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": fields must share a grid");
}

void check_regular(const RealField& w, double margin_rel) {
    const auto& v = w.values;
    double m = max_abs(v);
    double lo = margin_rel * m;
    bool positive = v[0] > 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if ((v[i] > 0.0) != positive || std::abs(v[i]) < lo)
            throw RegularityError("regularity violated: omega + int u^2 changes sign or vanishes near node " +
                                  std::to_string(i));
    }
}

}  // namespace

RealField regularity_weight(const SeedSpec& seed, double margin_rel) {
    std::vector<double> u2(seed.u.size());
    for (std::size_t i = 0; i < u2.size(); ++i) u2[i] = seed.u.values[i] * seed.u.values[i];
    RealField w = cumulative_integral(RealField(seed.u.grid, std::move(u2)), seed.y0);
    for (auto& x : w.values) x += seed.omega;
    check_regular(w, margin_rel);
    return w;
}

SeedValidation validate_seed(const RealField& V0, const SeedSpec& seed, double residual_tol_rel, double margin_rel) {
    check_same_grid(V0.grid, seed.u.grid, "validate_seed");
    double scale = 0.0;
    for (std::size_t i = 0; i < V0.size(); ++i)
        scale = std::max(scale, std::abs(V0.values[i] * seed.u.values[i]));
    scale += std::abs(seed.epsilon) * max_abs(std::span<const double>(seed.u.values));
    double tol = residual_tol_rel * (scale > 0.0 ? scale : 1.0);
    double res = eigen_residual(seed.u, V0, seed.epsilon);
    if (res > tol)
        throw std::invalid_argument("seed does not satisfy its Schrodinger equation: residual " + std::to_string(res) +
                                    " > tol " + std::to_string(tol));
    RealField w = regularity_weight(seed, margin_rel);
    double wmax = max_abs(std::span<const double>(w.values));
    double wmin = wmax;
    for (double x : w.values) wmin = std::min(wmin, std::abs(x));
    return SeedValidation{res, tol, wmin, wmax};
}

RealField first_order_partner(const RealField& V0, const RealField& u) {
    check_same_grid(V0.grid, u.grid, "first_order_partner");
    RealField shift = [&] {
        try {
            return second_log_derivative(u);
        } catch (const SingularityError& e) {
            throw SingularityError("potential V1 would be irregular: seed has a node", e.node());
        }
    }();
    std::vector<double> v(V0.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = V0.values[i] - 2.0 * shift.values[i];
    return RealField(V0.grid, std::move(v));
}

RealField first_order_missing(const RealField& u, double c) {
    require_sign_definite(u, 1e-10, "first_order_missing");
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c / u.values[i];
    return RealField(u.grid, std::move(v));
}

ComplexField apply_first_intertwiner(const RealField& u, const ComplexField& psi, double E, double epsilon) {
    check_same_grid(u.grid, psi.grid, "apply_first_intertwiner");
    if (E == epsilon) throw DegenerateEnergyError("apply_first_intertwiner: E equals the factorization energy");
    require_sign_definite(u, 1e-10, "apply_first_intertwiner");
    RealField du = derivative(u);
    ComplexField dpsi = derivative(psi);
    // The usual normalization assumes E > eps; for E < eps keep the magnitude.
    const double pref = 1.0 / std::sqrt(std::abs(E - epsilon));
    std::vector<Complex> out(psi.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = pref * (-dpsi.values[i] + (du.values[i] / u.values[i]) * psi.values[i]);
    return ComplexField(psi.grid, std::move(out));
}

RealField confluent_auxiliary(const SeedSpec& seed, double floor_rel) {
    RealField w = regularity_weight(seed);
    const auto& u = seed.u.values;
    const double floor = floor_rel * max_abs(std::span<const double>(u));
    std::vector<double> v(u.size());
    std::vector<bool> valid(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        valid[i] = std::abs(u[i]) > floor;
        v[i] = valid[i] ? w.values[i] / u[i] : 0.0;
    }
    // Quadratic interpolation across masked nodes (v blows up near them; this
    // only keeps the entries finite for inspection).
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (valid[i]) continue;
        long left1 = -1, left2 = -1, right1 = -1;
        for (long j = static_cast<long>(i) - 1; j >= 0; --j)
            if (valid[static_cast<std::size_t>(j)]) {
                if (left1 < 0) left1 = j;
                else { left2 = j; break; }
            }
        for (std::size_t j = i + 1; j < u.size(); ++j)
            if (valid[j]) { right1 = static_cast<long>(j); break; }
        auto lag = [&](long a, long b, long c) {
            double xa = a, xb = b, xc = c, x = static_cast<double>(i);
            return v[a] * (x - xb) * (x - xc) / ((xa - xb) * (xa - xc)) +
                   v[b] * (x - xa) * (x - xc) / ((xb - xa) * (xb - xc)) +
                   v[c] * (x - xa) * (x - xb) / ((xc - xa) * (xc - xb));
        };
        if (left1 >= 0 && right1 >= 0 && left2 >= 0) v[i] = lag(left2, left1, right1);
        else if (left1 >= 0 && right1 >= 0) v[i] = (v[left1] + v[right1]) / 2.0;
        else if (right1 >= 0) v[i] = v[right1];
        else if (left1 >= 0) v[i] = v[left1];
    }
    return RealField(seed.u.grid, std::move(v));
}

RealField confluent_partner(const RealField& V0, const SeedSpec& seed) {
    check_same_grid(V0.grid, seed.u.grid, "confluent_partner");
    RealField w = regularity_weight(seed);
    RealField shift = second_log_derivative(w);
    std::vector<double> v(V0.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = V0.values[i] - 2.0 * shift.values[i];
    return RealField(V0.grid, std::move(v));
}

RealField confluent_missing(const SeedSpec& seed, double C, bool normalize) {
    RealField w = regularity_weight(seed);
    std::vector<double> v(w.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = seed.u.values[i] / w.values[i];
    RealField state(seed.u.grid, std::move(v));
    if (normalize) {
        double n2 = l2_norm_sq(state);
        if (!(n2 > 0.0) || !std::isfinite(n2))
            throw std::domain_error("confluent_missing: state cannot be normalized");
        C = 1.0 / std::sqrt(n2);
    }
    for (auto& x : state.values) x *= C;
    return state;
}

ComplexField apply_confluent_intertwiner(const RealField& V0, const SeedSpec& seed, const ComplexField& psi, double E) {
    check_same_grid(V0.grid, psi.grid, "apply_confluent_intertwiner");
    check_same_grid(seed.u.grid, psi.grid, "apply_confluent_intertwiner");
    if (E == seed.epsilon)
        throw DegenerateEnergyError("apply_confluent_intertwiner: E equals the factorization energy");
    RealField w = regularity_weight(seed);
    RealField du = seed.seed_derivative();
    ComplexField dpsi = derivative(psi);
    ComplexField ddpsi = second_derivative(psi);
    const auto& u = seed.u.values;
    std::vector<Complex> out(psi.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double wi = w.values[i];
        const double wp_over_w = u[i] * u[i] / wi;  // w' = u^2
        const double coeff = u[i] * du.values[i] / wi - V0.values[i] + seed.epsilon;
        out[i] = (ddpsi.values[i] - wp_over_w * dpsi.values[i] + coeff * psi.values[i]) / (E - seed.epsilon);
    }
    return ComplexField(psi.grid, std::move(out));
}

// ---- ConfluentLadder ----

ConfluentLadder::ConfluentLadder(const TransformChain& chain, double residual_tol_rel) {
    potentials_.push_back(chain.base_potential);
    for (const auto& seed : chain.steps) {
        const RealField& V0 = potentials_.back();
        validate_seed(V0, seed, residual_tol_rel);
        StepData sd{seed.epsilon, seed.u, seed.seed_derivative(), regularity_weight(seed)};
        // Analytic partner recursion: with w' = u^2 exactly,
        //   V_next = V0 - 2 (w'' w - w'^2)/w^2 = V0 - 4 u u'/w + 2 u^4/w^2.
        std::vector<double> vn(V0.size());
        for (std::size_t i = 0; i < vn.size(); ++i) {
            double u = sd.u.values[i], up = sd.du.values[i], w = sd.w.values[i];
            vn[i] = V0.values[i] - 4.0 * u * up / w + 2.0 * u * u * u * u / (w * w);
        }
        potentials_.emplace_back(V0.grid, std::move(vn));
        steps_.push_back(std::move(sd));
    }
}

StateWithDerivative ConfluentLadder::missing_state(std::size_t step, double C) const {
    const StepData& s = steps_.at(step);
    std::vector<Complex> val(s.u.size()), der(s.u.size());
    for (std::size_t i = 0; i < val.size(); ++i) {
        double u = s.u.values[i], up = s.du.values[i], w = s.w.values[i];
        val[i] = C * u / w;
        der[i] = C * (up / w - u * u * u / (w * w));
    }
    const Grid& g = s.u.grid;
    return {ComplexField(g, std::move(val)), ComplexField(g, std::move(der))};
}

StateWithDerivative ConfluentLadder::map_through(std::size_t step, const StateWithDerivative& state, double E) const {
    const StepData& s = steps_.at(step);
    if (E == s.epsilon) throw DegenerateEnergyError("map_through: E equals the factorization energy of step " +
                                                    std::to_string(step));
    const RealField& V0 = potentials_.at(step);
    const std::size_t n = s.u.size();
    std::vector<Complex> val(n), der(n);
    const double dE = E - s.epsilon;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = s.u.values[i], up = s.du.values[i], w = s.w.values[i], v0 = V0.values[i];
        // L psi with psi'' eliminated through the input eigenvalue equation:
        //   L psi = (u u'/w - (E - eps)) psi - (u^2/w) psi'.
        const double alpha = u * up / w - dE;
        const double beta = -u * u / w;
        // d/dy of the coefficients, using u'' = (V0 - eps) u and w' = u^2.
        const double alphap = (up * up + (v0 - s.epsilon) * u * u) / w - u * u * u * up / (w * w);
        const double betap = -2.0 * u * up / w + u * u * u * u / (w * w);
        const Complex p = state.value.values[i];
        const Complex dp = state.deriv.values[i];
        val[i] = (alpha * p + beta * dp) / dE;
        der[i] = ((alphap + beta * (v0 - E)) * p + (alpha + betap) * dp) / dE;
    }
    const Grid& g = s.u.grid;
    return {ComplexField(g, std::move(val)), ComplexField(g, std::move(der))};
}

StateWithDerivative ConfluentLadder::map_to_top(const StateWithDerivative& state0, double E) const {
    StateWithDerivative st = state0;
    for (std::size_t k = 0; k < steps_.size(); ++k) st = map_through(k, st, E);
    return st;
}

StateWithDerivative ConfluentLadder::bound_state(std::size_t step, double C) const {
    StateWithDerivative st = missing_state(step, C);
    const double E = steps_.at(step).epsilon;
    for (std::size_t k = step + 1; k < steps_.size(); ++k) st = map_through(k, st, E);
    return st;
}

std::pair<RealField, ComplexField> iterate_chain(const TransformChain& chain, const ComplexField& psi0, double E) {
    return iterate_chain(chain, psi0, derivative(psi0), E);
}

std::pair<RealField, ComplexField> iterate_chain(const TransformChain& chain, const ComplexField& psi0,
                                                 const ComplexField& dpsi0, double E) {
    if (chain.steps.empty()) return {chain.base_potential, psi0};
    ConfluentLadder ladder(chain);
    StateWithDerivative st = ladder.map_to_top({psi0, dpsi0}, E);
    return {ladder.potential(ladder.depth()), std::move(st.value)};
}

}  // namespace fbic
