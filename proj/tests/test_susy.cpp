#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>

#include "fbic/models.hpp"
#include "fbic/susy.hpp"

using namespace fbic;

namespace {

constexpr double kPi = 3.14159265358979323846;

Grid engine_grid() { return Grid::with_spacing(0.0, 40.0, 1e-3); }

RealField zero_potential(const Grid& g) { return RealField(g, std::vector<double>(g.n, 0.0)); }

SeedSpec free_seed(const Grid& g, double k, double omega) {
    SeedSpec s;
    s.epsilon = k * k;
    s.omega = omega;
    s.y0 = 0.0;
    s.u = RealField::sample(g, [&](double y) { return std::sin(k * y); });
    s.du = RealField::sample(g, [&](double y) { return k * std::cos(k * y); });
    return s;
}

}  // namespace

TEST_CASE("first order partner: exponential seed leaves the potential flat") {
    Grid g(0.0, 5.0, 2001);
    auto V0 = zero_potential(g);
    auto u = RealField::sample(g, [](double y) { return std::exp(0.7 * y); });
    RealField V1 = first_order_partner(V0, u);
    CHECK(max_abs(std::span<const double>(V1.values)) < 1e-8);
}

TEST_CASE("first order partner: cosh seed produces the sech-squared well") {
    Grid g(-8.0, 8.0, 8001);
    auto V0 = zero_potential(g);
    auto u = RealField::sample(g, [](double y) { return std::cosh(y); });
    RealField V1 = first_order_partner(V0, u);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        double sech = 1.0 / std::cosh(g.node(i));
        worst = std::max(worst, std::abs(V1.values[i] + 2.0 * sech * sech));
    }
    CHECK(worst < 1e-7);
    CHECK(interpolate(V1, 0.0) == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("first order partner rejects a seed with a node") {
    Grid g(0.0, 2.0 * kPi, 2001);
    auto V0 = zero_potential(g);
    auto u = RealField::sample(g, [](double y) { return std::sin(y); });
    CHECK_THROWS_AS(first_order_partner(V0, u), SingularityError);
}

TEST_CASE("first order missing state") {
    Grid g(-12.0, 12.0, 8001);
    auto u = RealField::sample(g, [](double y) { return std::cosh(y); });
    RealField m = first_order_missing(u, 1.0);
    // sech is square integrable with norm^2 = 2 (2 tanh at the cutoff)
    CHECK(l2_norm_sq(m) == doctest::Approx(2.0).epsilon(1e-9));

    Grid ge(-6.0, 6.0, 4001);
    auto ue = RealField::sample(ge, [](double y) { return std::exp(y); });
    RealField me = first_order_missing(ue, 1.0);  // non-normalizable, returned anyway
    CHECK(me.values[0] == doctest::Approx(std::exp(6.0)).epsilon(1e-12));

    auto u1 = RealField::sample(ge, [](double) { return 1.0; });
    RealField m1 = first_order_missing(u1, 1.0);
    for (std::size_t i = 0; i < ge.n; i += 500) CHECK(m1.values[i] == 1.0);

    auto usin = RealField::sample(Grid(0.0, 2.0 * kPi, 1001), [](double y) { return std::sin(y); });
    CHECK_THROWS_AS(first_order_missing(usin, 1.0), SingularityError);
}

TEST_CASE("first intertwiner maps free states correctly") {
    Grid g(0.0, 12.0, 12001);
    const double k = 0.8, q = 1.9;
    auto u = RealField::sample(g, [&](double y) { return std::exp(k * y); });
    auto psi = ComplexField::sample(g, [&](double y) { return Complex(std::sin(q * y)); });
    // (1/sqrt(q^2 + k^2)) (-q cos(qy) + k sin(qy)), epsilon = -k^2
    ComplexField mapped = apply_first_intertwiner(u, psi, q * q, -k * k);
    double worst = 0.0;
    for (std::size_t i = 5; i + 5 < g.n; ++i) {
        double y = g.node(i);
        double want = (-q * std::cos(q * y) + k * std::sin(q * y)) / std::sqrt(q * q + k * k);
        worst = std::max(worst, std::abs(mapped.values[i] - want));
    }
    CHECK(worst < 1e-9);

    CHECK_THROWS_AS(apply_first_intertwiner(u, psi, -k * k, -k * k), DegenerateEnergyError);

    auto zero = ComplexField::sample(g, [](double) { return Complex(0.0); });
    ComplexField z = apply_first_intertwiner(u, zero, q * q, -k * k);
    CHECK(max_abs(std::span<const Complex>(z.values)) == 0.0);
}

TEST_CASE("seed validation catches wrong seeds and sign-changing weights") {
    Grid g = engine_grid();
    auto V0 = zero_potential(g);
    SeedSpec good = free_seed(g, 1.0, 1.0);
    SeedValidation v = validate_seed(V0, good);
    CHECK(v.residual < v.residual_tol);
    CHECK(v.w_min_abs > 0.0);

    SeedSpec wrong = good;
    wrong.epsilon = 1.3;  // sin(y) does not solve the equation at 1.3
    CHECK_THROWS_AS(validate_seed(V0, wrong), std::invalid_argument);

    // w(0) = -10 < 0 while int_0^40 sin^2 ~ 20, so w crosses zero inside the grid
    SeedSpec negative = free_seed(g, 1.0, -10.0);
    CHECK_THROWS_AS(validate_seed(V0, negative), RegularityError);
}

TEST_CASE("confluent auxiliary matches the reduction-of-order closed form away from nodes") {
    Grid g(0.0, 20.0, 20001);
    SeedSpec seed = free_seed(g, 1.0, 1.0);
    RealField v = confluent_auxiliary(seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        double y = g.node(i);
        double s = std::sin(y);
        if (std::abs(s) < 0.05) continue;  // v blows up at the nodes of u
        double want = (1.0 + y / 2.0 - std::sin(2.0 * y) / 4.0) / s;
        worst = std::max(worst, std::abs(v.values[i] - want));
    }
    CHECK(worst < 1e-9);

    SeedSpec trivial;
    trivial.epsilon = 0.0;
    trivial.omega = 0.0;
    trivial.y0 = 0.0;
    trivial.u = RealField::sample(g, [](double) { return 1.0; });
    // omega = 0 with u = 1: w = y vanishes at the left edge -> regularity error
    CHECK_THROWS_AS(confluent_auxiliary(trivial), RegularityError);
    trivial.omega = 1.0;
    RealField vy = confluent_auxiliary(trivial);
    for (std::size_t i = 0; i < g.n; i += 1000) CHECK(vy.values[i] == doctest::Approx(1.0 + g.node(i)).epsilon(1e-12));
}

TEST_CASE("confluent partner: large omega recovers the base potential") {
    Grid g = engine_grid();
    auto V0 = zero_potential(g);
    SeedSpec seed = free_seed(g, 1.0, 1e6);
    RealField V2 = confluent_partner(V0, seed);
    CHECK(max_abs(std::span<const double>(V2.values)) < 1e-4);  // O(1/omega)
}

TEST_CASE("confluent partner matches the closed form; engine route vs analytic route") {
    Grid g = engine_grid();
    auto V0 = zero_potential(g);
    SeedSpec seed = free_seed(g, 1.0, 1.0);
    RealField V2 = confluent_partner(V0, seed);
    models::FreeParticleBicModel m(1.0, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(V2.values[i] - models::v2_closed(g.node(i), m)));
    CHECK(worst < 1e-6);
    CHECK(std::abs(V2.values[0]) < 1e-6);  // V2(0) = 0

    // tail: V2 -> 0 (same limit as the base potential)
    double tail = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        if (g.node(i) > 36.0) tail = std::max(tail, std::abs(V2.values[i]));
    CHECK(tail < 0.2);

    // analytic ladder recursion agrees with the finite-difference route
    TransformChain chain{V0, {seed}};
    ConfluentLadder ladder(chain);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        diff = std::max(diff, std::abs(ladder.potential(1).values[i] - V2.values[i]));
    CHECK(diff < 1e-6);
}

TEST_CASE("scale invariance: (u, omega) -> (c u, c^2 omega) fixes V2, rescales the missing state") {
    Grid g = Grid::with_spacing(0.0, 40.0, 2e-3);
    auto V0 = zero_potential(g);
    SeedSpec a = free_seed(g, 1.0, 1.0);
    const double c = 3.7;
    SeedSpec b = a;
    for (auto& x : b.u.values) x *= c;
    for (auto& x : b.du->values) x *= c;
    b.omega *= c * c;
    RealField Va = confluent_partner(V0, a);
    RealField Vb = confluent_partner(V0, b);
    double dv = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) dv = std::max(dv, std::abs(Va.values[i] - Vb.values[i]));
    CHECK(dv < 5e-8);  // log-roundoff through the 1/h^2 stencil

    RealField ma = confluent_missing(a, 1.0);
    RealField mb = confluent_missing(b, 1.0);
    double dm = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) dm = std::max(dm, std::abs(ma.values[i] - c * mb.values[i]));
    CHECK(dm < 1e-12);
}

TEST_CASE("confluent missing state matches the closed form and the norm bound") {
    Grid g = engine_grid();
    SeedSpec seed = free_seed(g, 1.0, 1.0);
    RealField m = confluent_missing(seed, 1.0);
    models::FreeParticleBicModel model(1.0, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(m.values[i] - models::bic_closed(g.node(i), model)));
    CHECK(worst < 1e-9);
    CHECK(m.values[0] == 0.0);  // u(0) = 0

    double norm_sq = l2_norm_sq(m);
    CHECK(norm_sq < models::bic_norm_sq_bound(model));
    CHECK(norm_sq > 0.5);

    RealField mn = confluent_missing(seed, 0.0, /*normalize=*/true);
    CHECK(l2_norm_sq(mn) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("composed intertwiner: field route matches closed form and direct composition") {
    Grid g = engine_grid();
    auto V0 = zero_potential(g);
    SeedSpec seed = free_seed(g, 1.0, 1.0);
    const double q = std::sqrt(2.0);
    auto psi = ComplexField::sample(g, [&](double y) { return Complex(std::sin(q * y)); });
    ComplexField mapped = apply_confluent_intertwiner(V0, seed, psi, q * q);

    models::FreeParticleBicModel m(1.0, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(mapped.values[i] - models::scattering_closed(g.node(i), q, m)));
    CHECK(worst < 1e-6);

    // direct composition (-d + v'/v)(-d + u'/u) away from nodes of u and v
    RealField v = confluent_auxiliary(seed);
    ComplexField dpsi = derivative(psi);
    ComplexField first(g, std::vector<Complex>(g.n));
    RealField du = seed.seed_derivative();
    for (std::size_t i = 0; i < g.n; ++i) {
        double ui = seed.u.values[i];
        first.values[i] = std::abs(ui) > 1e-3 ? -dpsi.values[i] + (du.values[i] / ui) * psi.values[i] : Complex(0.0);
    }
    ComplexField dfirst = derivative(first);
    RealField dv = derivative(v);
    double dcomp = 0.0;
    for (std::size_t i = 5; i + 5 < g.n; ++i) {
        double y = g.node(i);
        // stay clear of the masked zones where `first` was zeroed
        bool safe = true;
        for (int j = -4; j <= 4; ++j) safe = safe && std::abs(std::sin(g.node(i + j))) > 1e-2;
        if (!safe || std::abs(v.values[i]) > 1e3) continue;
        Complex direct = (-dfirst.values[i] + (dv.values[i] / v.values[i]) * first.values[i]) / (q * q - 1.0);
        dcomp = std::max(dcomp, std::abs(direct - mapped.values[i]));
        (void)y;
    }
    CHECK(dcomp < 1e-4);  // the direct route divides by u and v; agreement far from nodes only

    CHECK_THROWS_AS(apply_confluent_intertwiner(V0, seed, psi, seed.epsilon), DegenerateEnergyError);

    auto zero = ComplexField::sample(g, [](double) { return Complex(0.0); });
    ComplexField z = apply_confluent_intertwiner(V0, seed, zero, q * q);
    CHECK(max_abs(std::span<const Complex>(z.values)) == 0.0);
}

TEST_CASE("mapped scattering state satisfies the partner eigenvalue equation") {
    Grid g = engine_grid();
    auto V0 = zero_potential(g);
    SeedSpec seed = free_seed(g, 1.0, 1.0);
    TransformChain chain{V0, {seed}};
    ConfluentLadder ladder(chain);
    const double q = std::sqrt(2.0);
    StateWithDerivative st{ComplexField::sample(g, [&](double y) { return Complex(std::sin(q * y)); }),
                           ComplexField::sample(g, [&](double y) { return Complex(q * std::cos(q * y)); })};
    StateWithDerivative mapped = ladder.map_to_top(st, q * q);
    CHECK(eigen_residual(mapped.value, ladder.potential(1), q * q) < 1e-6);
    // carried derivative matches a finite-difference derivative of the value
    ComplexField fd = derivative(mapped.value);
    double dd = 0.0;
    for (std::size_t i = 5; i + 5 < g.n; ++i) dd = std::max(dd, std::abs(fd.values[i] - mapped.deriv.values[i]));
    CHECK(dd < 1e-7);
}

TEST_CASE("missing state annihilation by the inverse first-order operator") {
    // L1 psi_eps = (d/dy + u'/u) (c/u) = 0 identically; check at finite-difference order
    Grid g(0.5, 20.0, 19501);
    auto u = RealField::sample(g, [](double y) { return std::exp(0.6 * y) + std::exp(-0.6 * y); });
    RealField missing = first_order_missing(u, 1.0);
    RealField dmissing = derivative(missing);
    RealField du = derivative(u);
    double worst = 0.0;
    for (std::size_t i = 5; i + 5 < g.n; ++i) {
        double r = dmissing.values[i] + du.values[i] / u.values[i] * missing.values[i];
        worst = std::max(worst, std::abs(r));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("two-step chain: seeds, potentials and states") {
    Grid g = engine_grid();
    TransformChain chain;
    chain.base_potential = zero_potential(g);
    chain.steps.push_back(free_seed(g, 1.0, 1.0));

    // second seed: engine-mapped scattering state at eps2 = 2 with carried derivative
    ConfluentLadder first(chain);
    const double k2 = std::sqrt(2.0);
    StateWithDerivative s0{ComplexField::sample(g, [&](double y) { return Complex(std::sin(k2 * y)); }),
                           ComplexField::sample(g, [&](double y) { return Complex(k2 * std::cos(k2 * y)); })};
    StateWithDerivative u2 = first.map_to_top(s0, 2.0);
    SeedSpec seed2;
    seed2.epsilon = 2.0;
    seed2.omega = 2.0;
    seed2.y0 = 0.0;
    std::vector<double> u2v(g.n), u2d(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        u2v[i] = u2.value.values[i].real();
        u2d[i] = u2.deriv.values[i].real();
    }
    seed2.u = RealField(g, std::move(u2v));
    seed2.du = RealField(g, std::move(u2d));
    chain.steps.push_back(seed2);

    // u2 equals the closed form for the second seed
    double seed_err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        seed_err = std::max(seed_err, std::abs(chain.steps[1].u.values[i] -
                                               models::second_seed_closed(g.node(i), 1.0, k2, 1.0)));
    CHECK(seed_err < 1e-6);

    ConfluentLadder ladder(chain);
    const RealField& V4 = ladder.potential(2);

    StateWithDerivative bic2 = ladder.bound_state(1);
    StateWithDerivative bic1 = ladder.bound_state(0);
    CHECK(eigen_residual(bic2.value, V4, 2.0) < 1e-6);
    CHECK(eigen_residual(bic1.value, V4, 1.0) < 1e-6);

    const double q3 = std::sqrt(3.0);
    StateWithDerivative probe{ComplexField::sample(g, [&](double y) { return Complex(std::sin(q3 * y)); }),
                              ComplexField::sample(g, [&](double y) { return Complex(q3 * std::cos(q3 * y)); })};
    StateWithDerivative scat = ladder.map_to_top(probe, 3.0);
    CHECK(eigen_residual(scat.value, V4, 3.0) < 1e-6);
}

TEST_CASE("intertwining identity held under grid refinement") {
    // For arbitrary smooth psi (not an eigenstate), H2 (L psi) - L (H0 psi)
    // vanishes in the continuum; the finite-difference realization should
    // shrink by at least second order when the grid is refined.
    auto identity_error = [](double h) {
        Grid g = Grid::with_spacing(0.0, 20.0, h);
        RealField V0(g, std::vector<double>(g.n, 0.0));
        SeedSpec seed = free_seed(g, 1.0, 1.0);
        RealField V2 = confluent_partner(V0, seed);
        auto psi = ComplexField::sample(g, [](double y) { return Complex(std::exp(-0.25 * (y - 8.0) * (y - 8.0))); });
        const double E = seed.epsilon + 1.0;  // unit prefactor: the op returns L psi itself
        ComplexField Lpsi = apply_confluent_intertwiner(V0, seed, psi, E);
        ComplexField H0psi = second_derivative(psi);
        for (std::size_t i = 0; i < g.n; ++i) H0psi.values[i] = -H0psi.values[i] + V0.values[i] * psi.values[i];
        ComplexField LH0 = apply_confluent_intertwiner(V0, seed, H0psi, E);
        ComplexField H2L = second_derivative(Lpsi);
        for (std::size_t i = 0; i < g.n; ++i) H2L.values[i] = -H2L.values[i] + V2.values[i] * Lpsi.values[i];
        double worst = 0.0;
        for (std::size_t i = 10; i + 10 < g.n; ++i) worst = std::max(worst, std::abs(H2L.values[i] - LH0.values[i]));
        return worst;
    };
    double coarse = identity_error(4e-2);
    double fine = identity_error(2e-2);
    CHECK(fine < 1e-4);
    CHECK(coarse / fine > 3.0);
}

TEST_CASE("iterate_chain: empty chain is the identity") {
    Grid g(0.0, 10.0, 1001);
    TransformChain chain;
    chain.base_potential = zero_potential(g);
    auto psi = ComplexField::sample(g, [](double y) { return Complex(std::sin(y)); });
    auto [V, mapped] = iterate_chain(chain, psi, 1.0);
    CHECK(max_abs(std::span<const double>(V.values)) == 0.0);
    for (std::size_t i = 0; i < g.n; i += 100) CHECK(mapped.values[i] == psi.values[i]);
}

TEST_CASE("chain operations are safe to run concurrently on shared inputs") {
    Grid g = Grid::with_spacing(0.0, 40.0, 4e-3);
    auto V0 = zero_potential(g);
    SeedSpec seed = free_seed(g, 1.0, 1.0);
    TransformChain chain{V0, {seed}};
    ConfluentLadder ladder(chain);
    std::vector<double> residuals(4, 1.0);
    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            double q = std::sqrt(2.0 + 0.5 * w);
            StateWithDerivative st{ComplexField::sample(g, [&](double y) { return Complex(std::sin(q * y)); }),
                                   ComplexField::sample(g, [&](double y) { return Complex(q * std::cos(q * y)); })};
            StateWithDerivative mapped = ladder.map_to_top(st, q * q);
            residuals[static_cast<std::size_t>(w)] = eigen_residual(mapped.value, ladder.potential(1), q * q);
        });
    }
    for (auto& t : workers) t.join();
    for (double r : residuals) CHECK(r < 1e-5);
}
