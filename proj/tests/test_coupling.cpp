#include "ns2d/coupling.hpp"
#include "ns2d/spectral_ops.hpp"
#include "ns2d/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace ns2d;

namespace {

std::shared_ptr<const NoiseSpec> spec_with(std::size_t J, std::size_t N_active, double b0) {
    NoiseConfig c;
    c.J = J;
    c.N_active = N_active;
    c.b0 = b0;
    return std::make_shared<const NoiseSpec>(build_spec(c, Grid(M_PI, 16)));
}

}  // namespace

TEST_CASE("Gaussian total variation") {
    CHECK(gaussian_tv({{0.0}, {1.0}}, {{1.0}, {1.0}}) == doctest::Approx(2 * normal_cdf(0.5) - 1));
    CHECK(gaussian_tv({{0, 0}, {2, 2}}, {{0, 0}, {2, 2}}) == 0.0);
    // Mahalanobis distance 5 with sd 0.5 per coordinate: offsets (1.5, 2) / 0.5 = (3, 4)
    CHECK(gaussian_tv({{0, 0}, {0.5, 0.5}}, {{1.5, 2.0}, {0.5, 0.5}}) == doctest::Approx(2 * normal_cdf(2.5) - 1));
    CHECK_THROWS(gaussian_tv({{0.0}, {1.0}}, {{0.0}, {2.0}}));
    CHECK_THROWS(gaussian_tv({{0.0}, {1.0}}, {{0.0, 1.0}, {1.0, 1.0}}));
}

TEST_CASE("maximal coupling: disagreement rate and second marginal") {
    const CounterRng rng(21);
    const DiagGaussian a{{0.0}, {1.0}}, b{{1.0}, {1.0}};
    const int n = 20000;
    int dis = 0;
    double ym = 0, yv = 0;
    for (int i = 0; i < n; ++i) {
        const auto d = maximal_couple_step(a, b, rng, {static_cast<std::uint32_t>(i), 3, 4}, 0);
        dis += !d.agreed;
        if (d.agreed) CHECK(d.attempts == 0);
        ym += d.y[0];
        yv += (d.y[0] - 1.0) * (d.y[0] - 1.0);
    }
    const double p = 2 * normal_cdf(0.5) - 1;
    CHECK(std::abs(dis / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
    CHECK(std::abs(ym / n - 1.0) < 4 / std::sqrt(n));
    CHECK(yv / n == doctest::Approx(1.0).epsilon(4 * std::sqrt(2.0 / n)));
}

TEST_CASE("maximal coupling with equal means always agrees") {
    const CounterRng rng(22);
    const DiagGaussian a{{0.3, -1.0}, {0.1, 0.1}};
    for (std::uint32_t i = 0; i < 500; ++i) {
        const auto d = maximal_couple_step(a, a, rng, {i, 3, 4}, 7);
        CHECK(d.agreed);
        CHECK(d.x == d.y);
    }
}

TEST_CASE("maximal coupling is reproducible") {
    const CounterRng rng(23);
    const DiagGaussian a{{0.0, 0.0}, {1.0, 1.0}}, b{{2.0, 0.0}, {1.0, 1.0}};
    for (std::uint32_t i = 0; i < 50; ++i) {
        const auto d1 = maximal_couple_step(a, b, rng, {i, 3, 4}, 1);
        const auto d2 = maximal_couple_step(a, b, rng, {i, 3, 4}, 1);
        CHECK(d1.y == d2.y);
        CHECK(d1.agreed == d2.agreed);
    }
}

TEST_CASE("Novikov total-variation bound") {
    CHECK(tv_bound_from_novikov(0.0, 1.0) == 0.0);
    CHECK(tv_bound_from_novikov(1e-12, 1.0) == doctest::Approx(0.5 * std::sqrt(3e-12)).epsilon(1e-6));
    CHECK(tv_bound_from_novikov(100.0, 1.0) == 1.0);
    double prev = 0.0;
    for (double J = 1e-6; J < 10; J *= 2) {
        const double v = tv_bound_from_novikov(J, 0.5);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(tv_bound_from_novikov(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(tv_bound_from_novikov(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("control drift on a single mode") {
    IntegratorConfig ic;
    const Dynamics dyn(spec_with(8, 4, 1.0), ic);
    SpectralField u(dyn.grid());
    dyn.basis().add_element(u, 0, 0.7);
    const SpectralField z(dyn.grid());
    // single Fourier pair: no advection, drift is nu Lap u restricted to the low modes
    const SpectralField d = girsanov_drift(dyn, u, z, 4, false);
    const auto c = dyn.basis().coords(d, 8);
    CHECK(c[0] == doctest::Approx(-0.1 * dyn.basis().element(0).kk * 0.7).epsilon(1e-14));
    for (std::size_t j = 1; j < 8; ++j) CHECK(std::abs(c[j]) < 1e-15);
    CHECK(l2_norm(girsanov_drift(dyn, u, z, 4, true)) == 0.0);
    CHECK(l2_norm(girsanov_drift(dyn, u, u, 4, false)) == 0.0);
}

TEST_CASE("coupling configuration validation") {
    IntegratorConfig ic;
    ic.dt = 0.01;
    const Dynamics dyn(spec_with(8, 4, 1.0), ic);
    CouplingConfig c;
    c.N = 5;
    CHECK_THROWS(c.validate(dyn));
    c.N = 4;
    c.T_block = 0.015;
    CHECK_THROWS(c.validate(dyn));
    c.T_block = 0.5;
    CHECK_NOTHROW(c.validate(dyn));
}

TEST_CASE("identical initial data never decouple") {
    IntegratorConfig ic;
    ic.dt = 0.01;
    const Dynamics dyn(spec_with(16, 8, 1.0), ic);
    CouplingConfig cfg;
    cfg.rule = StoppingRule{};
    const CounterRng rng(24);
    const SpectralField u0 = random_divfree_field(dyn.grid(), rng, {0, 7, 0}, 0, 2.0);
    CouplingState st = make_coupling_state(dyn, cfg, u0, u0, 0);
    for (int k = 0; k < 2; ++k) {
        const auto out = run_coupling_block(st, dyn, cfg, rng);
        CHECK(out.coupled);
        CHECK(out.sep_norm == 0.0);
        CHECK(out.novikov == 0.0);
        CHECK(out.tv_estimate == 0.0);
    }
    CHECK_FALSE(st.sigma1.has_value());
    CHECK(st.step == 200);
}

TEST_CASE("deterministic Novikov integral matches the closed form") {
    // negligible noise, u = 0, u' = d e_0: the low mode of v decays at rate a
    IntegratorConfig ic;
    ic.dt = 0.01;
    const Dynamics dyn(spec_with(4, 1, 1e-12), ic);
    CouplingConfig cfg;
    cfg.N = 1;
    const double d = 0.2, a = 1.0, nu = 0.1;
    const double kk = dyn.basis().element(0).kk;
    const SpectralField u0(dyn.grid());
    SpectralField u1(dyn.grid());
    dyn.basis().add_element(u1, 0, d);
    CouplingState st = make_coupling_state(dyn, cfg, u0, u1, 0);
    const auto out = run_coupling_block(st, dyn, cfg, CounterRng(25));
    const double f = std::exp(-(a + nu * kk) * 0.01) * (1 + nu * kk * 0.01);
    double J = 0;
    for (int n = 0; n < 100; ++n) J += 0.01 * nu * nu * kk * kk * d * d * std::pow(f, 2 * n);
    CHECK(out.novikov == doctest::Approx(J).epsilon(1e-6));
}

TEST_CASE("squeezing classification") {
    CHECK(classify_squeezing(std::nullopt, std::numeric_limits<double>::infinity(), 1.0).kind ==
          SqueezingEvent::Kind::none);
    const auto a = classify_squeezing(2.5, 2.5, 1.0);
    CHECK(a.kind == SqueezingEvent::Kind::q_double_prime);
    CHECK(a.k == 2);
    const auto b = classify_squeezing(3.5, 1.2, 0.5);
    CHECK(b.kind == SqueezingEvent::Kind::q_prime);
    CHECK(b.k == 2);
    CHECK(b.sigma == 1.2);
}
