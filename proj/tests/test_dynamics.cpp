#include "ns2d/dynamics.hpp"
#include "ns2d/spectral_ops.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ns2d;

namespace {

std::shared_ptr<const NoiseSpec> spec_with(std::size_t J, std::size_t N_active, double b0 = 1.0,
                                           std::vector<double> h = {}) {
    NoiseConfig c;
    c.J = J;
    c.N_active = N_active;
    c.b0 = b0;
    c.h_coeffs = std::move(h);
    return std::make_shared<const NoiseSpec>(build_spec(c, Grid(M_PI, 32)));
}

IntegratorConfig integ(Scheme s = Scheme::exponential_euler) {
    IntegratorConfig c;
    c.dt = 0.01;
    c.scheme = s;
    return c;
}

double diff(const SpectralField& a, const SpectralField& b) { return l2_norm(a - b); }

}  // namespace

TEST_CASE("configuration checks and scheme names") {
    IntegratorConfig c;
    CHECK_NOTHROW(c.validate());
    c.T_horizon = 2.5;
    CHECK(c.steps() == 250);
    for (auto mutate : {+[](IntegratorConfig& x) { x.dt = 0; }, +[](IntegratorConfig& x) { x.a = 0; },
                        +[](IntegratorConfig& x) { x.nu = -1; }, +[](IntegratorConfig& x) { x.record_stride = 0; }}) {
        IntegratorConfig y;
        mutate(y);
        CHECK_THROWS_AS(y.validate(), std::invalid_argument);
    }
    for (Scheme s : {Scheme::exponential_euler, Scheme::semi_implicit_euler}) CHECK(parse_scheme(to_string(s)) == s);
    CHECK_THROWS(parse_scheme("rk4"));
}

TEST_CASE("zero state with zero forcing stays at zero") {
    const Dynamics dyn(spec_with(8, 4), integ());
    const SpectralField z(dyn.grid());
    const SpectralField u = dyn.step_primal(z, zero_increment(dyn.spec(), 0.01));
    CHECK(l2_norm(u) == 0.0);
}

TEST_CASE("single Fourier mode decays at the scheme rate") {
    for (Scheme s : {Scheme::exponential_euler, Scheme::semi_implicit_euler}) {
        const Dynamics dyn(spec_with(8, 4), integ(s));
        const double lam = 1.0 + 0.1 * dyn.basis().element(0).kk;
        const double r = s == Scheme::exponential_euler ? std::exp(-lam * 0.01) : 1.0 / (1.0 + lam * 0.01);
        CHECK(dyn.linear_factor(dyn.grid().index(0, 1)) == doctest::Approx(r).epsilon(1e-15));
        SpectralField u = dyn.basis().field(0);
        for (int n = 0; n < 100; ++n) u = dyn.step_primal(u, zero_increment(dyn.spec(), 0.01), n);
        CHECK(l2_norm(u) == doctest::Approx(std::pow(r, 100)).epsilon(1e-12));
    }
}

TEST_CASE("noise along one mode gives the exact discrete Ornstein-Uhlenbeck path") {
    const Dynamics dyn(spec_with(1, 1, 0.8), integ());
    const double R = dyn.linear_factor(dyn.grid().index(0, 1));
    const CounterRng rng(11);
    SpectralField u(dyn.grid());
    double c = 0;
    for (std::uint64_t n = 0; n < 200; ++n) {
        const auto w = sample_increment(dyn.spec(), 0.01, rng, {0, 0, 0}, n);
        u = dyn.step_primal(u, w, n);
        c = R * (c + 0.8 * w.value(0));
    }
    CHECK(dyn.basis().coords(u, 1)[0] == doctest::Approx(c).epsilon(1e-12));
    CHECK(l2_norm(dyn.basis().high_mode_project(u, 1)) < 1e-14);
}

TEST_CASE("stationary variance of the one-mode process") {
    const Dynamics dyn(spec_with(1, 1, 1.0), integ());
    const double R = dyn.linear_factor(dyn.grid().index(0, 1)), dt = 0.01;
    const CounterRng rng(12);
    const int paths = 2000, steps = 100;
    double m2 = 0;
    for (int p = 0; p < paths; ++p) {
        SpectralField u(dyn.grid());
        for (int n = 0; n < steps; ++n)
            u = dyn.step_primal(u, sample_increment(dyn.spec(), dt, rng, {static_cast<std::uint32_t>(p), 0, 0}, n), n);
        m2 += l2_norm_sq(u);
    }
    // sum_{m=1}^{n} R^{2m} dt
    const double expect = dt * R * R * (1 - std::pow(R, 2 * steps)) / (1 - R * R);
    CHECK(m2 / paths == doctest::Approx(expect).epsilon(5.0 * std::sqrt(2.0 / paths)));
}

TEST_CASE("steady forcing in a single mode drives to h / lambda") {
    const Dynamics dyn(spec_with(4, 2, 1.0, {0.5}), integ());
    const double lam = 1.0 + 0.1 * dyn.basis().element(0).kk;
    SpectralField u(dyn.grid());
    for (int n = 0; n < 3000; ++n) u = dyn.step_primal(u, zero_increment(dyn.spec(), 0.01), n);
    const double R = std::exp(-lam * 0.01);
    // fixed point of c = R (c + dt h)
    CHECK(dyn.basis().coords(u, 1)[0] == doctest::Approx(R * 0.01 * 0.5 / (1 - R)).epsilon(1e-10));
}

TEST_CASE("blow-up is reported with the step") {
    const Dynamics dyn(spec_with(4, 2), integ());
    SpectralField u = dyn.basis().field(3);
    u.c1[dyn.grid().index(1, 1)] = std::numeric_limits<double>::quiet_NaN();
    try {
        (void)dyn.step_primal(u, zero_increment(dyn.spec(), 0.01), 42);
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK(e.step == 42);
    }
}

TEST_CASE("auxiliary and controlled steppers reduce to the primal one without modes") {
    const Dynamics dyn(spec_with(16, 4, 1.0, {0.3}), integ());
    const CounterRng rng(13);
    const SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 7, 0}, 0, 2.0);
    const SpectralField v = random_divfree_field(dyn.grid(), rng, {1, 7, 0}, 0, 2.0);
    const auto w = sample_increment(dyn.spec(), 0.01, rng, {0, 0, 0}, 0);
    const SpectralField p = dyn.step_primal(v, w);
    CHECK(diff(dyn.step_auxiliary_v(v, u, w, 0), p) < 1e-15 * l2_norm(p) + 1e-300);
    CHECK(diff(dyn.step_controlled(v, w, 0), p) < 1e-14 * l2_norm(p));
    CHECK(l2_norm(dyn.control_drift(u, u, 8)) == 0.0);
    CHECK(diff(dyn.step_auxiliary_v(u, u, w, 8), dyn.step_primal(u, w)) < 1e-14 * l2_norm(u));
}

TEST_CASE("controlled step with the matching shift replays the auxiliary step") {
    const Dynamics dyn(spec_with(16, 8), integ());
    const CounterRng rng(14);
    const std::size_t N = 8;
    SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 7, 0}, 0, 2.0);
    SpectralField v = u;
    v.axpy(0.1, dyn.basis().field(2));
    const auto w = sample_increment(dyn.spec(), 0.01, rng, {0, 0, 0}, 0);
    const SpectralField vn = dyn.step_auxiliary_v(v, u, w, N);
    const auto x = girsanov_shift(w, dyn.spec(), dyn.control_drift(u, v, N), N, 0.01);
    const auto xs = girsanov_shift(x, dyn.spec(), dyn.controlled_shift(v, N), N, 0.01);
    CHECK(diff(dyn.step_controlled(v, xs, N), vn) < 1e-12 * l2_norm(vn));
}

TEST_CASE("linear truncation and difference stepper on low modes") {
    const Dynamics dyn(spec_with(16, 8), integ());
    SpectralField z = dyn.basis().field(5);
    const double lam = 1.0 + 0.1 * dyn.basis().element(5).kk;
    for (int n = 0; n < 50; ++n) z = dyn.step_linear_truncation(z);
    CHECK(l2_norm(z) == doctest::Approx(std::exp(-50 * 0.01 * lam)).epsilon(1e-12));

    const CounterRng rng(15);
    const SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 7, 0}, 0, 2.0);
    SpectralField g = dyn.basis().field(1);
    g.axpy(0.5, dyn.basis().field(6));
    const SpectralField g1 = dyn.step_difference_g(g, u, u, 8);
    SpectralField ge(dyn.grid());
    ge.axpy(std::exp(-0.01), g);
    CHECK(diff(g1, ge) < 1e-14);
}

TEST_CASE("vorticity stepper agrees with the curl of the velocity step") {
    const Dynamics dyn(spec_with(16, 4, 1.0, {0.2, 0.1}), integ());
    const CounterRng rng(16);
    const SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 7, 0}, 0, 2.0);
    const auto w = sample_increment(dyn.spec(), 0.01, rng, {0, 0, 0}, 0);
    const ScalarField a = dyn.step_vorticity(curl(u), u, w);
    const ScalarField b = curl(dyn.step_primal(u, w));
    double m = 0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
    CHECK(m < 1e-13);
}

TEST_CASE("trajectory rows and weighted norms") {
    const Dynamics dyn(spec_with(4, 2), integ());
    const SpectralField e = dyn.basis().field(0);
    const TrajectoryRow r = trajectory_row(0.5, e);
    CHECK(r.t == 0.5);
    CHECK(r.L2 == doctest::Approx(1.0));
    const WeightedNorms z = weighted_norms(SpectralField(dyn.grid()), 1.0);
    CHECK(z.psi_u == 0.0);
    CHECK(z.psi_grad_w == 0.0);
    const WeightedNorms n = weighted_norms(e, 1.0);
    CHECK(n.psi_u > 0.0);
    CHECK(n.psi_u < 1.0);
}
