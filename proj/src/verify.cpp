#include "ns2d/verify.hpp"

#include "ns2d/coupling.hpp"
#include "ns2d/ledger.hpp"
#include "ns2d/spectral_ops.hpp"
#include "ns2d/stats.hpp"
#include "ns2d/studies.hpp"
#include "ns2d/weights.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace ns2d {

bool VerifyReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string VerifyReport::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name},
                               {"passed", c.passed},
                               {"measured", c.measured},
                               {"tolerance", c.tolerance},
                               {"detail", c.detail}});
    return j.dump(2) + "\n";
}

void VerifyReport::append(const VerifyReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

double weight_quadrature_tolerance(int M) {
    const double r = 64.0 / static_cast<double>(M);
    return 2e-3 * std::max(1.0, r * r);
}

namespace {

CheckResult upper(std::string name, double measured, double tol, std::string detail = {}) {
    return {std::move(name), measured <= tol, measured, tol, std::move(detail)};
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

VerifyReport verify_operators(const ExperimentConfig& cfg, int n_fields) {
    VerifyReport rep{"operators", {}};
    const Grid g = cfg.make_grid();
    const CounterRng rng(cfg.noise.seed);
    double idem = 0.0, div = 0.0, gc = 0.0, canc = 0.0, pars = 0.0, herm = 0.0;
    for (int i = 0; i < n_fields; ++i) {
        const Stream s{static_cast<std::uint32_t>(i), 10, 0};
        const SpectralField f = random_raw_field(g, rng, s, 0, 0.5);
        const SpectralField p = leray_project(f);
        idem = std::max(idem, l2_norm(leray_project(p) - p) / l2_norm(p));
        div = std::max(div, divergence_residual(p));
        const double gn = std::sqrt(grad_norm_sq(p)), cn = std::sqrt(l2_norm_sq(curl(p)));
        gc = std::max(gc, std::abs(gn - cn) / gn);
        const SpectralField b = nonlinear_term(p);
        canc = std::max(canc, std::abs(inner(b, p)) / (l2_norm(b) * l2_norm(p)));
        pars = std::max(pars, std::abs(quadrature_l2_sq(p) - l2_norm_sq(p)) / l2_norm_sq(p));
        herm = std::max(herm, hermitian_defect(p));
    }
    rep.checks.push_back(upper("leray_idempotence", idem, 1e-14));
    rep.checks.push_back(upper("divergence_residual", div, 1e-13));
    rep.checks.push_back(upper("grad_equals_curl", gc, 1e-12));
    rep.checks.push_back(upper("nonlinear_cancellation", canc, 1e-10,
                               "dealias_fraction=" + fmt(g.dealias_fraction)));
    rep.checks.push_back(upper("parseval", pars, 1e-12));
    rep.checks.push_back(upper("hermitian_symmetry", herm, 1e-15));
    const DivFreeBasis basis(g);
    const std::size_t count = std::min<std::size_t>(64, basis.size());
    rep.checks.push_back(upper("basis_orthonormality", orthonormality_residual(basis, count), 1e-12,
                               "elements=" + std::to_string(count)));
    return rep;
}

VerifyReport verify_weights(const ExperimentConfig& cfg) {
    VerifyReport rep{"weights", {}};
    // closed forms against polar quadrature on a (t, R) grid spanning both branches
    double cf = 0.0;
    for (double t : {2.0, 8.0, 32.0, 128.0}) {
        const double kink = std::sqrt(t * t - 1.0);
        for (double f : {0.05, 0.5, 1.0, 2.0, 10.0}) {
            const double R = f * kink;
            const ClosedForm c = closed_form_integrals(t, R);
            const BallIntegrals q = ball_integrals(Weight::wedge(t), {0.0, 0.0}, R);
            cf = std::max({cf, std::abs(q.w - c.I_plus) / c.I_plus, std::abs(q.w_inv - c.I_minus) / c.I_minus});
        }
    }
    rep.checks.push_back(upper("closed_form_vs_quadrature", cf, 1e-6, "20 (t,R) points"));
    rep.checks.push_back(upper("g_small_limit", std::abs(g_function(1e-3) - 1.0), 1e-3));
    rep.checks.push_back(upper("g_large_limit", std::abs(g_function(1e4) - 4.0 / 3.0), 1e-3, "R=1e4"));

    double central = 0.0;
    for (double t = 2.0; t <= 128.0; t *= 2.0) {
        const double kink = std::sqrt(t * t - 1.0);
        for (double f : {1.0, 1.5, 3.0, 10.0, 100.0}) {
            const ClosedForm c = closed_form_integrals(t, f * kink);
            const double area = M_PI * f * kink * f * kink;
            central = std::max(central, c.I_plus * c.I_minus / (area * area));
        }
    }
    rep.checks.push_back(upper("central_ball_a2", central, 2.0));

    // sandwich (1 - 1/e)(t ^ phi) <= psi <= t ^ phi on the configured grid
    const Grid g = cfg.make_grid();
    double worst = -INFINITY;
    const double c = -std::expm1(-1.0);
    for (double t : {2.0, 8.0, 32.0, 128.0}) {
        for (int a = 0; a < g.M; ++a) {
            for (int b = 0; b < g.M; ++b) {
                const Point x{g.x(a), g.x(b)};
                const double p = psi(t, x), m = t_wedge_phi(t, x);
                worst = std::max({worst, p - m, c * m - p});
            }
        }
    }
    rep.checks.push_back(upper("psi_sandwich", worst, 1e-12, "max violation"));

    const BallFamily fam = BallFamily::stratified(20);
    double amax = 0.0, amin = INFINITY;
    for (double t : {2.0, 8.0, 32.0, 128.0}) {
        const A2Estimate e = a2_characteristic_estimate(Weight::psi_at(t), fam, 128);
        amax = std::max(amax, e.value);
        amin = std::min(amin, e.value);
    }
    rep.checks.push_back(upper("psi_a2_bounded", amax, assembled_a2_bound() * (1.0 + 1e-3),
                               "spread across t=" + fmt((amax - amin) / amin)));

    // grid quadrature of ||psi e_0||^2 against a doubled grid
    const double tq = 8.0;
    auto wq = [&](const Grid& gg) { return weighted_norms(DivFreeBasis(gg).field(0), tq).psi_u; };
    const Grid g2(g.L, 2 * g.M, g.dealias_fraction);
    const double qa = wq(g), qb = wq(g2);
    rep.checks.push_back(upper("weighted_quadrature_convergence", std::abs(qa - qb) / qb,
                               weight_quadrature_tolerance(g.M), "M=" + std::to_string(g.M)));
    return rep;
}

VerifyReport verify_ledger(const ExperimentConfig& cfg) {
    VerifyReport rep{"ledger", {}};
    ExperimentConfig c = cfg;
    c.integrator.dt = 1e-2;
    const Dynamics dyn = make_dynamics(c);
    const CounterRng rng(c.noise.seed);
    EnergyLedger led(dyn.spec_ptr(), 1e-2, c.stopping_rule());
    SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 11, 0}, 0, 2.0);
    u *= 1.0 / l2_norm(u);
    led.push(0.0, u);
    double comp = 0.0, qv = 0.0;
    bool monotone = true;
    double prev_int = 0.0;
    for (std::uint64_t n = 0; n < 250; ++n) {
        const auto dW = sample_increment(dyn.spec(), 1e-2, rng, {0, 0, 0}, n);
        led.update_martingale(u, dW);
        u = dyn.step_primal(u, dW, n);
        led.push(static_cast<double>(n + 1) * 1e-2, u);
        if (led.ready()) {
            comp = std::max(comp, led.composite_residual());
            const auto& s = led.state();
            qv = std::max(qv, s.QV[0] - s.QV_bound[0]);
            if (s.E_psi_integral < prev_int) monotone = false;
            prev_int = s.E_psi_integral;
        }
    }
    rep.checks.push_back(upper("composite_identity", comp, 1e-10));
    rep.checks.push_back(upper("integral_monotone", monotone ? 0.0 : 1.0, 0.0));
    rep.checks.push_back(upper("quadratic_variation_bound", std::max(qv, 0.0), 0.0));
    EnergyLedger zero(dyn.spec_ptr(), 1e-2, c.stopping_rule());
    const SpectralField z(dyn.grid());
    for (int n = 0; n <= 150; ++n) {
        if (n > 0) zero.update_martingale(z, zero_increment(dyn.spec(), 1e-2, static_cast<std::uint64_t>(n - 1)));
        zero.push(n * 1e-2, z);
    }
    const auto& zs = zero.state();
    const double zmax = std::max({zs.E_psi, zs.E[0], zs.M[0], zs.QV[0]});
    rep.checks.push_back(upper("zero_trajectory", zmax, 0.0,
                               zero.tau().triggered() ? "tau triggered" : "tau not triggered"));
    return rep;
}

VerifyReport verify_coupling(const ExperimentConfig& cfg) {
    VerifyReport rep{"coupling", {}};
    const CounterRng rng(cfg.noise.seed);
    const DiagGaussian a{{0.0}, {1.0}}, b{{1.0}, {1.0}};
    const int trials = 20000;
    int dis = 0;
    for (int i = 0; i < trials; ++i)
        dis += !maximal_couple_step(a, b, rng, {static_cast<std::uint32_t>(i), 12, 13}, 0).agreed;
    const double p = 2.0 * normal_cdf(0.5) - 1.0;
    const double sd = std::sqrt(p * (1 - p) / trials);
    const double z = std::abs(dis / static_cast<double>(trials) - p) / sd;
    rep.checks.push_back(upper("maximal_coupling_disagreement", z, 3.0,
                               "rate=" + fmt(dis / static_cast<double>(trials)) + " target=" + fmt(p)));
    int eq = 0;
    for (int i = 0; i < 1000; ++i)
        eq += maximal_couple_step(a, a, rng, {static_cast<std::uint32_t>(i), 12, 13}, 1).agreed;
    rep.checks.push_back(upper("equal_means_agree", 1000 - eq, 0.0));

    const Dynamics dyn = make_dynamics(cfg);
    SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 14, 0}, 0, 2.0);
    const double dz = l2_norm(girsanov_drift(dyn, u, u, cfg.coupling.N, false));
    rep.checks.push_back(upper("drift_vanishes_on_diagonal", dz, 0.0));
    SpectralField v = u;
    v.axpy(0.3, dyn.basis().field(0));
    rep.checks.push_back(upper("drift_vanishes_when_truncated",
                               l2_norm(girsanov_drift(dyn, u, v, cfg.coupling.N, true)), 0.0));
    rep.checks.push_back(upper("tv_bound_at_zero", tv_bound_from_novikov(0.0, 1.0), 0.0));
    return rep;
}

VerifyReport verify_dynamics(const ExperimentConfig& cfg) {
    VerifyReport rep{"dynamics", {}};
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const auto& mt = modes_for(dyn.grid());
    SpectralField z = random_divfree_field(dyn.grid(), rng, {0, 15, 0}, 0, 1.0);
    const SpectralField z0 = z;
    const int steps = 200;
    for (int n = 0; n < steps; ++n) z = dyn.step_linear_truncation(z);
    double lin = 0.0;
    const double T = steps * cfg.integrator.dt;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z0.c1[i] == 0.0 && z0.c2[i] == 0.0) continue;
        const double f = std::exp((-cfg.physics.a - cfg.physics.nu * mt.kk[i]) * T);
        const double ref = std::abs(z0.c1[i]) * f + std::abs(z0.c2[i]) * f;
        if (ref < 1e-300) continue;
        lin = std::max(lin, (std::abs(z.c1[i] - z0.c1[i] * f) + std::abs(z.c2[i] - z0.c2[i] * f)) / ref);
    }
    rep.checks.push_back(upper("linear_truncation_exact", lin, 1e-12));

    const std::size_t N = cfg.coupling.N;
    SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 16, 0}, 0, 2.0);
    SpectralField v = random_divfree_field(dyn.grid(), rng, {0, 17, 0}, 0, 2.0);
    SpectralField g = u - v;
    const SpectralField lo0 = dyn.basis().low_mode_project(g, N);
    for (int n = 0; n < steps; ++n) {
        const auto dW = sample_increment(dyn.spec(), cfg.integrator.dt, rng, {0, 0, 0}, static_cast<std::uint64_t>(n));
        g = dyn.step_difference_g(g, u, v, N, static_cast<std::uint64_t>(n));
        SpectralField vn = dyn.step_auxiliary_v(v, u, dW, N, static_cast<std::uint64_t>(n));
        u = dyn.step_primal(u, dW, static_cast<std::uint64_t>(n));
        v = std::move(vn);
    }
    SpectralField lo = dyn.basis().low_mode_project(g, N);
    SpectralField expect = lo0;
    expect *= std::exp(-cfg.physics.a * T);
    const double pn = N == 0 ? 0.0 : l2_norm(lo - expect) / std::max(l2_norm(expect), 1e-300);
    rep.checks.push_back(upper("low_mode_exact_decay", pn, 1e-8, "N=" + std::to_string(N)));

    SpectralField x = random_divfree_field(dyn.grid(), rng, {0, 18, 0}, 0, 2.0);
    const auto dW = sample_increment(dyn.spec(), cfg.integrator.dt, rng, {0, 0, 0}, 0);
    const SpectralField prim = dyn.step_primal(x, dW);
    const SpectralField ctrl =
        dyn.step_controlled(x, girsanov_shift(dW, dyn.spec(), dyn.controlled_shift(x, N), N, cfg.integrator.dt), N);
    rep.checks.push_back(upper("controlled_zero_drift", l2_norm(prim - ctrl) / l2_norm(prim), 1e-12));

    ExperimentConfig dc = cfg;
    dc.noise.b0 = 0.0;
    dc.noise.N_active = 0;
    dc.noise.h_coeffs.clear();
    dc.coupling.N = 0;
    dc.integrator.dt = 1e-3;
    SpectralField e0 = random_divfree_field(dyn.grid(), rng, {0, 19, 0}, 0, 2.0);
    e0 *= 1.0 / l2_norm(e0);
    const double res = energy_balance_residual(dc, e0, 0.5);
    rep.checks.push_back(upper("energy_balance", res, 5.0 * dc.integrator.dt));
    return rep;
}

VerifyReport verify_suite(const ExperimentConfig& cfg) {
    VerifyReport rep{"all", {}};
    rep.append(verify_operators(cfg));
    rep.append(verify_weights(cfg));
    rep.append(verify_dynamics(cfg));
    rep.append(verify_ledger(cfg));
    rep.append(verify_coupling(cfg));
    return rep;
}

}  // namespace ns2d
