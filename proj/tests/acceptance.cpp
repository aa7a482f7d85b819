// Acceptance criteria 1-9. Usage: acceptance [--criterion N]... (default: all)
#include "ns2d/coupling.hpp"
#include "ns2d/experiment.hpp"
#include "ns2d/poincare.hpp"
#include "ns2d/spectral_ops.hpp"
#include "ns2d/stats.hpp"
#include "ns2d/studies.hpp"
#include "ns2d/weights.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace ns2d;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        notes.push_back(std::string(ok ? "ok " : "FAILED ") + what);
        pass = pass && ok;
    }
};

std::string f(const char* fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

int threads() { return default_threads(); }

// ---- tolerances --------------------------------------------------------------
constexpr double kClosedFormRel = 1e-6;
constexpr double kGLimitTol = 1e-3;
constexpr double kCentralA2 = 2.0;
constexpr double kSandwichSlack = 1e-12;
constexpr double kA2Uniformity = 0.05;
constexpr double kLerayIdem = 1e-14;
constexpr double kDivergence = 1e-13;
constexpr double kGradCurl = 1e-12;
constexpr double kCancellation = 1e-10;
constexpr double kParseval = 1e-12;
constexpr double kLinearExact = 1e-14;
constexpr double kLowModeDecay = 1e-8;
constexpr double kEnergyBalanceFactor = 5.0;   // times dt per unit time
constexpr double kItoRel = 0.10;
constexpr double kEnvelopeSlack = 0.10;
constexpr double kPoincareTarget = 0.1;
constexpr double kSigmas = 3.0;
constexpr double kNovikovSlope = 2.0, kNovikovSlopeTol = 0.3;
constexpr double kSyntheticFit = 1e-6;

Outcome criterion1() {
    Outcome o;
    double worst = 0.0;
    int small = 0, large = 0;
    for (double t : {2.0, 5.0, 20.0, 128.0}) {
        const double kink = std::sqrt(t * t - 1.0);
        for (double r : {0.1, 0.6, 1.0, 1.7, 12.0}) {
            const double R = r * kink;
            const ClosedForm c = closed_form_integrals(t, R);
            (c.large_branch ? large : small)++;
            const BallIntegrals q = ball_integrals(Weight::wedge(t), {0.0, 0.0}, R);
            worst = std::max({worst, std::abs(q.w - c.I_plus) / c.I_plus,
                              std::abs(q.w_inv - c.I_minus) / c.I_minus});
        }
    }
    o.require(worst <= kClosedFormRel && small > 0 && large > 0,
              f("closed forms vs quadrature, 20 points: max rel %.3g (tol %.0e)", worst, kClosedFormRel));
    const double g0 = g_function(1e-3), ginf = g_function(1e3);
    o.require(std::abs(g0 - 1.0) <= kGLimitTol, f("G(1e-3) = %.9f, |G - 1| = %.3g", g0, std::abs(g0 - 1.0)));
    o.require(std::abs(ginf - 4.0 / 3.0) <= kGLimitTol,
              f("G(1e3) = %.9f, |G - 4/3| = %.3g (tol %.0e)", ginf, std::abs(ginf - 4.0 / 3.0), kGLimitTol));
    double central = 0.0;
    for (int ti = 2; ti <= 128; ++ti) {
        const double t = ti, kink = std::sqrt(t * t - 1.0);
        for (int k = 0; k <= 200; ++k) {
            const double R = kink * std::pow(10.0, 6.0 * k / 200.0);
            const ClosedForm c = closed_form_integrals(t, R);
            const double area = M_PI * R * R;
            central = std::max(central, c.I_plus * c.I_minus / (area * area));
        }
    }
    o.require(central <= kCentralA2, f("central-ball A2 ratio max %.6f over t=2..128, R >= kink", central));
    return o;
}

Outcome criterion2() {
    Outcome o;
    const Grid g(200.0, 512);
    const double c = -std::expm1(-1.0);
    double worst = -INFINITY;
    for (double t : {2.0, 8.0, 32.0, 128.0})
        for (int a = 0; a < g.M; ++a)
            for (int b = 0; b < g.M; ++b) {
                const Point x{g.x(a), g.x(b)};
                const double p = psi(t, x), m = t_wedge_phi(t, x);
                worst = std::max({worst, p - m, c * m - p});
            }
    o.require(worst <= kSandwichSlack, f("psi sandwich on 512^2 grid (|x| <= 283): max violation %.3g", worst));

    const BallFamily fam = BallFamily::stratified();
    std::vector<double> vals;
    std::string list;
    for (double t : {2.0, 8.0, 32.0, 128.0}) {
        vals.push_back(a2_characteristic_estimate(Weight::psi_at(t), fam).value);
        list += f(" %.4f", vals.back());
    }
    const double lo = *std::min_element(vals.begin(), vals.end());
    const double hi = *std::max_element(vals.begin(), vals.end());
    o.require(hi <= assembled_a2_bound(), "A2 estimates bounded by 2:" + list);
    o.require((hi - lo) / lo < kA2Uniformity,
              f("A2 variation across t-ladder %.2f%% over %.0f balls (tol 5%%)", 100 * (hi - lo) / lo,
                static_cast<double>(fam.balls.size())));
    return o;
}

Outcome criterion3() {
    Outcome o;
    const Grid g(M_PI, 64);
    const CounterRng rng(2024);
    double idem = 0, div = 0, gc = 0, canc = 0, pars = 0;
    for (std::uint32_t i = 0; i < 100; ++i) {
        const SpectralField fr = random_raw_field(g, rng, {i, 20, 0}, 0, 0.5);
        const SpectralField p = leray_project(fr);
        idem = std::max(idem, l2_norm(leray_project(p) - p) / l2_norm(p));
        div = std::max(div, divergence_residual(p));
        const double gn = std::sqrt(grad_norm_sq(p)), cn = std::sqrt(l2_norm_sq(curl(p)));
        gc = std::max(gc, std::abs(gn - cn) / gn);
        const SpectralField b = nonlinear_term(p);
        canc = std::max(canc, std::abs(inner(b, p)) / (l2_norm(b) * l2_norm(p)));
        pars = std::max(pars, std::abs(quadrature_l2_sq(p) - l2_norm_sq(p)) / l2_norm_sq(p));
    }
    o.require(idem <= kLerayIdem, f("Leray idempotence %.3g", idem));
    o.require(div <= kDivergence, f("divergence residual %.3g", div));
    o.require(gc <= kGradCurl, f("|grad u| vs |curl u| %.3g", gc));
    o.require(canc <= kCancellation, f("nonlinear cancellation %.3g", canc));
    o.require(pars <= kParseval, f("Parseval %.3g", pars));
    return o;
}

Outcome criterion4() {
    Outcome o;
    ExperimentConfig cfg;
    cfg.grid.M = 64;
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(4);
    const auto& mt = modes_for(dyn.grid());
    SpectralField z = random_divfree_field(dyn.grid(), rng, {0, 21, 0}, 0, 0.5);
    const SpectralField z0 = z;
    double scale = 0.0;
    for (std::size_t i = 0; i < z0.size(); ++i) scale = std::max({scale, std::abs(z0.c1[i]), std::abs(z0.c2[i])});
    const int steps = 1000;
    double err = 0.0;
    for (int n = 1; n <= steps; ++n) {
        z = dyn.step_linear_truncation(z);
        const double t = n * cfg.integrator.dt;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double fct = std::exp((-cfg.physics.a - cfg.physics.nu * mt.kk[i]) * t);
            err = std::max({err, std::abs(z.c1[i] - z0.c1[i] * fct), std::abs(z.c2[i] - z0.c2[i] * fct)});
        }
    }
    o.require(err / scale <= kLinearExact,
              f("linear truncation, 1e3 steps: max per-mode error / max|z0| = %.3g", err / scale));

    const std::size_t N = cfg.coupling.N;
    SpectralField u = random_divfree_field(dyn.grid(), rng, {0, 22, 0}, 0, 2.0);
    SpectralField v = random_divfree_field(dyn.grid(), rng, {0, 23, 0}, 0, 2.0);
    SpectralField gdiff = u - v;
    const SpectralField lo0 = dyn.basis().low_mode_project(gdiff, N);
    double worst = 0.0;
    for (int n = 0; n < steps; ++n) {
        const auto k = static_cast<std::uint64_t>(n);
        const auto dW = sample_increment(dyn.spec(), cfg.integrator.dt, rng, {0, 0, 0}, k);
        gdiff = dyn.step_difference_g(gdiff, u, v, N, k);
        SpectralField vn = dyn.step_auxiliary_v(v, u, dW, N, k);
        u = dyn.step_primal(u, dW, k);
        v = std::move(vn);
        SpectralField expect = lo0;
        expect *= std::exp(-cfg.physics.a * (n + 1) * cfg.integrator.dt);
        const SpectralField lo = dyn.basis().low_mode_project(gdiff, N);
        worst = std::max(worst, l2_norm(lo - expect) / l2_norm(expect));
    }
    o.require(worst <= kLowModeDecay, f("P_N g decay at rate a over 1e3 steps: max rel error %.3g", worst));
    return o;
}

Outcome criterion5() {
    Outcome o;
    ExperimentConfig det;
    det.grid.M = 64;
    det.integrator.dt = 1e-3;
    det.noise.b0 = 0.0;
    det.noise.N_active = 0;
    det.coupling.N = 0;
    const Dynamics dd = make_dynamics(det);
    const CounterRng rng(5);
    SpectralField u0 = random_divfree_field(dd.grid(), rng, {0, 24, 0}, 0, 1.0);
    u0 *= 2.0 / l2_norm(u0);
    const double res = energy_balance_residual(det, u0, 1.0);
    o.require(res <= kEnergyBalanceFactor * det.integrator.dt,
              f("deterministic energy balance residual %.3g per unit time (tol %.3g)", res,
                kEnergyBalanceFactor * det.integrator.dt));

    ExperimentConfig ito;
    ito.grid.M = 64;
    ito.integrator.dt = 1e-3;
    ito.noise.J = 200;
    ito.noise.s = 0.6;
    const ItoDrift id = ito_drift_study(ito, 0.005, 1000, threads());
    o.require(id.rel_error <= kItoRel, f("Ito drift E|u(t1)|^2/t1 = %.5g vs B0 = %.5g (rel %.3g)", id.slope.mean,
                                         id.B0, id.rel_error));

    ExperimentConfig me;
    const auto rows = energy_envelope_study(me, {0.0, 2.0, 5.0}, 1.0, 1000, threads());
    for (const auto& r : rows)
        o.require(r.energy.mean <= (1.0 + kEnvelopeSlack) * r.envelope,
                  f("E|u(1)|^2 from |u0| = %.1f: %.5g <= 1.1 x envelope %.5g", r.r, r.energy.mean, r.envelope));
    return o;
}

Outcome criterion6() {
    Outcome o;
    const int M = 512;
    const double L = 4.2, A = L / 4.0;
    const DivFreeBasis basis(Grid(L, M));
    const std::vector<std::size_t> Ns{256, 1024, 4096, 16384, static_cast<std::size_t>(M) * M / 4};
    const PoincareLadder lad = poincare_ladder(basis, Ns, A, kPoincareTarget);
    bool mono = true;
    std::string list;
    for (std::size_t i = 0; i < lad.N.size(); ++i) {
        list += f(" %.0f:%.4f", static_cast<double>(lad.N[i]), lad.epsilon[i]);
        if (i > 0 && !(lad.epsilon[i] <= lad.epsilon[i - 1])) mono = false;
    }
    o.require(mono, "truncated Poincare epsilon non-increasing in N:" + list);
    o.require(lad.first_below != 0, f("epsilon < 0.1 first at N = %.0f (M^2/4 = %.0f)",
                                      static_cast<double>(lad.first_below), M * M / 4.0));

    ExperimentConfig cfg;
    FoiasProdiOptions fo;
    fo.threads = threads();
    const auto fp = foias_prodi_study(cfg, fo);
    std::string rows;
    for (const auto& r : fp.rows) rows += f(" N=%.0f:%.3f", static_cast<double>(r.N), r.max_slope);
    o.require(fp.threshold.has_value() && fp.holds_above_threshold,
              "max log-separation slope over 20 pairs, target <= -a/2:" + rows +
                  (fp.threshold ? f(" threshold N=%.0f", static_cast<double>(*fp.threshold)) : " no threshold"));
    return o;
}

Outcome criterion7() {
    Outcome o;
    const CounterRng rng(7);
    const DiagGaussian a{{0.0}, {1.0}}, b{{1.0}, {1.0}};
    const int trials = 100000;
    int dis = 0;
    for (int i = 0; i < trials; ++i)
        dis += !maximal_couple_step(a, b, rng, {static_cast<std::uint32_t>(i), 30, 31}, 0).agreed;
    const double p = 2.0 * normal_cdf(0.5) - 1.0, rate = dis / static_cast<double>(trials);
    const double z = std::abs(rate - p) / std::sqrt(p * (1 - p) / trials);
    o.require(z <= kSigmas, f("disagreement %.5f vs 2Phi(1/2)-1 = %.5f (%.2f sigma)", rate, p, z));

    ExperimentConfig cfg;
    cfg.initial.kind = "random";
    cfg.initial.amplitude = 1.0;
    cfg.coupling.d = 0.3;
    const auto ms = coupling_marginal_study(cfg, 500, 2, threads());
    o.require(std::abs(ms.z_u) <= kSigmas && std::abs(ms.z_up) <= kSigmas,
              f("marginals vs plain solver: z(u~) = %.2f, z(u~') = %.2f", ms.z_u, ms.z_up) +
                  f(", decoupled fraction %.2f", ms.decouple_fraction));

    const auto nl = novikov_d_ladder(cfg, {0.1, 0.05, 0.025}, 1.0);
    o.require(std::abs(nl.slope - kNovikovSlope) <= kNovikovSlopeTol,
              f("Novikov d-ladder slope %.4f (J = %.3g ... %.3g)", nl.slope, nl.J.front(), nl.J.back()));
    return o;
}

Outcome criterion8() {
    Outcome o;
    ExperimentConfig cfg;
    cfg.noise.b0 = 0.3;
    MixingStudyOptions mo;
    mo.threads = threads();
    const auto res = run_mixing_study(cfg, mo);
    std::string list;
    for (std::size_t i = 0; i < res.ts.size(); ++i) list += f(" t=%.1f:%.4f+-%.4f", res.ts[i], res.D[i], res.se[i]);
    o.require(res.strictly_decreasing, "dual-Lipschitz lower bound strictly decreasing at 3 sigma:" + list);
    o.require(res.fit.q_hat > 0 && res.fit.q_ci.lo > 0,
              f("q_hat = %.4f, bootstrap 95%% CI [%.4f, %.4f]", res.fit.q_hat, res.fit.q_ci.lo, res.fit.q_ci.hi));

    std::vector<double> t{0, 1, 2, 4, 8, 16}, Dp, De;
    for (double x : t) {
        Dp.push_back(std::pow(1.0 + x, -3.0));
        De.push_back(std::exp(-x));
    }
    const MixingFit fp = fit_mixing_rate(t, Dp), fe = fit_mixing_rate(t, De);
    o.require(std::abs(fp.q_hat - 3.0) <= kSyntheticFit, f("synthetic power law q_hat = %.12f", fp.q_hat));
    o.require(std::abs(fe.exp_rate - 1.0) <= kSyntheticFit && !fe.power_preferred(),
              f("synthetic exponential rate = %.12f, AIC exp %.1f < power %.1f", fe.exp_rate, fe.aic_exp,
                fe.aic_power));
    return o;
}

std::string slurp(const std::string& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome criterion9() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / ("ns2d_accept_" + std::to_string(::getpid()));
    std::vector<std::string> manifests;
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = base / ("run" + std::to_string(run));
        fs::remove_all(dir);
        const std::string cmd = std::string(NS2D_CLI_PATH) + " verify-all --out-dir " + dir.string() +
                                " --threads " + std::to_string(run == 0 ? 1 : threads()) + " > /dev/null";
        const int rc = std::system(cmd.c_str());
        o.require(rc == 0, f("verify-all run %.0f exit status %.0f", run + 1.0, static_cast<double>(rc)));
        manifests.push_back(slurp((dir / "manifest.json").string()));
    }
    o.require(!manifests[0].empty() && manifests[0] == manifests[1],
              f("manifests byte-identical (%.0f bytes)", static_cast<double>(manifests[0].size())));
    fs::remove_all(base);
    return o;
}

struct Criterion {
    int id;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{{1, 10, criterion1},   {2, 60, criterion2},   {3, 10, criterion3},
                                     {4, 10, criterion4},   {5, 600, criterion5},  {6, 600, criterion6},
                                     {7, 1800, criterion7}, {8, 7200, criterion8}, {9, 600, criterion9}};
    std::vector<int> chosen;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) chosen.push_back(std::atoi(argv[++i]));
    }
    bool ok = true;
    for (const auto& c : all) {
        if (!chosen.empty() && std::find(chosen.begin(), chosen.end(), c.id) == chosen.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(secs < c.limit_s, f("runtime %.1f s (limit %.0f s)", secs, c.limit_s));
        for (const auto& n : out.notes) std::printf("  [%d] %s\n", c.id, n.c_str());
        std::printf("criterion %d: %s\n", c.id, out.pass ? "PASS" : "FAIL");
        std::fflush(stdout);
        ok = ok && out.pass;
    }
    return ok ? 0 : 1;
}
