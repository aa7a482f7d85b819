#include "ns2d/studies.hpp"

#include "ns2d/spectral_ops.hpp"

#include <algorithm>
#include <cmath>

namespace ns2d {

namespace {

constexpr std::uint32_t kPlainOffset = 1u << 20;

SpectralField unit_random(const Grid& g, const CounterRng& rng, Stream s, double decay = 2.0) {
    SpectralField f = random_divfree_field(g, rng, s, 0, decay);
    const double n = l2_norm(f);
    if (n > 0.0) f *= 1.0 / n;
    return f;
}

}  // namespace

MixingStudyResult run_mixing_study(const ExperimentConfig& cfg, const MixingStudyOptions& opt) {
    if (opt.ts.size() < 2 || !std::is_sorted(opt.ts.begin(), opt.ts.end()))
        throw std::invalid_argument("mixing study: need an increasing t-ladder");
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const auto dict = ObservableDictionary::standard(dyn.basis(), opt.n_probes);
    const double dt = dyn.config().dt;
    const auto n = static_cast<std::size_t>(opt.n_members);
    std::vector<std::uint64_t> sample_steps;
    for (double t : opt.ts) sample_steps.push_back(static_cast<std::uint64_t>(std::llround(t / dt)));

    // samples[t][member]
    std::vector<ObservableSamples> sa(opt.ts.size(), ObservableSamples(n)),
        sb(opt.ts.size(), ObservableSamples(n));
    const SpectralField e0 = dyn.basis().field(0);
    parallel_for(2 * n, opt.threads, [&](std::size_t i) {
        const bool first = i < n;
        SpectralField u = e0;
        u *= first ? opt.R : -opt.R;
        const Stream s{static_cast<std::uint32_t>(i), 0, 0};
        std::uint64_t step = 0;
        for (std::size_t k = 0; k < sample_steps.size(); ++k) {
            for (; step < sample_steps[k]; ++step)
                u = dyn.step_primal(u, sample_increment(dyn.spec(), dt, rng, s, step), step);
            (first ? sa : sb)[k][first ? i : i - n] = dict.evaluate(u);
        }
    });

    MixingStudyResult res;
    res.ts = opt.ts;
    for (std::size_t k = 0; k < opt.ts.size(); ++k) {
        const auto est = estimate_dual_lipschitz(sa[k], sb[k], 400, 1000 + k);
        res.D.push_back(est.value);
        res.se.push_back(est.se);
        res.argmax.push_back(est.argmax);
    }
    res.strictly_decreasing = true;
    for (std::size_t k = 0; k + 1 < res.D.size(); ++k) {
        const double s = std::sqrt(res.se[k] * res.se[k] + res.se[k + 1] * res.se[k + 1]);
        if (!(res.D[k] - res.D[k + 1] > 3.0 * s)) res.strictly_decreasing = false;
    }
    if (res.ts.size() >= 4) res.fit = fit_mixing_rate(res.ts, res.D, res.se);
    return res;
}

FoiasProdiResult foias_prodi_study(const ExperimentConfig& cfg, const FoiasProdiOptions& opt) {
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const double dt = dyn.config().dt;
    const auto steps = static_cast<std::uint64_t>(std::llround(opt.T / dt));
    const auto sample_every = std::max<std::uint64_t>(1, steps / 40);
    FoiasProdiResult res;
    for (std::size_t N : opt.Ns) {
        if (N > dyn.basis().size()) throw std::invalid_argument("Foias-Prodi study: N beyond basis");
        FoiasProdiRow row;
        row.N = N;
        row.slopes.resize(static_cast<std::size_t>(opt.n_pairs));
        parallel_for(row.slopes.size(), opt.threads, [&](std::size_t p) {
            const auto pi = static_cast<std::uint32_t>(p);
            SpectralField u = unit_random(dyn.grid(), rng, {pi, 5, 0});
            u *= opt.u_amplitude;
            SpectralField v = u;
            v.axpy(opt.d, unit_random(dyn.grid(), rng, {pi, 6, 0}));
            std::vector<double> ts, lg;
            auto sample = [&](std::uint64_t n) {
                const double g = l2_norm(u - v);
                if (g > 1e-250) {
                    ts.push_back(static_cast<double>(n) * dt);
                    lg.push_back(std::log(g));
                }
            };
            sample(0);
            for (std::uint64_t n = 0; n < steps; ++n) {
                const auto dW = sample_increment(dyn.spec(), dt, rng, {pi, 0, 0}, n);
                SpectralField vn = dyn.step_auxiliary_v(v, u, dW, N, n);
                u = dyn.step_primal(u, dW, n);
                v = std::move(vn);
                if ((n + 1) % sample_every == 0) sample(n + 1);
            }
            row.slopes[p] = ts.size() >= 2 ? linear_fit(ts, lg).slope : -INFINITY;
        });
        row.max_slope = *std::max_element(row.slopes.begin(), row.slopes.end());
        res.rows.push_back(std::move(row));
    }
    const double target = -0.5 * cfg.physics.a;
    for (const auto& r : res.rows)
        if (r.max_slope <= target) {
            res.threshold = r.N;
            break;
        }
    if (res.threshold) {
        res.holds_above_threshold = true;
        for (const auto& r : res.rows)
            if (r.N >= *res.threshold && r.max_slope > target) res.holds_above_threshold = false;
    }
    return res;
}

NovikovLadder novikov_d_ladder(const ExperimentConfig& cfg, const std::vector<double>& ds, double T,
                               std::uint32_t pair) {
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    CouplingConfig cc = cfg.coupling_config();
    cc.T_block = T;
    cc.rule.reset();
    const SpectralField u0 = initial_condition(cfg, dyn.basis(), pair);
    const SpectralField e0 = dyn.basis().field(0);
    NovikovLadder out;
    std::vector<double> lx, ly;
    for (double d : ds) {
        SpectralField up = u0;
        up.axpy(d, e0);
        CouplingState st = make_coupling_state(dyn, cc, u0, up, pair);
        run_coupling_block(st, dyn, cc, rng);
        out.ds.push_back(d);
        out.J.push_back(st.novikov);
        if (d > 0.0 && st.novikov > 0.0) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(st.novikov));
        }
    }
    if (lx.size() >= 2) out.slope = linear_fit(lx, ly).slope;
    return out;
}

MarginalStudy coupling_marginal_study(const ExperimentConfig& cfg, int n_members, int n_blocks,
                                      int threads) {
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const CouplingConfig cc = cfg.coupling_config();
    const SpectralField u0 = initial_condition(cfg, dyn.basis(), 0);
    SpectralField up0 = u0;
    up0.axpy(cfg.coupling.d, dyn.basis().field(0));
    const auto n = static_cast<std::size_t>(n_members);
    std::vector<double> eu(n), eup(n), pu(n), pup(n);
    std::vector<int> decoupled(n, 0);
    const auto steps = static_cast<std::uint64_t>(std::llround(n_blocks * cc.T_block / dyn.config().dt));
    parallel_for(n, threads, [&](std::size_t i) {
        const auto p = static_cast<std::uint32_t>(i);
        CouplingState st = make_coupling_state(dyn, cc, u0, up0, p);
        for (int b = 0; b < n_blocks; ++b) run_coupling_block(st, dyn, cc, rng);
        eu[i] = l2_norm_sq(st.u_tilde);
        eup[i] = l2_norm_sq(st.u_tilde_prime);
        decoupled[i] = st.sigma1.has_value();
        MemberOptions mo;
        mo.record_rows = false;
        mo.ledger = false;
        pu[i] = l2_norm_sq(simulate_member(dyn, u0, kPlainOffset + p, steps, 1, rng, mo).final_state);
        pup[i] = l2_norm_sq(
            simulate_member(dyn, up0, 2 * kPlainOffset + p, steps, 1, rng, mo).final_state);
    });
    MarginalStudy r;
    r.coupled_u = mean_se(eu);
    r.coupled_up = mean_se(eup);
    r.plain_u = mean_se(pu);
    r.plain_up = mean_se(pup);
    r.z_u = two_sample_z(r.coupled_u, r.plain_u);
    r.z_up = two_sample_z(r.coupled_up, r.plain_up);
    double dc = 0.0;
    for (int v : decoupled) dc += v;
    r.decouple_fraction = n ? dc / static_cast<double>(n) : 0.0;
    return r;
}

IrreducibilityResult irreducibility_probe(const ExperimentConfig& cfg, double R, double d, double T,
                                          int n_directions, int n_samples, int threads) {
    if (!(R >= 0.0) || !(d > 0.0) || !(T >= 0.0)) throw std::invalid_argument("irreducibility: bad radii");
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const auto steps = static_cast<std::uint64_t>(std::llround(T / dyn.config().dt));
    const auto nd = static_cast<std::size_t>(n_directions), ns = static_cast<std::size_t>(n_samples);
    std::vector<int> hit(nd * ns, 0);
    parallel_for(nd * ns, threads, [&](std::size_t i) {
        const auto dir = static_cast<std::uint32_t>(i / ns);
        SpectralField u0 = unit_random(dyn.grid(), rng, {dir, 8, 0});
        u0 *= R;
        MemberOptions mo;
        mo.record_rows = false;
        mo.ledger = false;
        mo.role = 9;
        const auto run = simulate_member(dyn, u0, static_cast<std::uint32_t>(i), steps, 1, rng, mo);
        hit[i] = !run.blew_up && l2_norm(run.final_state) < d;
    });
    IrreducibilityResult res;
    res.min_p = 1.0;
    for (std::size_t k = 0; k < nd; ++k) {
        IrreducibilityResult::Direction dr;
        dr.n = ns;
        for (std::size_t s = 0; s < ns; ++s) dr.hits += static_cast<std::size_t>(hit[k * ns + s]);
        dr.p_hat = ns ? static_cast<double>(dr.hits) / static_cast<double>(ns) : 0.0;
        dr.ci = wilson_interval(dr.hits, dr.n);
        if (res.directions.empty() || dr.p_hat < res.min_p) {
            res.min_p = dr.p_hat;
            res.min_ci = dr.ci;
        }
        res.directions.push_back(dr);
    }
    res.positive = !res.directions.empty() && res.min_ci.lo > 0.0;
    return res;
}

double energy_balance_residual(const ExperimentConfig& cfg, const SpectralField& u0, double T) {
    const Dynamics dyn = make_dynamics(cfg);
    const double dt = dyn.config().dt;
    const auto steps = static_cast<std::uint64_t>(std::llround(T / dt));
    const SpectralField& h = dyn.spec().h;
    const double a = cfg.physics.a, nu = cfg.physics.nu;
    auto rate = [&](const SpectralField& u) {
        return 2.0 * (-a * l2_norm_sq(u) - nu * grad_norm_sq(u) + inner(h, u));
    };
    SpectralField u = u0;
    const double e0 = l2_norm_sq(u0);
    double integral = 0.0, r_prev = rate(u);
    for (std::uint64_t n = 0; n < steps; ++n) {
        u = dyn.step_primal(u, zero_increment(dyn.spec(), dt, n), n);
        const double r = rate(u);
        integral += 0.5 * dt * (r_prev + r);
        r_prev = r;
    }
    const double Tn = static_cast<double>(steps) * dt;
    return std::abs(l2_norm_sq(u) - e0 - integral) / (Tn * std::max(e0, 1.0));
}

ItoDrift ito_drift_study(const ExperimentConfig& cfg, double t1, int n_members, int threads) {
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const auto steps = static_cast<std::uint64_t>(std::llround(t1 / dyn.config().dt));
    const double tt = static_cast<double>(steps) * dyn.config().dt;
    std::vector<double> v(static_cast<std::size_t>(n_members));
    const SpectralField zero(dyn.grid());
    parallel_for(v.size(), threads, [&](std::size_t i) {
        MemberOptions mo;
        mo.record_rows = false;
        mo.ledger = false;
        v[i] = l2_norm_sq(simulate_member(dyn, zero, static_cast<std::uint32_t>(i), steps, 1, rng, mo)
                              .final_state) / tt;
    });
    ItoDrift r;
    r.slope = mean_se(v);
    r.B0 = dyn.spec().B0;
    r.rel_error = std::abs(r.slope.mean - r.B0) / r.B0;
    return r;
}

std::vector<EnergyEnvelopeRow> energy_envelope_study(const ExperimentConfig& cfg,
                                                     const std::vector<double>& radii, double T,
                                                     int n_members, int threads) {
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const auto steps = static_cast<std::uint64_t>(std::llround(T / dyn.config().dt));
    const double h2 = l2_norm_sq(dyn.spec().h);
    const double a = cfg.physics.a;
    const double c = h2 == 0.0 ? 2.0 * a : a;
    const double source = dyn.spec().B0 + (h2 == 0.0 ? 0.0 : h2 / a);
    std::vector<EnergyEnvelopeRow> rows;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        SpectralField u0 = dyn.basis().field(0);
        u0 *= radii[k];
        std::vector<double> e(static_cast<std::size_t>(n_members));
        parallel_for(e.size(), threads, [&](std::size_t i) {
            MemberOptions mo;
            mo.record_rows = false;
            mo.ledger = false;
            const auto m = static_cast<std::uint32_t>(k * e.size() + i);
            e[i] = l2_norm_sq(simulate_member(dyn, u0, m, steps, 1, rng, mo).final_state);
        });
        EnergyEnvelopeRow row;
        row.r = radii[k];
        row.energy = mean_se(e);
        row.envelope = std::exp(-c * T) * radii[k] * radii[k] + source * (-std::expm1(-c * T)) / c;
        rows.push_back(row);
    }
    return rows;
}

std::vector<CoupledPairRun> run_coupled_pairs(const ExperimentConfig& cfg, int threads) {
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const CouplingConfig cc = cfg.coupling_config();
    std::vector<CoupledPairRun> out(static_cast<std::size_t>(cfg.ensemble.n_pairs));
    parallel_for(out.size(), threads, [&](std::size_t i) {
        const auto p = static_cast<std::uint32_t>(i);
        const SpectralField u0 = initial_condition(cfg, dyn.basis(), 2 * p);
        SpectralField up0 = u0;
        up0.axpy(cfg.coupling.d, unit_random(dyn.grid(), rng, {p, 6, 0}));
        CouplingState st = make_coupling_state(dyn, cc, u0, up0, p);
        CoupledPairRun run;
        run.pair = p;
        run.pair_norms.push_back({l2_norm(u0), l2_norm(up0)});
        for (int b = 0; b < cfg.coupling.n_blocks; ++b) {
            run.blocks.push_back(run_coupling_block(st, dyn, cc, rng));
            run.pair_norms.push_back({l2_norm(st.u_tilde), l2_norm(st.u_tilde_prime)});
        }
        run.sigma1 = st.sigma1;
        run.tau_tilde = st.tau_tilde;
        run.event = classify_squeezing(st.sigma1, st.tau_tilde, cc.T_block);
        run.tau_d = recurrence_time(run.pair_norms, cfg.coupling.d, cc.T_block);
        run.cn_max = st.cn_max;
        out[i] = std::move(run);
    });
    return out;
}

}  // namespace ns2d
