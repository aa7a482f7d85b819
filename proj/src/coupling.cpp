#include "ns2d/coupling.hpp"

#include "ns2d/snapshot_io.hpp"
#include "ns2d/spectral_ops.hpp"
#include "ns2d/stats.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace ns2d {

namespace {

constexpr std::uint32_t kRoleU = 1;
constexpr std::uint32_t kRoleUPrime = 2;
constexpr std::uint32_t kMaxAttempt = (1u << 24) - 1;

void check_shapes(const DiagGaussian& a, const DiagGaussian& b) {
    if (a.mean.size() != b.mean.size() || a.sd.size() != a.mean.size() || b.sd.size() != b.mean.size())
        throw std::invalid_argument("coupling: dimension mismatch");
    for (std::size_t i = 0; i < a.sd.size(); ++i)
        if (a.sd[i] != b.sd[i] || !(a.sd[i] > 0.0))
            throw std::invalid_argument("coupling: covariance mismatch");
}

// log p_b(x) - log p_a(x)
double log_ratio(const std::vector<double>& x, const DiagGaussian& a, const DiagGaussian& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double za = (x[i] - a.mean[i]) / a.sd[i];
        const double zb = (x[i] - b.mean[i]) / b.sd[i];
        s += 0.5 * (za * za - zb * zb);
    }
    return s;
}

}  // namespace

double gaussian_tv(const DiagGaussian& a, const DiagGaussian& b) {
    check_shapes(a, b);
    double m2 = 0.0;
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        const double d = (b.mean[i] - a.mean[i]) / a.sd[i];
        m2 += d * d;
    }
    return 2.0 * normal_cdf(0.5 * std::sqrt(m2)) - 1.0;
}

CoupledDraw maximal_couple_given_x(std::vector<double> x, const DiagGaussian& a,
                                   const DiagGaussian& b, const CounterRng& rng,
                                   CouplingStreams streams, std::uint64_t step) {
    check_shapes(a, b);
    if (x.size() != a.mean.size()) throw std::invalid_argument("coupling: draw dimension mismatch");
    CoupledDraw out;
    out.x = std::move(x);
    const double u0 = rng.uniform({streams.trajectory, streams.uniform_role, 0}, step, 0);
    if (std::log(u0) <= log_ratio(out.x, a, b)) {
        out.y = out.x;
        out.agreed = true;
        return out;
    }
    const std::size_t n = out.x.size();
    std::vector<double> z(n);
    out.y.resize(n);
    for (std::uint32_t att = 1;; ++att) {
        if (att > kMaxAttempt) throw CounterExhausted("coupling: residual sampling attempts exhausted");
        rng.normals({streams.trajectory, streams.proposal_role, att}, step, n, z.data());
        for (std::size_t i = 0; i < n; ++i) out.y[i] = b.mean[i] + b.sd[i] * z[i];
        const double u = rng.uniform({streams.trajectory, streams.uniform_role, att}, step, 0);
        if (std::log(u) > -log_ratio(out.y, a, b)) {
            out.attempts = att;
            return out;
        }
    }
}

CoupledDraw maximal_couple_step(const DiagGaussian& a, const DiagGaussian& b, const CounterRng& rng,
                                CouplingStreams streams, std::uint64_t step) {
    check_shapes(a, b);
    const std::size_t n = a.mean.size();
    std::vector<double> x(n);
    rng.normals({streams.trajectory, streams.proposal_role, 0}, step, n, x.data());
    for (std::size_t i = 0; i < n; ++i) x[i] = a.mean[i] + a.sd[i] * x[i];
    return maximal_couple_given_x(std::move(x), a, b, rng, streams, step);
}

SpectralField girsanov_drift(const Dynamics& dyn, const SpectralField& u_hat,
                             const SpectralField& v_hat, std::size_t N, bool truncated) {
    if (truncated || N == 0) return SpectralField(u_hat.grid);
    return dyn.control_drift(u_hat, v_hat, N);
}

double tv_bound_from_novikov(double J, double b_min) {
    if (b_min == 0.0) throw std::domain_error("tv bound: degenerate noise (b_min = 0)");
    if (!(J >= 0.0)) throw std::invalid_argument("tv bound: J must be non-negative");
    const double e = std::expm1(3.0 * J / (b_min * b_min));
    return std::clamp(0.5 * std::sqrt(e), 0.0, 1.0);
}

void CouplingConfig::validate(const Dynamics& dyn) const {
    if (N > dyn.spec().N_active()) throw std::invalid_argument("coupling: N exceeds active modes");
    for (std::size_t j = 0; j < N; ++j)
        if (dyn.spec().b[j] == 0.0) throw std::domain_error("coupling: degenerate noise in low modes");
    if (!(T_block > 0.0)) throw std::invalid_argument("coupling: T_block must be positive");
    const double steps = T_block / dyn.config().dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
        throw std::invalid_argument("coupling: T_block must be a multiple of dt");
    if (rule) rule->validate();
}

CouplingState make_coupling_state(const Dynamics& dyn, const CouplingConfig& cfg,
                                  const SpectralField& u0, const SpectralField& u0_prime,
                                  std::uint32_t pair) {
    cfg.validate(dyn);
    CouplingState st(u0, u0_prime);
    st.pair = pair;
    if (cfg.rule) {
        const auto& spec = dyn.spec_ptr();
        st.ledger_u.emplace(spec, dyn.config().dt, cfg.rule, cfg.keep_ledger_history);
        st.ledger_up.emplace(spec, dyn.config().dt, cfg.rule, cfg.keep_ledger_history);
        st.ledger_u->push(0.0, u0);
        st.ledger_up->push(0.0, u0_prime);
        st.ledger_v = st.ledger_up;
    }
    return st;
}

CouplingBlockOutcome run_coupling_block(CouplingState& st, const Dynamics& dyn,
                                        const CouplingConfig& cfg, const CounterRng& rng) {
    const NoiseSpec& spec = dyn.spec();
    const DivFreeBasis& basis = dyn.basis();
    const double dt = dyn.config().dt;
    const double sdt = std::sqrt(dt);
    const std::size_t N = cfg.N;
    const auto nsteps = static_cast<std::uint64_t>(std::llround(cfg.T_block / dt));

    CouplingBlockOutcome out;
    out.k = st.block;
    st.v_tilde = st.u_tilde_prime;
    if (st.ledger_up) st.ledger_v = st.ledger_up;
    st.agreement = true;

    const bool had_sigma = st.sigma1.has_value();
    const bool had_tau = std::isfinite(st.tau_tilde);
    double log_keep = 0.0;
    const CouplingStreams cs{st.pair, 3, 4};

    for (std::uint64_t i = 0; i < nsteps; ++i) {
        const std::uint64_t n = st.step;
        const double t_next = static_cast<double>(n + 1) * dt;
        const WienerIncrement dW = sample_increment(spec, dt, rng, {st.pair, kRoleU, 0}, n);

        const SpectralField A = girsanov_drift(dyn, st.u_tilde, st.v_tilde, N, st.truncated);
        std::vector<double> a = basis.coords(A, N);
        if (!st.truncated && N > 0) {
            const double a2 = l2_norm_sq(A);
            st.novikov += a2 * dt;
            SpectralField g = st.u_tilde - st.v_tilde;
            const double g2 = l2_norm_sq(g);
            if (g2 > 0.0) {
                const double su = sobolev_norm(st.u_tilde, 1.0), sv = sobolev_norm(st.v_tilde, 1.0);
                st.cn_max = std::max(st.cn_max, a2 / (g2 * (1.0 + su * su + sv * sv)));
            }
        }
        const WienerIncrement X = girsanov_shift(dW, spec, a, dt);

        SpectralField v_next = dyn.step_primal(st.v_tilde, X, n);
        SpectralField up_next;
        WienerIncrement Yinc;
        if (st.agreement) {
            DiagGaussian ga{std::vector<double>(N), std::vector<double>(N, sdt)};
            DiagGaussian gb{std::vector<double>(N, 0.0), std::vector<double>(N, sdt)};
            std::vector<double> x(N);
            for (std::size_t j = 0; j < N; ++j) {
                ga.mean[j] = X.shift[j];
                x[j] = X.value(j);
            }
            log_keep += std::log1p(-gaussian_tv(ga, gb));
            CoupledDraw d = maximal_couple_given_x(std::move(x), ga, gb, rng, cs, n);
            if (d.agreed) {
                Yinc = X;
                up_next = v_next;
            } else {
                Yinc = dW;
                for (std::size_t j = 0; j < N; ++j) Yinc.dbeta[j] = d.y[j];
                up_next = dyn.step_primal(st.u_tilde_prime, Yinc, n);
                st.agreement = false;
                if (!st.sigma1) st.sigma1 = t_next;
            }
        } else {
            Yinc = sample_increment(spec, dt, rng, {st.pair, kRoleUPrime, 0}, n);
            up_next = dyn.step_primal(st.u_tilde_prime, Yinc, n);
        }
        SpectralField u_next = dyn.step_primal(st.u_tilde, dW, n);

        if (st.ledger_u) {
            st.ledger_u->update_martingale(st.u_tilde, dW);
            st.ledger_up->update_martingale(st.u_tilde_prime, Yinc);
            st.ledger_v->update_martingale(st.v_tilde, X);
            st.ledger_u->push(t_next, u_next);
            st.ledger_up->push(t_next, up_next);
            st.ledger_v->push(t_next, v_next);
            const double tu = st.ledger_u->tau().value, tup = st.ledger_up->tau().value;
            st.tau_tilde = std::min(tu, tup);
            st.tau = std::min({st.tau, st.tau_tilde, st.ledger_v->tau().value});
            if (std::isfinite(st.tau)) st.truncated = true;
        }

        st.u_tilde = std::move(u_next);
        st.u_tilde_prime = std::move(up_next);
        st.v_tilde = std::move(v_next);
        st.step = n + 1;
        if (st.novikov > cfg.novikov_cap) out.novikov_cap_breached = true;
    }

    out.coupled = st.agreement;
    out.tv_estimate = std::clamp(-std::expm1(log_keep), 0.0, 1.0);
    out.novikov = st.novikov;
    out.sep_norm = l2_norm(st.u_tilde - st.u_tilde_prime);
    out.sigma_hit = !had_sigma && st.sigma1.has_value();
    out.tau_hit = !had_tau && std::isfinite(st.tau_tilde);
    ++st.block;
    return out;
}

SqueezingEvent classify_squeezing(std::optional<double> sigma1, double tau_tilde, double T) {
    SqueezingEvent ev;
    const double s1 = sigma1.value_or(std::numeric_limits<double>::infinity());
    ev.sigma = std::min(s1, tau_tilde);
    if (!std::isfinite(ev.sigma)) return ev;
    ev.k = static_cast<std::uint64_t>(std::floor(ev.sigma / T));
    ev.kind = s1 <= tau_tilde ? SqueezingEvent::Kind::q_double_prime : SqueezingEvent::Kind::q_prime;
    return ev;
}

void write_block_csv(const std::string& path, const std::vector<CouplingBlockOutcome>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os << "k,coupled,tv_estimate,novikov,sep_norm,sigma_hit,tau_hit\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.k << ',' << r.coupled << ',' << r.tv_estimate << ',' << r.novikov << ',' << r.sep_norm
           << ',' << r.sigma_hit << ',' << r.tau_hit << '\n';
    if (!os) throw IoError("write failed for " + path);
}

}  // namespace ns2d
