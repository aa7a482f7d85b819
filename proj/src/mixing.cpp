#include "ns2d/mixing.hpp"

#include "ns2d/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ns2d {

ObservableDictionary ObservableDictionary::standard(const DivFreeBasis& basis, std::size_t n_probes,
                                                    const std::vector<std::size_t>& energy_modes,
                                                    double cap) {
    ObservableDictionary d;
    d.basis_ = &basis;
    for (std::size_t j = 0; j < n_probes; ++j) d.add_probe(basis.field(j), "tanh_e" + std::to_string(j));
    for (std::size_t m : energy_modes) d.add_capped_energy(basis, m, cap);
    return d;
}

void ObservableDictionary::add_probe(const SpectralField& g, std::string name) {
    const double n = l2_norm(g);
    if (!(n > 0.0)) throw std::invalid_argument("observable: zero probe");
    Observable o{Observable::Kind::tanh_probe, g, 0, 0.0, 1.0, 1.0, std::move(name)};
    // tanh is 1-Lipschitz, so f is ||g||-Lipschitz; rescale when ||g|| > 1
    if (n > 1.0) o.probe *= 1.0 / n;
    o.lipschitz = std::min(n, 1.0);
    obs_.push_back(std::move(o));
}

void ObservableDictionary::add_capped_energy(const DivFreeBasis& basis, std::size_t m, double cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("observable: cap must be positive");
    if (m > basis.size()) throw std::out_of_range("observable: too many modes");
    basis_ = &basis;
    Observable o{Observable::Kind::capped_energy, SpectralField(basis.grid()), m, cap,
                 0.5 * std::sqrt(cap), 1.0, "capped_energy_" + std::to_string(m)};
    obs_.push_back(std::move(o));
}

std::vector<double> ObservableDictionary::evaluate(const SpectralField& u) const {
    std::vector<double> out(obs_.size());
    for (std::size_t i = 0; i < obs_.size(); ++i) {
        const auto& o = obs_[i];
        if (o.kind == Observable::Kind::tanh_probe) {
            out[i] = std::tanh(inner(u, o.probe));
        } else {
            double e = 0.0;
            for (std::size_t j = 0; j < o.modes; ++j) {
                const double c = basis_->coord(u, j);
                e += c * c;
            }
            out[i] = std::min(e, o.cap) / (2.0 * std::sqrt(o.cap));
        }
    }
    return out;
}

namespace {

std::vector<double> column_means(const ObservableSamples& s, const std::vector<std::size_t>& idx,
                                 std::size_t k) {
    std::vector<double> m(k, 0.0);
    for (std::size_t r : idx)
        for (std::size_t i = 0; i < k; ++i) m[i] += s[r][i];
    for (auto& x : m) x /= static_cast<double>(idx.size());
    return m;
}

}  // namespace

DualLipschitzEstimate estimate_dual_lipschitz(const ObservableSamples& a, const ObservableSamples& b,
                                              int n_boot, std::uint64_t seed) {
    if (a.empty() || b.empty()) throw std::invalid_argument("dual Lipschitz: empty ensemble");
    const std::size_t k = a.front().size();
    for (const auto& r : a)
        if (r.size() != k) throw std::invalid_argument("dual Lipschitz: ragged samples");
    for (const auto& r : b)
        if (r.size() != k) throw std::invalid_argument("dual Lipschitz: ragged samples");
    if (k == 0) return {};

    std::vector<std::size_t> ia(a.size()), ib(b.size());
    for (std::size_t i = 0; i < ia.size(); ++i) ia[i] = i;
    for (std::size_t i = 0; i < ib.size(); ++i) ib[i] = i;
    const auto ma = column_means(a, ia, k), mb = column_means(b, ib, k);

    DualLipschitzEstimate est;
    est.diffs.resize(k);
    est.diff_se.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        est.diffs[i] = std::abs(ma[i] - mb[i]);
        std::vector<double> ca(a.size()), cb(b.size());
        for (std::size_t r = 0; r < a.size(); ++r) ca[r] = a[r][i];
        for (std::size_t r = 0; r < b.size(); ++r) cb[r] = b[r][i];
        const auto sa = mean_se(ca), sb = mean_se(cb);
        est.diff_se[i] = std::sqrt(sa.se * sa.se + sb.se * sb.se);
        if (est.diffs[i] > est.value) {
            est.value = est.diffs[i];
            est.argmax = i;
        }
    }
    if (n_boot > 1) {
        std::mt19937_64 gen(seed);
        std::uniform_int_distribution<std::size_t> da(0, a.size() - 1), db(0, b.size() - 1);
        std::vector<double> boot(static_cast<std::size_t>(n_boot));
        for (auto& v : boot) {
            for (auto& x : ia) x = da(gen);
            for (auto& x : ib) x = db(gen);
            const auto ba = column_means(a, ia, k), bb = column_means(b, ib, k);
            double mx = 0.0;
            for (std::size_t i = 0; i < k; ++i) mx = std::max(mx, std::abs(ba[i] - bb[i]));
            v = mx;
        }
        est.se = mean_se(boot).sd;
    }
    return est;
}

DualLipschitzEstimate estimate_dual_lipschitz(const std::vector<SpectralField>& a,
                                              const std::vector<SpectralField>& b,
                                              const ObservableDictionary& dict, int n_boot,
                                              std::uint64_t seed) {
    ObservableSamples sa, sb;
    sa.reserve(a.size());
    sb.reserve(b.size());
    for (const auto& u : a) sa.push_back(dict.evaluate(u));
    for (const auto& u : b) sb.push_back(dict.evaluate(u));
    return estimate_dual_lipschitz(sa, sb, n_boot, seed);
}

namespace {

double aic(double rss, std::size_t n) {
    const double floor = 1e-300;
    return static_cast<double>(n) * std::log(std::max(rss, floor) / static_cast<double>(n)) + 4.0;
}

}  // namespace

MixingFit fit_mixing_rate(const std::vector<double>& t, const std::vector<double>& D,
                          const std::vector<double>& se, int n_boot, std::uint64_t seed) {
    if (t.size() != D.size() || (!se.empty() && se.size() != D.size()))
        throw std::invalid_argument("fit_mixing_rate: size mismatch");
    if (t.size() < 4) throw std::invalid_argument("fit_mixing_rate: need at least 4 points");
    MixingFit fit;
    fit.censored.assign(t.size(), false);
    std::vector<double> lx, tx, ly, sy;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double s = se.empty() ? 0.0 : se[i];
        if (!(D[i] > 0.0) || D[i] <= 2.0 * s) {
            fit.censored[i] = true;
            continue;
        }
        lx.push_back(std::log1p(t[i]));
        tx.push_back(t[i]);
        ly.push_back(std::log(D[i]));
        sy.push_back(s / D[i]);
    }
    fit.n_used = lx.size();
    if (fit.n_used < 3) throw std::invalid_argument("fit_mixing_rate: fewer than 3 uncensored points");

    const LinearFit pf = linear_fit(lx, ly);
    const LinearFit ef = linear_fit(tx, ly);
    fit.q_hat = -pf.slope;
    fit.q_se = pf.slope_se;
    fit.log_C = pf.intercept;
    fit.exp_rate = -ef.slope;
    fit.exp_rate_se = ef.slope_se;
    fit.exp_intercept = ef.intercept;
    fit.aic_power = aic(pf.rss, fit.n_used);
    fit.aic_exp = aic(ef.rss, fit.n_used);

    // parametric bootstrap on log D with delta-method errors, plus residual resampling
    std::vector<double> qs;
    if (n_boot > 1) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> nd;
        std::vector<double> resid(fit.n_used);
        for (std::size_t i = 0; i < fit.n_used; ++i) resid[i] = ly[i] - pf.intercept - pf.slope * lx[i];
        std::uniform_int_distribution<std::size_t> pick(0, fit.n_used - 1);
        std::vector<double> yb(fit.n_used);
        qs.reserve(static_cast<std::size_t>(n_boot));
        for (int b = 0; b < n_boot; ++b) {
            for (std::size_t i = 0; i < fit.n_used; ++i)
                yb[i] = pf.intercept + pf.slope * lx[i] + resid[pick(gen)] + sy[i] * nd(gen);
            qs.push_back(-linear_fit(lx, yb).slope);
        }
        fit.q_ci = percentile_interval(qs);
    } else {
        fit.q_ci = {fit.q_hat, fit.q_hat};
    }
    return fit;
}

}  // namespace ns2d
