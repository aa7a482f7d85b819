#include "ns2d/ledger.hpp"

#include "ns2d/dynamics.hpp"
#include "ns2d/snapshot_io.hpp"
#include "ns2d/spectral_ops.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ns2d {

void StoppingRule::validate() const {
    if (!(K >= 0.0) || !(L >= 0.0) || !(rho >= 0.0) || !(C_script >= 0.0))
        throw std::invalid_argument("stopping rule: parameters must be non-negative");
}

double StoppingRule::tau1_threshold(double t, double u0) const {
    return (K + 2.0 * L) * t + 2.0 * rho + C_script * (1.0 + std::pow(u0, 6));
}

double StoppingRule::tau2_threshold(double t, double u0) const {
    return (K + L) * t + rho + C_script * u0 * u0;
}

std::string StoppingTimeRecord::to_text() const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    if (triggered())
        j["value"] = value;
    else
        j["value"] = "inf";
    j["margin"] = margin;
    j["trigger_term"] = trigger_term;
    return j.dump();
}

namespace {
std::string dominant_term(const EnergyState& s) {
    const std::pair<const char*, double> parts[] = {{"E1", s.E[0]},
                                                    {"E3", s.E[2]},
                                                    {"Etilde_psi", s.Etilde_psi},
                                                    {"E11", s.E1p[0]},
                                                    {"Etilde_1psi", s.Etilde_1psi}};
    const auto* best = &parts[0];
    for (const auto& p : parts)
        if (p.second > best->second) best = &p;
    return best->first;
}
}  // namespace

std::optional<StoppingTimeRecord> check_stop(const EnergyState& s, const StoppingRule& rule) {
    std::optional<StoppingTimeRecord> r1, r2;
    if (rule.mode != StoppingRule::Mode::tau2) {
        const double th = rule.tau1_threshold(s.t, s.u0_norm);
        if (s.E_psi >= th) r1 = StoppingTimeRecord{"tau1", s.t, s.E_psi - th, dominant_term(s)};
    }
    if (rule.mode != StoppingRule::Mode::tau1) {
        const double th = rule.tau2_threshold(s.t, s.u0_norm);
        if (s.E[0] >= th) r2 = StoppingTimeRecord{"tau2", s.t, s.E[0] - th, "E1"};
    }
    if (rule.mode == StoppingRule::Mode::tau1) return r1;
    if (rule.mode == StoppingRule::Mode::tau2) return r2;
    if (r1) {
        r1->kind = "tau";
        return r1;
    }
    if (r2) r2->kind = "tau";
    return r2;
}

EnergyLedger::EnergyLedger(std::shared_ptr<const NoiseSpec> spec, double dt,
                           std::optional<StoppingRule> rule, bool keep_history)
    : spec_(std::move(spec)), dt_(dt), rule_(rule), keep_history_(keep_history) {
    if (!(dt > 0.0)) throw std::invalid_argument("ledger: dt must be positive");
    lag_ = static_cast<int>(std::lround(1.0 / dt));
    if (lag_ < 1 || std::abs(lag_ * dt - 1.0) > 1e-9)
        throw std::invalid_argument("ledger: 1/dt must be an integer");
    if (rule_) rule_->validate();
}

void EnergyLedger::update_martingale(const SpectralField& u, const WienerIncrement& incr) {
    if (incr.dbeta.size() != spec_->J()) throw std::invalid_argument("ledger: increment size mismatch");
    if (expected_step_ && incr.step != *expected_step_)
        throw std::invalid_argument("ledger: mismatched increment stream position");
    expected_step_ = incr.step + 1;
    const double n2 = l2_norm_sq(u);
    const auto c = spec_->basis->coords(u, spec_->J());
    double s = 0.0, q = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        s += spec_->b[j] * c[j] * incr.value(j);
        q += spec_->b[j] * spec_->b[j] * c[j] * c[j];
    }
    for (int p = 1; p <= 3; ++p) {
        M_[p - 1] += 2.0 * p * std::pow(n2, p - 1) * s;
        QV_[p - 1] += 4.0 * p * p * std::pow(n2, 2 * (p - 1)) * q * incr.dt;
        QVb_[p - 1] += 4.0 * p * p * spec_->B0 * std::pow(n2, 2 * p - 1) * incr.dt;
    }
}

void EnergyLedger::push(double t, const SpectralField& u) {
    if (t < last_t_) throw std::invalid_argument("ledger: time regression");
    last_t_ = t;
    const ScalarField w = curl(u);
    Sample smp{};
    smp.t = t;
    smp.u2 = l2_norm_sq(u);
    smp.gu2 = grad_norm_sq(u);
    smp.h1u = std::pow(sobolev_norm(u, 1.0), 2);
    smp.w2 = l2_norm_sq(w);
    smp.gw2 = grad_norm_sq(w);
    {
        const auto& mt = modes_for(w.grid);
        double acc = 0.0;
        for (std::size_t i = 0; i < w.coeffs.size(); ++i) acc += (1.0 + mt.kk[i]) * std::norm(w.coeffs[i]);
        smp.h1w = w.grid.volume() * acc;
    }
    smp.M = M_;
    smp.QV = QV_;
    smp.QVb = QVb_;
    if (!have_u0_) {
        state_.u0_norm = std::sqrt(smp.u2);
        have_u0_ = true;
    }
    ring_.push_back(smp);
    if (static_cast<int>(ring_.size()) <= lag_) return;

    const Sample& a = ring_.front();   // time s
    const Sample& b = ring_.back();    // time s + 1
    const double s = a.t;
    const WeightedNorms wn = weighted_norms(u, s);

    Integrands f{};
    EnergyState inst = state_;
    for (int p = 1; p <= 3; ++p) {
        inst.E[p - 1] = std::pow(a.u2, p);
        f.E[p - 1] = std::pow(a.u2, p - 1) * a.gu2 + std::pow(a.u2, p);
    }
    for (int p = 1; p <= 2; ++p) {
        inst.E1p[p - 1] = std::pow(b.w2, p);
        f.E1p[p - 1] = std::pow(b.w2, p - 1) * b.gw2 + std::pow(b.w2, p);
    }
    inst.Etilde_psi = wn.psi_u;
    f.Et = wn.psi_grad_u + wn.psi_u;
    inst.Etilde_1psi = wn.psi_w;
    f.Et1 = wn.psi_grad_w + wn.psi_w;
    const double instant_psi = a.u2 + a.u2 * a.u2 * a.u2 + wn.psi_u + b.w2 + wn.psi_w;
    f.Epsi = a.h1u + a.u2 * a.u2 * a.gu2 + a.u2 * a.u2 * a.u2 + wn.psi_grad_u + wn.psi_u + b.h1w +
             wn.psi_grad_w + wn.psi_w;

    const double h = ready_ ? 0.5 * (s - state_.t) : 0.0;
    auto trap = [&](double& acc, double fprev, double fnow) { acc += h * (fprev + fnow); };
    for (int p = 0; p < 3; ++p) trap(int_.E[p], prev_.E[p], f.E[p]);
    for (int p = 0; p < 2; ++p) trap(int_.E1p[p], prev_.E1p[p], f.E1p[p]);
    trap(int_.Et, prev_.Et, f.Et);
    trap(int_.Et1, prev_.Et1, f.Et1);
    trap(int_.Epsi, prev_.Epsi, f.Epsi);

    EnergyState next = inst;
    for (int p = 0; p < 3; ++p) next.E[p] += int_.E[p];
    for (int p = 0; p < 2; ++p) next.E1p[p] += int_.E1p[p];
    next.Etilde_psi += int_.Et;
    next.Etilde_1psi += int_.Et1;
    next.E_psi = instant_psi + int_.Epsi;
    next.E_psi_integral = int_.Epsi;
    next.t = s;
    next.M = a.M;
    next.QV = a.QV;
    next.QV_bound = a.QVb;

    state_ = next;
    prev_ = f;
    ready_ = true;
    ring_.pop_front();

    if (keep_history_) history_.push_back(state_);
    if (rule_) {
        StoppingRule r1 = *rule_, r2 = *rule_;
        r1.mode = StoppingRule::Mode::tau1;
        r2.mode = StoppingRule::Mode::tau2;
        if (!tau1_.triggered())
            if (auto rec = check_stop(state_, r1)) tau1_ = *rec;
        if (!tau2_.triggered())
            if (auto rec = check_stop(state_, r2)) tau2_ = *rec;
        if (tau_detected_ == std::numeric_limits<double>::infinity() && tau().triggered())
            tau_detected_ = t;
    }
}

StoppingTimeRecord EnergyLedger::tau() const {
    if (!rule_) return StoppingTimeRecord::never("tau");
    switch (rule_->mode) {
        case StoppingRule::Mode::tau1: return tau1_;
        case StoppingRule::Mode::tau2: return tau2_;
        case StoppingRule::Mode::combined: {
            StoppingTimeRecord r = tau1_.value <= tau2_.value ? tau1_ : tau2_;
            r.kind = "tau";
            return r;
        }
    }
    return StoppingTimeRecord::never("tau");
}

double EnergyLedger::composite_residual() const {
    const double c = state_.composite();
    const double scale = std::max({std::abs(c), std::abs(state_.E_psi), 1e-300});
    return std::abs(state_.E_psi - c) / scale;
}

void write_ledger_csv(const std::string& path, const std::vector<EnergyState>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os << "t,E1,E2,E3,E11,E12,Etilde_psi,Etilde_1psi,E_psi,M1,QV1\n" << std::setprecision(17);
    for (const auto& s : rows)
        os << s.t << ',' << s.E[0] << ',' << s.E[1] << ',' << s.E[2] << ',' << s.E1p[0] << ','
           << s.E1p[1] << ',' << s.Etilde_psi << ',' << s.Etilde_1psi << ',' << s.E_psi << ','
           << s.M[0] << ',' << s.QV[0] << '\n';
    if (!os) throw IoError("write failed for " + path);
}

StoppingTimeRecord recurrence_time(const std::vector<std::array<double, 2>>& pair_norms, double d,
                                   double T) {
    StoppingTimeRecord r = StoppingTimeRecord::never("tau_d");
    for (std::size_t k = 0; k < pair_norms.size(); ++k) {
        const auto& p = pair_norms[k];
        if (p[0] <= d && p[1] <= d) {
            r.value = static_cast<double>(k);
            r.margin = d - std::max(p[0], p[1]);
            std::ostringstream os;
            os << std::setprecision(17) << "t=" << k * T << ";norms=" << p[0] << "/" << p[1];
            r.trigger_term = os.str();
            return r;
        }
    }
    return r;
}

}  // namespace ns2d
