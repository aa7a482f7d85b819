#pragma once

#include "ns2d/noise.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ns2d {

// Values at ledger time s. Terms that involve u(s+1), w(s+1) can only be formed once the
// simulation has reached s + 1, so the ledger runs one time unit behind the trajectory.
struct EnergyState {
    double t = 0.0;
    std::array<double, 3> E{};      // E_p, p = 1, 2, 3
    std::array<double, 2> E1p{};    // vorticity family, p = 1, 2
    double Etilde_psi = 0.0;
    double Etilde_1psi = 0.0;
    double E_psi = 0.0;             // accumulated on its own, not summed from the parts
    double E_psi_integral = 0.0;    // time-integral part of E_psi
    std::array<double, 3> M{};      // martingales M_p
    std::array<double, 3> QV{};     // <M_p>
    std::array<double, 3> QV_bound{};  // 4 p^2 B0 int ||u||^(4p-2)
    double u0_norm = 0.0;

    double composite() const { return E[0] + E[2] + Etilde_psi + E1p[0] + Etilde_1psi; }
};

struct StoppingRule {
    enum class Mode { tau1, tau2, combined };
    double K = 20.0;
    double L = 5.0;
    double rho = 20.0;
    double C_script = 1.0;
    Mode mode = Mode::combined;

    void validate() const;
    double tau1_threshold(double t, double u0_norm) const;
    double tau2_threshold(double t, double u0_norm) const;
};

struct StoppingTimeRecord {
    std::string kind;
    double value = std::numeric_limits<double>::infinity();
    double margin = 0.0;
    std::string trigger_term;

    static StoppingTimeRecord never(std::string kind) {
        StoppingTimeRecord r;
        r.kind = std::move(kind);
        return r;
    }
    bool triggered() const { return value != std::numeric_limits<double>::infinity(); }
    std::string to_text() const;   // {kind, value, margin, trigger_term}
};

// Grid-time check of the rule against one state; nullopt if not crossed.
std::optional<StoppingTimeRecord> check_stop(const EnergyState& s, const StoppingRule& rule);

class EnergyLedger {
public:
    // dt: spacing of push() calls; 1/dt must be an integer
    EnergyLedger(std::shared_ptr<const NoiseSpec> spec, double dt,
                 std::optional<StoppingRule> rule = std::nullopt, bool keep_history = false);

    // state of the trajectory at simulation time t (non-decreasing)
    void push(double t, const SpectralField& u);
    // left-point Ito sums for the step that starts at u with the given increment
    void update_martingale(const SpectralField& u, const WienerIncrement& incr);

    bool ready() const { return ready_; }
    const EnergyState& state() const { return state_; }
    const std::vector<EnergyState>& history() const { return history_; }
    double lag() const { return 1.0; }
    int lag_steps() const { return lag_; }

    const StoppingTimeRecord& tau1() const { return tau1_; }
    const StoppingTimeRecord& tau2() const { return tau2_; }
    StoppingTimeRecord tau() const;   // per rule mode
    // simulation time at which tau became known (inf if not)
    double tau_detected_at() const { return tau_detected_; }

    double composite_residual() const;

private:
    struct Sample {
        double t;
        double u2, gu2, h1u;
        double w2, gw2, h1w;
        std::array<double, 3> M, QV, QVb;
    };
    struct Integrands {
        std::array<double, 3> E;
        std::array<double, 2> E1p;
        double Et, Et1, Epsi;
    };

    std::shared_ptr<const NoiseSpec> spec_;
    double dt_;
    int lag_;
    std::optional<StoppingRule> rule_;
    bool keep_history_;
    std::deque<Sample> ring_;
    bool ready_ = false;
    bool have_u0_ = false;
    EnergyState state_;
    Integrands prev_{};
    Integrands int_{};
    std::array<double, 3> M_{}, QV_{}, QVb_{};
    std::optional<std::uint64_t> expected_step_;
    double last_t_ = -std::numeric_limits<double>::infinity();
    StoppingTimeRecord tau1_ = StoppingTimeRecord::never("tau1");
    StoppingTimeRecord tau2_ = StoppingTimeRecord::never("tau2");
    double tau_detected_ = std::numeric_limits<double>::infinity();
    std::vector<EnergyState> history_;
};

void write_ledger_csv(const std::string& path, const std::vector<EnergyState>& rows);

// First k with both norms <= d (closed ball); value is k, inf if never.
StoppingTimeRecord recurrence_time(const std::vector<std::array<double, 2>>& pair_norms, double d,
                                   double T);

}  // namespace ns2d
