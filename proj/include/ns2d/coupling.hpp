#pragma once

#include "ns2d/dynamics.hpp"
#include "ns2d/ledger.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ns2d {

// Product Gaussian with independent coordinates.
struct DiagGaussian {
    std::vector<double> mean;
    std::vector<double> sd;
};

struct CoupledDraw {
    std::vector<double> x, y;
    bool agreed = false;
    std::uint32_t attempts = 0;   // residual proposals used when not agreed
};

// Random sources for one coupled draw: normals for residual proposals come from
// {trajectory, proposal_role, attempt}, uniforms from {trajectory, uniform_role, attempt}.
struct CouplingStreams {
    std::uint32_t trajectory = 0;
    std::uint32_t proposal_role = 3;
    std::uint32_t uniform_role = 4;
};

// Total variation distance between two Gaussians with common diagonal covariance.
double gaussian_tv(const DiagGaussian& a, const DiagGaussian& b);

// Gamma coupling of a and b given a draw x from a. y follows b exactly, and
// P(y != x) = TV(a, b).
CoupledDraw maximal_couple_given_x(std::vector<double> x, const DiagGaussian& a,
                                   const DiagGaussian& b, const CounterRng& rng,
                                   CouplingStreams streams, std::uint64_t step);
// Draws x from a itself (stream {trajectory, proposal_role, 0}) and couples.
CoupledDraw maximal_couple_step(const DiagGaussian& a, const DiagGaussian& b, const CounterRng& rng,
                                CouplingStreams streams, std::uint64_t step);

// -P_N[B(u) - B(v) - nu Lap(u - v)], or zero once truncated
SpectralField girsanov_drift(const Dynamics& dyn, const SpectralField& u_hat,
                             const SpectralField& v_hat, std::size_t N, bool truncated);

// 1/2 (exp(6 J / b_min^2)^(1/2) - 1)^(1/2), clipped to [0, 1]
double tv_bound_from_novikov(double J, double b_min);

struct CouplingConfig {
    std::size_t N = 8;
    double T_block = 1.0;
    std::optional<StoppingRule> rule;      // no ledgers when absent
    double novikov_cap = std::numeric_limits<double>::infinity();
    bool keep_ledger_history = false;

    void validate(const Dynamics& dyn) const;
};

struct CouplingState {
    CouplingState(SpectralField u, SpectralField u_prime)
        : u_tilde(std::move(u)), u_tilde_prime(std::move(u_prime)), v_tilde(u_tilde_prime) {}

    SpectralField u_tilde, u_tilde_prime, v_tilde;
    std::optional<EnergyLedger> ledger_u, ledger_up, ledger_v;
    bool agreement = true;
    bool truncated = false;                 // drift switched off (t past tau)
    std::optional<double> sigma1;
    double tau = std::numeric_limits<double>::infinity();        // tau^v ^ tau^u ^ tau^u'
    double tau_tilde = std::numeric_limits<double>::infinity();  // tau^u ^ tau^u'
    double novikov = 0.0;
    double cn_max = 0.0;                    // max ||A||^2 / (||g||^2 (1 + |u|_1^2 + |v|_1^2))
    std::uint64_t step = 0;
    std::uint64_t block = 0;
    std::uint32_t pair = 0;

    double time(double dt) const { return static_cast<double>(step) * dt; }
};

CouplingState make_coupling_state(const Dynamics& dyn, const CouplingConfig& cfg,
                                  const SpectralField& u0, const SpectralField& u0_prime,
                                  std::uint32_t pair);

struct CouplingBlockOutcome {
    std::uint64_t k = 0;
    bool coupled = true;          // agreement held through the block end
    double tv_estimate = 0.0;     // 1 - prod(1 - TV_step) over the block
    double novikov = 0.0;         // running integral at block end
    double sep_norm = 0.0;        // ||u_tilde - u_tilde'|| at block end
    bool sigma_hit = false;       // first disagreement inside this block
    bool tau_hit = false;         // tau_tilde detected inside this block
    bool novikov_cap_breached = false;
};

// Advances the pair by one T-block. At the block start the auxiliary path restarts
// from u_tilde' and agreement is restored.
CouplingBlockOutcome run_coupling_block(CouplingState& st, const Dynamics& dyn,
                                        const CouplingConfig& cfg, const CounterRng& rng);

inline double novikov_integral(const CouplingState& st) { return st.novikov; }

// Squeezing classification: sigma = tau_tilde ^ sigma1; Q'' when sigma1 <= tau_tilde.
struct SqueezingEvent {
    enum class Kind { none, q_prime, q_double_prime } kind = Kind::none;
    std::uint64_t k = 0;
    double sigma = std::numeric_limits<double>::infinity();
};
SqueezingEvent classify_squeezing(std::optional<double> sigma1, double tau_tilde, double T);

void write_block_csv(const std::string& path, const std::vector<CouplingBlockOutcome>& rows);

}  // namespace ns2d
