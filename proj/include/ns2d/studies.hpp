#pragma once

#include "ns2d/coupling.hpp"
#include "ns2d/experiment.hpp"
#include "ns2d/mixing.hpp"

#include <array>
#include <optional>
#include <vector>

namespace ns2d {

// Two ensembles started at +R e_0 and -R e_0, compared on a t-ladder.
struct MixingStudyOptions {
    double R = 3.0;
    std::vector<double> ts{0.5, 1.0, 1.5, 2.0, 2.5};
    int n_members = 500;
    std::size_t n_probes = 4;
    int threads = 1;
};
struct MixingStudyResult {
    std::vector<double> ts, D, se;
    std::vector<std::size_t> argmax;
    bool strictly_decreasing = false;   // every consecutive drop exceeds 3 combined SE
    MixingFit fit;
};
MixingStudyResult run_mixing_study(const ExperimentConfig& cfg, const MixingStudyOptions& opt);

// Controlled pairs (u, v) with v started at distance d; slope of log ||u - v|| in t.
struct FoiasProdiOptions {
    std::vector<std::size_t> Ns{0, 1, 2, 4, 8};
    int n_pairs = 20;
    double T = 4.0;
    double d = 0.5;
    double u_amplitude = 1.0;
    int threads = 1;
};
struct FoiasProdiRow {
    std::size_t N = 0;
    std::vector<double> slopes;
    double max_slope = 0.0;
};
struct FoiasProdiResult {
    std::vector<FoiasProdiRow> rows;
    std::optional<std::size_t> threshold;   // smallest ladder N with every slope <= -a/2
    bool holds_above_threshold = false;
};
FoiasProdiResult foias_prodi_study(const ExperimentConfig& cfg, const FoiasProdiOptions& opt);

// Novikov integral over one block for separations d along e_0, common random numbers.
struct NovikovLadder {
    std::vector<double> ds, J;
    double slope = 0.0;
};
NovikovLadder novikov_d_ladder(const ExperimentConfig& cfg, const std::vector<double>& ds,
                               double T, std::uint32_t pair = 0);

// Energy of u_tilde and u_tilde' after n_blocks against independent plain ensembles.
struct MarginalStudy {
    MeanSe coupled_u, coupled_up, plain_u, plain_up;
    double z_u = 0.0, z_up = 0.0;
    double decouple_fraction = 0.0;
};
MarginalStudy coupling_marginal_study(const ExperimentConfig& cfg, int n_members, int n_blocks,
                                      int threads);

struct IrreducibilityResult {
    struct Direction {
        std::size_t hits = 0, n = 0;
        double p_hat = 0.0;
        Interval ci;
    };
    std::vector<Direction> directions;
    double min_p = 0.0;
    Interval min_ci;
    bool positive = false;   // lower Wilson bound of the worst direction > 0
};
IrreducibilityResult irreducibility_probe(const ExperimentConfig& cfg, double R, double d, double T,
                                          int n_directions = 10, int n_samples = 200, int threads = 1);

// Deterministic energy balance |E(T) - E(0) - int 2(-a|u|^2 - nu|grad u|^2 + <h,u>)| / (T max(E0, 1)).
double energy_balance_residual(const ExperimentConfig& cfg, const SpectralField& u0, double T);

// E ||u(t1)||^2 / t1 from u0 = 0 against B0.
struct ItoDrift {
    MeanSe slope;
    double B0 = 0.0;
    double rel_error = 0.0;
};
ItoDrift ito_drift_study(const ExperimentConfig& cfg, double t1, int n_members, int threads);

// E ||u(T)||^2 from ||u0|| = r against exp(-c T) r^2 + (B0 + ||h||^2/a)(1 - exp(-c T)) / c,
// c = 2a when h = 0 and c = a otherwise.
struct EnergyEnvelopeRow {
    double r = 0.0;
    MeanSe energy;
    double envelope = 0.0;
};
std::vector<EnergyEnvelopeRow> energy_envelope_study(const ExperimentConfig& cfg,
                                                     const std::vector<double>& radii, double T,
                                                     int n_members, int threads);

struct CoupledPairRun {
    std::uint32_t pair = 0;
    std::vector<CouplingBlockOutcome> blocks;
    std::vector<std::array<double, 2>> pair_norms;   // at block boundaries, starting at 0
    std::optional<double> sigma1;
    double tau_tilde = 0.0;
    SqueezingEvent event;
    StoppingTimeRecord tau_d;
    double cn_max = 0.0;
};
// n_pairs pairs from initial_condition(2p) and a perturbation of size coupling.d.
std::vector<CoupledPairRun> run_coupled_pairs(const ExperimentConfig& cfg, int threads);

}  // namespace ns2d
