#pragma once

#include "ns2d/basis.hpp"
#include "ns2d/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ns2d {

// Bounded Lipschitz observables on H, each normalized to Lipschitz constant <= 1.
class ObservableDictionary {
public:
    struct Observable {
        enum class Kind { tanh_probe, capped_energy } kind;
        SpectralField probe;     // tanh_probe: f(u) = scale * tanh(<u, probe>)
        std::size_t modes = 0;   // capped_energy: min(||P_m u||^2, cap) / (2 sqrt(cap))
        double cap = 0.0;
        double bound = 1.0;      // sup |f|
        double lipschitz = 1.0;
        std::string name;
    };

    // tanh(<u, e_j>) for j < n_probes and capped low-mode energies for each m in energy_modes
    static ObservableDictionary standard(const DivFreeBasis& basis, std::size_t n_probes,
                                         const std::vector<std::size_t>& energy_modes = {},
                                         double cap = 4.0);

    void add_probe(const SpectralField& g, std::string name);
    void add_capped_energy(const DivFreeBasis& basis, std::size_t m, double cap);

    std::size_t size() const { return obs_.size(); }
    const Observable& operator[](std::size_t i) const { return obs_[i]; }
    std::vector<double> evaluate(const SpectralField& u) const;

private:
    std::vector<Observable> obs_;
    const DivFreeBasis* basis_ = nullptr;
};

// rows: members, columns: observables
using ObservableSamples = std::vector<std::vector<double>>;

struct DualLipschitzEstimate {
    double value = 0.0;   // max_i |avg_A f_i - avg_B f_i|
    double se = 0.0;      // bootstrap standard error of value
    std::size_t argmax = 0;
    std::vector<double> diffs;
    std::vector<double> diff_se;   // analytic standard error per observable
};

DualLipschitzEstimate estimate_dual_lipschitz(const ObservableSamples& a, const ObservableSamples& b,
                                              int n_boot = 200, std::uint64_t seed = 7);
DualLipschitzEstimate estimate_dual_lipschitz(const std::vector<SpectralField>& a,
                                              const std::vector<SpectralField>& b,
                                              const ObservableDictionary& dict, int n_boot = 200,
                                              std::uint64_t seed = 7);

struct MixingFit {
    double q_hat = 0.0;         // log D = log C - q log(1 + t)
    double q_se = 0.0;
    double log_C = 0.0;
    double exp_rate = 0.0;      // log D = c0 - rate t
    double exp_rate_se = 0.0;
    double exp_intercept = 0.0;
    double aic_power = 0.0;
    double aic_exp = 0.0;
    Interval q_ci{};            // bootstrap percentile interval
    std::vector<bool> censored;
    std::size_t n_used = 0;
    bool power_preferred() const { return aic_power < aic_exp; }
};

// Points with D <= 2 se (or D <= 0) are censored. Needs >= 4 points and >= 3 uncensored.
MixingFit fit_mixing_rate(const std::vector<double>& t, const std::vector<double>& D,
                          const std::vector<double>& se = {}, int n_boot = 1000,
                          std::uint64_t seed = 11);

}  // namespace ns2d
