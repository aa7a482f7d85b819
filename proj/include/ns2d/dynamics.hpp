#pragma once

#include "ns2d/noise.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ns2d {

enum class Scheme { exponential_euler, semi_implicit_euler };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct IntegratorConfig {
    double dt = 1e-2;
    Scheme scheme = Scheme::exponential_euler;
    double a = 1.0;
    double nu = 0.1;
    double T_horizon = 1.0;
    int record_stride = 10;

    void validate() const;
    std::uint64_t steps() const;   // round(T_horizon / dt)
};

struct BlowUpError : std::runtime_error {
    BlowUpError(const std::string& what, std::uint64_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step(step) {}
    std::uint64_t step;
};

// All steppers share the integrating-factor form
//   x_{n+1} = R (x_n + dt * explicit(x_n) + noise increment),
// with R = exp(dt L) (exponential Euler) or (1 - dt L)^{-1} (semi-implicit), L = -a - nu|k|^2.
class Dynamics {
public:
    Dynamics(std::shared_ptr<const NoiseSpec> spec, IntegratorConfig cfg);

    const NoiseSpec& spec() const { return *spec_; }
    const std::shared_ptr<const NoiseSpec>& spec_ptr() const { return spec_; }
    const IntegratorConfig& config() const { return cfg_; }
    const Grid& grid() const { return spec_->grid(); }
    const DivFreeBasis& basis() const { return *spec_->basis; }

    SpectralField step_primal(const SpectralField& u, const WienerIncrement& incr,
                              std::uint64_t step = 0) const;
    ScalarField step_vorticity(const ScalarField& w, const SpectralField& u,
                               const WienerIncrement& incr, std::uint64_t step = 0) const;
    // v-equation with the control P_N[N(u) - N(v) - nu Lap(u - v)] moved to the right side
    SpectralField step_auxiliary_v(const SpectralField& v, const SpectralField& u,
                                   const WienerIncrement& incr, std::size_t N,
                                   std::uint64_t step = 0) const;
    // x' = -a x + Q_N(nu Lap x - N(x)) + h + Lambda; the increment already carries the shift
    SpectralField step_controlled(const SpectralField& x, const WienerIncrement& shifted,
                                  std::size_t N, std::uint64_t step = 0) const;
    // z' = -a z + nu Lap z, exact per mode
    SpectralField step_linear_truncation(const SpectralField& z) const;
    // g' = -a g - Q_N[N(u) - N(v) - nu Lap g]; P_N g is advanced by exp(-a dt) exactly
    SpectralField step_difference_g(const SpectralField& g, const SpectralField& u,
                                    const SpectralField& v, std::size_t N,
                                    std::uint64_t step = 0) const;

    // drift whose time integral turns the u-noise into the v-noise:
    // -P_N[N(u) - N(v) - nu Lap(u - v)]
    SpectralField control_drift(const SpectralField& u, const SpectralField& v, std::size_t N) const;
    // P_N(nu Lap u - N(u)): shift that feeds step_controlled so it replays the auxiliary v
    SpectralField controlled_shift(const SpectralField& u, std::size_t N) const;

    double linear_factor(std::size_t mode) const { return R_[mode]; }

private:
    SpectralField apply_R(SpectralField x) const;
    void guard(const SpectralField& u, std::uint64_t step, const char* who) const;

    std::shared_ptr<const NoiseSpec> spec_;
    IntegratorConfig cfg_;
    std::vector<double> R_;       // scheme factor per spectral index
    std::vector<double> Rexact_;  // exp(dt L)
    std::vector<double> kk_;
};

// Record of one trajectory, columns (t, L2, H1, enstrophy, psiL2, psiGrad, psiVortL2, psiVortGrad).
struct TrajectoryRow {
    double t, L2, H1, enstrophy, psiL2, psiGrad, psiVortL2, psiVortGrad;
};

struct WeightedNorms {
    double psi_u = 0.0, psi_grad_u = 0.0, psi_w = 0.0, psi_grad_w = 0.0;   // squared
};
// ||psi(t) u||^2, ||psi(t) grad u||^2, ||psi(t) w||^2, ||psi(t) grad w||^2 by grid quadrature
WeightedNorms weighted_norms(const SpectralField& u, double t);

TrajectoryRow trajectory_row(double t, const SpectralField& u);
void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows);

}  // namespace ns2d
