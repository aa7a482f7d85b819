#pragma once

#include "ns2d/basis.hpp"
#include "ns2d/rng.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ns2d {

struct NoiseConfig {
    std::size_t J = 64;            // number of forced modes
    double s = 2.0;                // b_j = b0 * j^(-s)
    double b0 = 1.0;
    std::size_t N_active = 8;      // leading modes guaranteed nonzero; h lives in their span
    std::uint64_t seed = 1;
    std::vector<double> h_coeffs;  // coordinates of h in the basis
    bool relaxed_h = false;        // allow h outside the active span

    bool operator==(const NoiseConfig&) const = default;
};

std::string serialize(const NoiseConfig& c);
NoiseConfig parse_noise_config(const std::string& text);

struct NoiseSpec {
    NoiseConfig config;
    std::shared_ptr<const DivFreeBasis> basis;
    std::vector<double> b;   // size J
    SpectralField h;
    double B0 = 0.0, B1 = 0.0, Bphi = 0.0;

    std::size_t J() const { return b.size(); }
    std::size_t N_active() const { return config.N_active; }
    const Grid& grid() const { return basis->grid(); }
};

NoiseSpec build_spec(const NoiseConfig& cfg, const Grid& g);
NoiseSpec build_spec(const NoiseConfig& cfg, std::shared_ptr<const DivFreeBasis> basis);

// ||phi e_j||^2 + ||phi curl e_j||^2 by grid quadrature
double phi_weighted_norm_sq(const DivFreeBasis& basis, std::size_t j);
double orthonormality_residual(const DivFreeBasis& basis, std::size_t count);

// Brownian increments d beta_j over one step, plus an additive Girsanov shift kept
// separately so that shifting and unshifting restores the draw bit for bit.
struct WienerIncrement {
    double dt = 0.0;
    std::vector<double> dbeta;
    std::vector<double> shift;
    std::uint64_t step = 0;
    Stream stream;

    double value(std::size_t j) const { return dbeta[j] + shift[j]; }
    bool operator==(const WienerIncrement&) const = default;
};

WienerIncrement sample_increment(const NoiseSpec& spec, double dt, const CounterRng& rng,
                                 Stream stream, std::uint64_t step);
WienerIncrement zero_increment(const NoiseSpec& spec, double dt, std::uint64_t step = 0);

// Adds drift_j * dt / b_j to coordinate j for j < drift.size().
WienerIncrement girsanov_shift(const WienerIncrement& incr, const NoiseSpec& spec,
                               const std::vector<double>& drift_coords, double dt);
// Field form: drift must lie in span{e_1..e_N}; its first N coordinates are used.
WienerIncrement girsanov_shift(const WienerIncrement& incr, const NoiseSpec& spec,
                               const SpectralField& drift, std::size_t N, double dt);

// log dP_shifted/dP_plain evaluated at the shifted increment
double girsanov_log_ratio(const WienerIncrement& shifted, const NoiseSpec& spec,
                          const std::vector<double>& drift_coords, double dt);

// sum_j b_j value_j e_j
SpectralField noise_field(const NoiseSpec& spec, const WienerIncrement& incr);

}  // namespace ns2d
