#pragma once

#include "ns2d/basis.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ns2d {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quintic smoothstep cutoff: 1 on |x| <= A, 0 on |x| >= 2A.
double cutoff(double r, double A);

struct PoincareOptions {
    int max_iterations = 400;     // Krylov dimension cap
    double tolerance = 1e-6;      // relative stagnation of the top Ritz value
    int stagnation_window = 5;
    std::uint64_t seed = 12345;
};

struct PoincareEstimate {
    double epsilon = 0.0;
    int iterations = 0;
    double ritz_change = 0.0;
};

// Operator norm of f -> Q_N (chi_A f) from H^s to L^2 on the discrete divergence-free
// band, from Lanczos iteration on the Gram operator.
PoincareEstimate truncated_poincare(const DivFreeBasis& basis, std::size_t N, double A,
                                    double s = 0.5, const PoincareOptions& opt = {});

double truncated_poincare_epsilon(const DivFreeBasis& basis, std::size_t N, double A,
                                  double s = 0.5, const PoincareOptions& opt = {});

struct PoincareLadder {
    std::vector<std::size_t> N;
    std::vector<double> epsilon;
    std::size_t first_below = 0;   // smallest ladder N with epsilon < target, 0 if none
};

PoincareLadder poincare_ladder(const DivFreeBasis& basis, const std::vector<std::size_t>& Ns,
                               double A, double target, double s = 0.5,
                               const PoincareOptions& opt = {});

}  // namespace ns2d
