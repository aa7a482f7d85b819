#pragma once

#include "ns2d/experiment_config.hpp"

#include <string>
#include <vector>

namespace ns2d {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool passed() const;
    std::string to_json() const;
    void append(const VerifyReport& other);
};

VerifyReport verify_operators(const ExperimentConfig& cfg, int n_fields = 20);
VerifyReport verify_weights(const ExperimentConfig& cfg);
VerifyReport verify_ledger(const ExperimentConfig& cfg);
VerifyReport verify_coupling(const ExperimentConfig& cfg);
VerifyReport verify_dynamics(const ExperimentConfig& cfg);
// all of the above
VerifyReport verify_suite(const ExperimentConfig& cfg);

// Relative tolerance of psi-weighted grid quadrature at grid size M (loosens as 1/M^2).
double weight_quadrature_tolerance(int M);

}  // namespace ns2d
