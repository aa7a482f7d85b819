#pragma once

#include "ns2d/coupling.hpp"
#include "ns2d/dynamics.hpp"
#include "ns2d/ledger.hpp"
#include "ns2d/noise.hpp"

#include <memory>
#include <string>

namespace ns2d {

struct ExperimentConfig {
    struct GridSection {
        double L = 3.141592653589793;
        int M = 32;
        double dealias_fraction = 2.0 / 3.0;
        bool operator==(const GridSection&) const = default;
    } grid;
    struct Physics {
        double a = 1.0;
        double nu = 0.1;
        bool operator==(const Physics&) const = default;
    } physics;
    NoiseConfig noise;   // carries h_coeffs
    struct Integrator {
        double dt = 1e-2;
        Scheme scheme = Scheme::exponential_euler;
        double T_horizon = 1.0;
        bool operator==(const Integrator&) const = default;
    } integrator;
    struct Coupling {
        std::size_t N = 8;
        double T_block = 1.0;
        double d = 0.1;
        double K = 20.0;
        double L_rate = 5.0;
        double rho = 20.0;
        double C_script = 1.0;
        int n_blocks = 5;
        bool operator==(const Coupling&) const = default;
    } coupling;
    struct Ensemble {
        int n_members = 8;
        int n_pairs = 4;
        bool operator==(const Ensemble&) const = default;
    } ensemble;
    struct Initial {
        std::string kind = "zero";   // zero | random | mode
        double amplitude = 0.0;      // L2 norm of the initial field
        double decay = 2.0;          // spectrum exponent for random
        std::size_t mode = 0;        // basis index for mode
        bool operator==(const Initial&) const = default;
    } initial;
    struct Outputs {
        std::string directory = "out";
        int stride = 10;
        bool operator==(const Outputs&) const = default;
    } outputs;

    bool operator==(const ExperimentConfig&) const = default;

    void validate() const;
    Grid make_grid() const;
    IntegratorConfig integrator_config() const;
    StoppingRule stopping_rule() const;
    CouplingConfig coupling_config() const;
};

std::string serialize(const ExperimentConfig& c);
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

std::shared_ptr<const NoiseSpec> make_spec(const ExperimentConfig& c);
Dynamics make_dynamics(const ExperimentConfig& c);

// Initial condition for ensemble member `member`; random draws use role 5.
SpectralField initial_condition(const ExperimentConfig& c, const DivFreeBasis& basis,
                                std::uint32_t member);

}  // namespace ns2d
