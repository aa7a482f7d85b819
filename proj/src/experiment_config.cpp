#include "ns2d/experiment_config.hpp"

#include "ns2d/snapshot_io.hpp"
#include "ns2d/spectral_ops.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ns2d {

namespace {

using ojson = nlohmann::ordered_json;

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument(std::string("config: unknown key '") + it.key() + "' in " + where);
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::validate() const {
    make_grid();
    integrator_config().validate();
    if (outputs.stride < 1) throw std::invalid_argument("config: outputs.stride must be >= 1");
    if (ensemble.n_members < 0 || ensemble.n_pairs < 0)
        throw std::invalid_argument("config: ensemble sizes must be non-negative");
    if (coupling.N > noise.N_active) throw std::invalid_argument("config: coupling.N exceeds N_active");
    if (!(coupling.T_block > 0.0)) throw std::invalid_argument("config: coupling.T_block must be positive");
    if (!(coupling.d >= 0.0)) throw std::invalid_argument("config: coupling.d must be non-negative");
    if (coupling.n_blocks < 0) throw std::invalid_argument("config: coupling.n_blocks must be >= 0");
    stopping_rule().validate();
    if (initial.kind != "zero" && initial.kind != "random" && initial.kind != "mode")
        throw std::invalid_argument("config: initial.kind must be zero, random or mode");
    if (!(initial.amplitude >= 0.0)) throw std::invalid_argument("config: initial.amplitude must be >= 0");
}

Grid ExperimentConfig::make_grid() const { return Grid(grid.L, grid.M, grid.dealias_fraction); }

IntegratorConfig ExperimentConfig::integrator_config() const {
    IntegratorConfig ic;
    ic.dt = integrator.dt;
    ic.scheme = integrator.scheme;
    ic.a = physics.a;
    ic.nu = physics.nu;
    ic.T_horizon = integrator.T_horizon;
    ic.record_stride = outputs.stride;
    return ic;
}

StoppingRule ExperimentConfig::stopping_rule() const {
    StoppingRule r;
    r.K = coupling.K;
    r.L = coupling.L_rate;
    r.rho = coupling.rho;
    r.C_script = coupling.C_script;
    return r;
}

CouplingConfig ExperimentConfig::coupling_config() const {
    CouplingConfig cc;
    cc.N = coupling.N;
    cc.T_block = coupling.T_block;
    cc.rule = stopping_rule();
    return cc;
}

std::string serialize(const ExperimentConfig& c) {
    ojson j;
    j["grid"] = {{"L", c.grid.L}, {"M", c.grid.M}, {"dealias_fraction", c.grid.dealias_fraction}};
    j["physics"] = {{"a", c.physics.a}, {"nu", c.physics.nu}};
    j["noise"] = ojson::parse(serialize(c.noise));
    j["integrator"] = {{"dt", c.integrator.dt},
                       {"scheme", to_string(c.integrator.scheme)},
                       {"T_horizon", c.integrator.T_horizon}};
    j["coupling"] = {{"N", c.coupling.N},         {"T_block", c.coupling.T_block},
                     {"d", c.coupling.d},         {"K", c.coupling.K},
                     {"L_rate", c.coupling.L_rate}, {"rho", c.coupling.rho},
                     {"C_script", c.coupling.C_script}, {"n_blocks", c.coupling.n_blocks}};
    j["ensemble"] = {{"n_members", c.ensemble.n_members}, {"n_pairs", c.ensemble.n_pairs}};
    j["initial"] = {{"kind", c.initial.kind},
                    {"amplitude", c.initial.amplitude},
                    {"decay", c.initial.decay},
                    {"mode", c.initial.mode}};
    j["outputs"] = {{"directory", c.outputs.directory}, {"stride", c.outputs.stride}};
    return j.dump(2);
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig c;
    try {
        const auto j = nlohmann::json::parse(text);
        reject_unknown(j, {"grid", "physics", "noise", "integrator", "coupling", "ensemble", "initial", "outputs"},
                       "top level");
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            reject_unknown(g, {"L", "M", "dealias_fraction"}, "grid");
            read(g, "L", c.grid.L);
            read(g, "M", c.grid.M);
            read(g, "dealias_fraction", c.grid.dealias_fraction);
        }
        if (j.contains("physics")) {
            const auto& p = j["physics"];
            reject_unknown(p, {"a", "nu"}, "physics");
            read(p, "a", c.physics.a);
            read(p, "nu", c.physics.nu);
        }
        if (j.contains("noise")) {
            const auto& n = j["noise"];
            reject_unknown(n, {"J", "s", "b0", "N_active", "seed", "h_coeffs", "relaxed_h"}, "noise");
            read(n, "J", c.noise.J);
            read(n, "s", c.noise.s);
            read(n, "b0", c.noise.b0);
            read(n, "N_active", c.noise.N_active);
            read(n, "seed", c.noise.seed);
            read(n, "h_coeffs", c.noise.h_coeffs);
            read(n, "relaxed_h", c.noise.relaxed_h);
        }
        if (j.contains("integrator")) {
            const auto& i = j["integrator"];
            reject_unknown(i, {"dt", "scheme", "T_horizon"}, "integrator");
            read(i, "dt", c.integrator.dt);
            read(i, "T_horizon", c.integrator.T_horizon);
            if (i.contains("scheme")) c.integrator.scheme = parse_scheme(i["scheme"].get<std::string>());
        }
        if (j.contains("coupling")) {
            const auto& k = j["coupling"];
            reject_unknown(k, {"N", "T_block", "d", "K", "L_rate", "rho", "C_script", "n_blocks"}, "coupling");
            read(k, "N", c.coupling.N);
            read(k, "T_block", c.coupling.T_block);
            read(k, "d", c.coupling.d);
            read(k, "K", c.coupling.K);
            read(k, "L_rate", c.coupling.L_rate);
            read(k, "rho", c.coupling.rho);
            read(k, "C_script", c.coupling.C_script);
            read(k, "n_blocks", c.coupling.n_blocks);
        }
        if (j.contains("ensemble")) {
            const auto& e = j["ensemble"];
            reject_unknown(e, {"n_members", "n_pairs"}, "ensemble");
            read(e, "n_members", c.ensemble.n_members);
            read(e, "n_pairs", c.ensemble.n_pairs);
        }
        if (j.contains("initial")) {
            const auto& i = j["initial"];
            reject_unknown(i, {"kind", "amplitude", "decay", "mode"}, "initial");
            read(i, "kind", c.initial.kind);
            read(i, "amplitude", c.initial.amplitude);
            read(i, "decay", c.initial.decay);
            read(i, "mode", c.initial.mode);
        }
        if (j.contains("outputs")) {
            const auto& o = j["outputs"];
            reject_unknown(o, {"directory", "stride"}, "outputs");
            read(o, "directory", c.outputs.directory);
            read(o, "stride", c.outputs.stride);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_experiment_config(ss.str());
}

std::shared_ptr<const NoiseSpec> make_spec(const ExperimentConfig& c) {
    return std::make_shared<const NoiseSpec>(build_spec(c.noise, c.make_grid()));
}

Dynamics make_dynamics(const ExperimentConfig& c) { return Dynamics(make_spec(c), c.integrator_config()); }

SpectralField initial_condition(const ExperimentConfig& c, const DivFreeBasis& basis, std::uint32_t member) {
    const Grid& g = basis.grid();
    if (c.initial.kind == "zero" || c.initial.amplitude == 0.0) return SpectralField(g);
    SpectralField u(g);
    if (c.initial.kind == "mode") {
        u = basis.field(c.initial.mode);
    } else {
        const CounterRng rng(c.noise.seed);
        u = random_divfree_field(g, rng, {member, 5, 0}, 0, c.initial.decay);
    }
    const double n = l2_norm(u);
    if (n > 0.0) u *= c.initial.amplitude / n;
    return u;
}

}  // namespace ns2d
