// Batch driver: simulate, couple, mixing, recurrence, verify-*, fit.
#include "ns2d/experiment.hpp"
#include "ns2d/snapshot_io.hpp"
#include "ns2d/studies.hpp"
#include "ns2d/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ns2d;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kCheckFailed = 2, kBlowUp = 3, kIo = 4 };

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "experiment configuration (JSON)");
    sub->add_option("--seed", c.seed, "override noise.seed");
    sub->add_option("--out-dir", c.out_dir, "override outputs.directory");
    sub->add_option("--threads", c.threads, "worker threads (0 = hardware)");
}

ExperimentConfig resolve(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_experiment_config(c.config);
    if (c.seed) cfg.noise.seed = *c.seed;
    if (c.out_dir) cfg.outputs.directory = *c.out_dir;
    cfg.validate();
    return cfg;
}

int threads_of(const Common& c) { return c.threads > 0 ? c.threads : default_threads(); }

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.outputs.directory) / name).string();
}

void finish(const ExperimentConfig& cfg, std::vector<std::string> files) {
    ExperimentConfig recorded = cfg;
    recorded.outputs.directory = ".";
    write_text(path_in(cfg, "config.json"), serialize(recorded) + "\n");
    files.push_back("config.json");
    const std::string m = write_manifest(cfg.outputs.directory, build_manifest(cfg.outputs.directory, files));
    std::cout << "manifest: " << m << "\n";
}

std::string num(double x) {
    if (std::isinf(x)) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

int cmd_simulate(const Common& c) {
    const ExperimentConfig cfg = resolve(c);
    const EnsembleResult res = run_ensemble(cfg, threads_of(c));
    int blown = 0;
    for (const auto& m : res.members) blown += m.blew_up;
    std::cout << "members: " << res.members.size() << " blow-ups: " << blown << "\n"
              << "manifest: " << res.manifest_path << "\n";
    return blown ? kBlowUp : kOk;
}

ojson pair_summary(const CoupledPairRun& r, double b_min) {
    ojson j;
    j["pair"] = r.pair;
    j["sigma1"] = r.sigma1 ? num(*r.sigma1) : "inf";
    j["tau_tilde"] = num(r.tau_tilde);
    j["event"] = r.event.kind == SqueezingEvent::Kind::none          ? "none"
                 : r.event.kind == SqueezingEvent::Kind::q_prime     ? "Q_prime"
                                                                     : "Q_double_prime";
    j["event_block"] = r.event.k;
    j["tau_d"] = ojson::parse(r.tau_d.to_text());
    const double J = r.blocks.empty() ? 0.0 : r.blocks.back().novikov;
    j["novikov"] = J;
    j["tv_bound"] = tv_bound_from_novikov(J, b_min);
    j["C_N_measured"] = r.cn_max;
    return j;
}

double b_min_active(const ExperimentConfig& cfg) {
    const auto spec = make_spec(cfg);
    double b = INFINITY;
    for (std::size_t j = 0; j < std::max<std::size_t>(cfg.coupling.N, 1) && j < spec->J(); ++j)
        b = std::min(b, std::abs(spec->b[j]));
    return b;
}

int cmd_couple(const Common& c) {
    const ExperimentConfig cfg = resolve(c);
    ensure_directory(cfg.outputs.directory);
    const auto runs = run_coupled_pairs(cfg, threads_of(c));
    const double bmin = b_min_active(cfg);
    std::vector<std::string> files;
    ojson summary;
    summary["pairs"] = ojson::array();
    int decoupled = 0;
    for (const auto& r : runs) {
        char name[64];
        std::snprintf(name, sizeof name, "blocks_%04u.csv", r.pair);
        write_block_csv(path_in(cfg, name), r.blocks);
        files.push_back(name);
        summary["pairs"].push_back(pair_summary(r, bmin));
        decoupled += r.sigma1.has_value();
    }
    summary["decoupled_fraction"] = runs.empty() ? 0.0 : decoupled / static_cast<double>(runs.size());
    write_text(path_in(cfg, "coupling_summary.json"), summary.dump(2) + "\n");
    files.push_back("coupling_summary.json");
    std::cout << "pairs: " << runs.size() << " decoupled: " << decoupled << "\n";
    finish(cfg, files);
    return kOk;
}

int cmd_recurrence(const Common& c, const std::vector<double>& deltas) {
    const ExperimentConfig cfg = resolve(c);
    ensure_directory(cfg.outputs.directory);
    const auto runs = run_coupled_pairs(cfg, threads_of(c));
    std::ofstream os(path_in(cfg, "recurrence.csv"));
    if (!os) throw IoError("cannot open recurrence.csv");
    os << "pair,tau_d,norm_u,norm_u_prime\n";
    std::vector<double> taus;
    for (const auto& r : runs) {
        const bool hit = r.tau_d.triggered();
        const auto k = hit ? static_cast<std::size_t>(r.tau_d.value) : r.pair_norms.size() - 1;
        os << r.pair << ',' << (hit ? num(r.tau_d.value) : "inf") << ',' << num(r.pair_norms[k][0]) << ','
           << num(r.pair_norms[k][1]) << '\n';
        taus.push_back(hit ? r.tau_d.value : INFINITY);
    }
    os.close();
    ojson j;
    j["d"] = cfg.coupling.d;
    j["T"] = cfg.coupling.T_block;
    j["horizon_blocks"] = cfg.coupling.n_blocks;
    j["exp_moments"] = ojson::array();
    for (double dl : deltas) {
        double s = 0.0;
        std::size_t censored = 0;
        for (double t : taus) {
            if (std::isinf(t)) {
                ++censored;
                t = cfg.coupling.n_blocks;   // lower bound for censored paths
            }
            s += std::exp(dl * t);
        }
        j["exp_moments"].push_back({{"delta", dl},
                                    {"mean_exp_delta_tau_lower", taus.empty() ? 0.0 : s / taus.size()},
                                    {"censored", censored}});
    }
    write_text(path_in(cfg, "recurrence.json"), j.dump(2) + "\n");
    finish(cfg, {"recurrence.csv", "recurrence.json"});
    return kOk;
}

int cmd_mixing(const Common& c, MixingStudyOptions opt) {
    const ExperimentConfig cfg = resolve(c);
    ensure_directory(cfg.outputs.directory);
    opt.threads = threads_of(c);
    const auto res = run_mixing_study(cfg, opt);
    std::ofstream os(path_in(cfg, "mixing.csv"));
    if (!os) throw IoError("cannot open mixing.csv");
    os << "t,D,se,argmax,censored\n";
    for (std::size_t i = 0; i < res.ts.size(); ++i)
        os << num(res.ts[i]) << ',' << num(res.D[i]) << ',' << num(res.se[i]) << ',' << res.argmax[i] << ','
           << (res.fit.censored.empty() ? 0 : static_cast<int>(res.fit.censored[i])) << '\n';
    os.close();
    ojson j;
    j["strictly_decreasing_3sigma"] = res.strictly_decreasing;
    j["q_hat"] = res.fit.q_hat;
    j["q_se"] = res.fit.q_se;
    j["q_ci"] = {res.fit.q_ci.lo, res.fit.q_ci.hi};
    j["exp_rate"] = res.fit.exp_rate;
    j["aic_power"] = res.fit.aic_power;
    j["aic_exp"] = res.fit.aic_exp;
    write_text(path_in(cfg, "mixing_fit.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    finish(cfg, {"mixing.csv", "mixing_fit.json"});
    return kOk;
}

int cmd_verify(const Common& c, const std::string& which) {
    const ExperimentConfig cfg = resolve(c);
    ensure_directory(cfg.outputs.directory);
    VerifyReport rep = which == "weights"     ? verify_weights(cfg)
                       : which == "operators" ? verify_operators(cfg)
                                              : verify_suite(cfg);
    for (const auto& ch : rep.checks)
        std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << " measured=" << ch.measured
                  << " tol=" << ch.tolerance << (ch.detail.empty() ? "" : " (" + ch.detail + ")") << "\n";
    write_text(path_in(cfg, "report.json"), rep.to_json());
    finish(cfg, {"report.json"});
    return rep.passed() ? kOk : kCheckFailed;
}

int cmd_fit(const Common& c, const std::string& input) {
    std::ifstream is(input);
    if (!is) throw IoError("cannot read " + input);
    std::string line;
    std::getline(is, line);
    std::vector<double> t, D, se;
    bool have_se = line.find("se") != std::string::npos;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() < 2) throw std::invalid_argument("fit: rows need t,D");
        t.push_back(v[0]);
        D.push_back(v[1]);
        if (have_se) se.push_back(v.size() > 2 ? v[2] : 0.0);
    }
    const MixingFit f = fit_mixing_rate(t, D, se);
    ojson j;
    j["q_hat"] = f.q_hat;
    j["q_se"] = f.q_se;
    j["log_C"] = f.log_C;
    j["q_ci"] = {f.q_ci.lo, f.q_ci.hi};
    j["exp_rate"] = f.exp_rate;
    j["exp_rate_se"] = f.exp_rate_se;
    j["aic_power"] = f.aic_power;
    j["aic_exp"] = f.aic_exp;
    j["preferred"] = f.power_preferred() ? "power" : "exponential";
    j["n_used"] = f.n_used;
    j["censored"] = f.censored;
    std::cout << j.dump(2) << "\n";
    if (c.out_dir) {
        ensure_directory(*c.out_dir);
        write_text((fs::path(*c.out_dir) / "fit.json").string(), j.dump(2) + "\n");
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ns2d: damped stochastic 2D Navier-Stokes experiments"};
    app.require_subcommand(1);
    Common common;

    auto* sim = app.add_subcommand("simulate", "run an ensemble of trajectories with ledgers");
    add_common(sim, common);
    auto* cpl = app.add_subcommand("couple", "run coupled pairs block by block");
    add_common(cpl, common);
    auto* rec = app.add_subcommand("recurrence", "recurrence times of coupled pairs to the d-ball");
    add_common(rec, common);
    std::vector<double> deltas{0.05, 0.1, 0.2};
    rec->add_option("--delta", deltas, "exponents for E exp(delta tau_d)");
    auto* mix = app.add_subcommand("mixing", "dual-Lipschitz distance between two ensembles");
    add_common(mix, common);
    MixingStudyOptions mopt;
    mix->add_option("--radius", mopt.R, "initial conditions +-R e_0");
    mix->add_option("--members", mopt.n_members, "members per ensemble");
    mix->add_option("--times", mopt.ts, "t-ladder");
    mix->add_option("--probes", mopt.n_probes, "tanh probes on the leading modes");
    auto* vw = app.add_subcommand("verify-weights", "weight and A2 checks");
    add_common(vw, common);
    auto* vo = app.add_subcommand("verify-operators", "spectral operator identities");
    add_common(vo, common);
    auto* va = app.add_subcommand("verify-all", "every registered invariant check");
    add_common(va, common);
    auto* fit = app.add_subcommand("fit", "fit a distance series t,D[,se]");
    add_common(fit, common);
    std::string fit_input;
    fit->add_option("--input", fit_input, "CSV with header")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(common);
        if (cpl->parsed()) return cmd_couple(common);
        if (rec->parsed()) return cmd_recurrence(common, deltas);
        if (mix->parsed()) return cmd_mixing(common, mopt);
        if (vw->parsed()) return cmd_verify(common, "weights");
        if (vo->parsed()) return cmd_verify(common, "operators");
        if (va->parsed()) return cmd_verify(common, "all");
        if (fit->parsed()) return cmd_fit(common, fit_input);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kBlowUp;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
