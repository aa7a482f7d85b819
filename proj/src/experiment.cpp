#include "ns2d/experiment.hpp"

#include "ns2d/snapshot_io.hpp"
#include "ns2d/spectral_ops.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace ns2d {

namespace fs = std::filesystem;

int default_threads() {
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(h);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t err_index = n;
    std::exception_ptr err;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t file_hash(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (is) {
        is.read(buf, sizeof buf);
        h = fnv1a64(buf, static_cast<std::size_t>(is.gcount()), h);
    }
    return h;
}

std::string Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& e : files) {
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(e.fnv1a));
        j["files"].push_back({{"path", e.path}, {"bytes", e.bytes}, {"fnv1a64", hex}});
    }
    return j.dump(2) + "\n";
}

Manifest build_manifest(const std::string& dir, std::vector<std::string> files) {
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    Manifest m;
    for (const auto& f : files) {
        const std::string full = (fs::path(dir) / f).string();
        std::error_code ec;
        const auto size = fs::file_size(full, ec);
        if (ec) throw IoError("cannot stat " + full);
        m.files.push_back({f, static_cast<std::uint64_t>(size), file_hash(full)});
    }
    return m;
}

std::string write_manifest(const std::string& dir, const Manifest& m) {
    const std::string path = (fs::path(dir) / "manifest.json").string();
    write_text(path, m.to_json());
    return path;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path);
    os << text;
    if (!os) throw IoError("write failed for " + path);
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir);
}

MemberRun simulate_member(const Dynamics& dyn, const SpectralField& u0, std::uint32_t member,
                          std::uint64_t steps, int stride, const CounterRng& rng,
                          const MemberOptions& opt) {
    MemberRun run;
    run.index = member;
    const double dt = dyn.config().dt;
    const Stream stream{member, static_cast<std::uint32_t>(opt.role), 0};
    std::optional<EnergyLedger> ledger;
    if (opt.ledger) ledger.emplace(dyn.spec_ptr(), dt, opt.rule, opt.record_rows);
    SpectralField u = u0;
    if (opt.record_rows) run.rows.push_back(trajectory_row(0.0, u));
    if (ledger) ledger->push(0.0, u);
    try {
        for (std::uint64_t n = 0; n < steps; ++n) {
            const WienerIncrement dW = sample_increment(dyn.spec(), dt, rng, stream, n);
            if (ledger) ledger->update_martingale(u, dW);
            u = dyn.step_primal(u, dW, n);
            const double t = static_cast<double>(n + 1) * dt;
            if (ledger) ledger->push(t, u);
            if (opt.record_rows && (n + 1) % static_cast<std::uint64_t>(stride) == 0)
                run.rows.push_back(trajectory_row(t, u));
        }
    } catch (const BlowUpError& e) {
        run.blew_up = true;
        run.blowup_step = e.step;
    }
    if (ledger) {
        if (opt.record_rows) {
            const auto& h = ledger->history();
            for (std::size_t i = 0; i < h.size(); i += static_cast<std::size_t>(stride))
                run.ledger_rows.push_back(h[i]);
        }
        run.tau = ledger->tau();
    }
    run.final_state = std::move(u);
    return run;
}

EnsembleResult run_ensemble(const ExperimentConfig& cfg, int threads, bool write_files) {
    cfg.validate();
    const Dynamics dyn = make_dynamics(cfg);
    const CounterRng rng(cfg.noise.seed);
    const auto n = static_cast<std::size_t>(cfg.ensemble.n_members);
    EnsembleResult res;
    res.members.resize(n, MemberRun{});
    const std::uint64_t steps = dyn.config().steps();
    MemberOptions opt;
    opt.rule = cfg.stopping_rule();
    opt.ledger = std::abs(std::lround(1.0 / cfg.integrator.dt) * cfg.integrator.dt - 1.0) < 1e-9;
    parallel_for(n, threads, [&](std::size_t i) {
        const auto m = static_cast<std::uint32_t>(i);
        res.members[i] = simulate_member(dyn, initial_condition(cfg, dyn.basis(), m), m, steps,
                                         cfg.outputs.stride, rng, opt);
    });
    if (!write_files) return res;

    const std::string& dir = cfg.outputs.directory;
    ensure_directory(dir);
    auto name = [](const char* stem, std::size_t i, const char* ext) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s_%04zu.%s", stem, i, ext);
        return std::string(buf);
    };
    nlohmann::ordered_json summary;
    summary["members"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = res.members[i];
        const std::string traj = name("traj", i, "csv");
        write_trajectory_csv((fs::path(dir) / traj).string(), m.rows);
        res.files.push_back(traj);
        if (opt.ledger) {
            const std::string led = name("ledger", i, "csv");
            write_ledger_csv((fs::path(dir) / led).string(), m.ledger_rows);
            res.files.push_back(led);
        }
        const std::string fin = name("final", i, "ns2d");
        write_snapshot((fs::path(dir) / fin).string(), m.final_state);
        res.files.push_back(fin);
        nlohmann::ordered_json e;
        e["index"] = i;
        e["blew_up"] = m.blew_up;
        if (m.blew_up) e["blowup_step"] = m.blowup_step;
        e["final_L2"] = l2_norm(m.final_state);
        e["stopping_time"] = nlohmann::ordered_json::parse(m.tau.to_text());
        summary["members"].push_back(e);
    }
    write_text((fs::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
    ExperimentConfig recorded = cfg;
    recorded.outputs.directory = ".";
    write_text((fs::path(dir) / "config.json").string(), serialize(recorded) + "\n");
    res.files.push_back("summary.json");
    res.files.push_back("config.json");
    res.manifest_path = write_manifest(dir, build_manifest(dir, res.files));
    return res;
}

}  // namespace ns2d
