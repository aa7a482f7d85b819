#pragma once

#include "ns2d/experiment_config.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ns2d {

// Runs fn(0..n-1) on up to `threads` workers; results must be written by index.
// The first exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);
int default_threads();

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t file_hash(const std::string& path);

struct ManifestEntry {
    std::string path;   // relative to the output directory
    std::uint64_t bytes = 0;
    std::uint64_t fnv1a = 0;
};
struct Manifest {
    std::vector<ManifestEntry> files;   // sorted by path
    std::string to_json() const;
};
Manifest build_manifest(const std::string& dir, std::vector<std::string> files);
// writes <dir>/manifest.json and returns its path
std::string write_manifest(const std::string& dir, const Manifest& m);

void write_text(const std::string& path, const std::string& text);
void ensure_directory(const std::string& dir);

struct MemberRun {
    std::uint32_t index = 0;
    bool blew_up = false;
    std::uint64_t blowup_step = 0;
    std::vector<TrajectoryRow> rows;
    std::vector<EnergyState> ledger_rows;
    StoppingTimeRecord tau = StoppingTimeRecord::never("tau");
    SpectralField final_state;
};

struct MemberOptions {
    bool record_rows = true;
    bool ledger = true;
    std::optional<StoppingRule> rule;
    int role = 0;
};

// Plain trajectory from u0 over steps of the dynamics, noise stream {member, role, 0}.
MemberRun simulate_member(const Dynamics& dyn, const SpectralField& u0, std::uint32_t member,
                          std::uint64_t steps, int stride, const CounterRng& rng,
                          const MemberOptions& opt = {});

struct EnsembleResult {
    std::vector<MemberRun> members;
    std::vector<std::string> files;
    std::string manifest_path;
};

// n_members trajectories with ledgers; files traj_XXXX.csv, ledger_XXXX.csv, final_XXXX.ns2d,
// summary.json, config.json and manifest.json in the output directory.
EnsembleResult run_ensemble(const ExperimentConfig& cfg, int threads, bool write_files = true);

}  // namespace ns2d
