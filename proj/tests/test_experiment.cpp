#include "ns2d/experiment.hpp"
#include "ns2d/experiment_config.hpp"
#include "ns2d/spectral_ops.hpp"
#include "ns2d/studies.hpp"
#include "ns2d/verify.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace ns2d;
namespace fs = std::filesystem;

namespace {

ExperimentConfig quick_config() {
    ExperimentConfig c;
    c.grid.M = 16;
    c.noise.J = 16;
    c.integrator.T_horizon = 0.2;
    c.ensemble.n_members = 3;
    c.outputs.stride = 5;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST_CASE("config serialization round trip") {
    ExperimentConfig c = quick_config();
    c.noise.h_coeffs = {0.1, -0.2};
    c.initial.kind = "random";
    c.initial.amplitude = 1.5;
    c.coupling.rho = 7.0;
    c.integrator.scheme = Scheme::semi_implicit_euler;
    CHECK(parse_experiment_config(serialize(c)) == c);
    CHECK(parse_experiment_config("{}") == ExperimentConfig{});
}

TEST_CASE("config validation") {
    CHECK_THROWS(parse_experiment_config(R"({"grid": {"M": 16, "bogus": 1}})"));
    CHECK_THROWS(parse_experiment_config(R"({"unknown_section": {}})"));
    CHECK_THROWS(parse_experiment_config(R"({"integrator": {"dt": -1}})"));
    CHECK_THROWS(parse_experiment_config(R"({"initial": {"kind": "spiral"}})"));
    CHECK_THROWS(parse_experiment_config("not json"));
    CHECK_THROWS(load_experiment_config("/nonexistent/config.json"));
}

TEST_CASE("initial conditions") {
    ExperimentConfig c = quick_config();
    const DivFreeBasis b(c.make_grid());
    CHECK(l2_norm(initial_condition(c, b, 0)) == 0.0);
    c.initial.kind = "mode";
    c.initial.mode = 3;
    c.initial.amplitude = 2.0;
    const SpectralField m = initial_condition(c, b, 0);
    CHECK(b.coords(m, 4)[3] == doctest::Approx(2.0));
    c.initial.kind = "random";
    const SpectralField r0 = initial_condition(c, b, 0), r1 = initial_condition(c, b, 1);
    CHECK(l2_norm(r0) == doctest::Approx(2.0));
    CHECK(l2_norm(r0 - r1) > 0.0);
    CHECK(l2_norm(r0 - initial_condition(c, b, 0)) == 0.0);
}

TEST_CASE("parallel_for covers every index and rethrows the lowest failure") {
    std::vector<int> hit(100, 0);
    parallel_for(hit.size(), 3, [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) CHECK(h == 1);
    try {
        parallel_for(10, 2, [](std::size_t i) {
            if (i == 3 || i == 7) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "3");
    }
}

TEST_CASE("FNV-1a hash") {
    CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);
}

TEST_CASE("ensemble output is complete and reproducible") {
    const ExperimentConfig base = quick_config();
    std::string manifests[2];
    for (int k = 0; k < 2; ++k) {
        ExperimentConfig c = base;
        c.outputs.directory = (fs::temp_directory_path() / ("ns2d_ens_" + std::to_string(k))).string();
        fs::remove_all(c.outputs.directory);
        const EnsembleResult res = run_ensemble(c, k + 1);
        REQUIRE(res.members.size() == 3);
        for (const char* f : {"traj_0000.csv", "ledger_0002.csv", "final_0001.ns2d", "summary.json", "config.json",
                              "manifest.json"})
            CHECK(fs::exists(fs::path(c.outputs.directory) / f));
        const auto cfg = load_experiment_config((fs::path(c.outputs.directory) / "config.json").string());
        CHECK(cfg.outputs.directory == ".");
        manifests[k] = slurp(res.manifest_path);
        CHECK(res.members[0].rows.size() == 5);
        fs::remove_all(c.outputs.directory);
    }
    CHECK(manifests[0] == manifests[1]);
    const auto j = nlohmann::json::parse(manifests[0]);
    CHECK(j["files"].size() >= 11);
}

TEST_CASE("members with negligible noise and equal data coincide") {
    ExperimentConfig c = quick_config();
    c.noise.b0 = 1e-300;
    c.initial.kind = "mode";
    c.initial.amplitude = 1.0;
    const Dynamics dyn = make_dynamics(c);
    const SpectralField u0 = initial_condition(c, dyn.basis(), 0);
    const CounterRng rng(1);
    const MemberRun a = simulate_member(dyn, u0, 0, 20, 5, rng), b = simulate_member(dyn, u0, 1, 20, 5, rng);
    CHECK(l2_norm(a.final_state - b.final_state) == 0.0);
    CHECK_FALSE(a.blew_up);
}

TEST_CASE("irreducibility probe: trivial and deterministic cases") {
    ExperimentConfig c = quick_config();
    const auto origin = irreducibility_probe(c, 0.0, 0.1, 0.0, 3, 5);
    CHECK(origin.min_p == 1.0);
    CHECK(origin.positive);
    c.noise.b0 = 1e-12;
    const auto decay = irreducibility_probe(c, 1.0, 0.05, 5.0, 3, 5);
    CHECK(decay.min_p == 1.0);
    c.noise.b0 = 1.0;
    const auto miss = irreducibility_probe(c, 1.0, 1e-6, 0.5, 2, 10);
    CHECK(miss.min_p == 0.0);
    CHECK_FALSE(miss.positive);
    CHECK(miss.directions.size() == 2);
    CHECK_THROWS(irreducibility_probe(c, 1.0, 0.0, 1.0));
}

TEST_CASE("deterministic energy balance closes") {
    ExperimentConfig c = quick_config();
    c.noise.b0 = 1e-300;
    c.noise.h_coeffs = {0.5};
    c.integrator.dt = 1e-3;
    const DivFreeBasis b(c.make_grid());
    const SpectralField u0 = random_divfree_field(b.grid(), CounterRng(3), {0, 7, 0}, 0, 2.0);
    CHECK(energy_balance_residual(c, u0, 0.5) < 1e-2);
}

TEST_CASE("verification suite passes on defaults and at M = 16") {
    CHECK(verify_suite(ExperimentConfig{}).passed());
    ExperimentConfig c;
    c.grid.M = 16;
    CHECK(verify_weights(c).passed());
}

TEST_CASE("verification detects aliasing") {
    ExperimentConfig c;
    c.grid.dealias_fraction = 1.0;
    const VerifyReport r = verify_operators(c);
    CHECK_FALSE(r.passed());
    bool cancellation_failed = false;
    for (const auto& chk : r.checks)
        if (!chk.passed && chk.name.find("cancel") != std::string::npos) cancellation_failed = true;
    CHECK(cancellation_failed);
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["passed"] == false);
}
