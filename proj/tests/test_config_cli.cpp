#include "doctest.h"
#include "oracles.hpp"

#include "pestctl/csv.hpp"
#include "pestctl/parallel.hpp"
#include "pestctl/scenarios.hpp"

#include <filesystem>
#include <fstream>

using namespace pestctl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("pestctl_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_file(const TempDir& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir.path / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("empty config file yields pure defaults with phi flagged") {
    TempDir dir;
    const auto path = write_file(dir, "empty.cfg", "# nothing here\n\n");
    const ScenarioConfig cfg = load_config(path.string());
    CHECK(cfg.params.r == 0.05);
    CHECK(cfg.params.alpha == 0.025);
    CHECK(cfg.params.phi == 0.5);
    CHECK(cfg.initial_state.X == 0.2);
    CHECK(cfg.tf == 600.0);

    bool phi_flagged = false;
    for (const std::string& line : cfg.echo_lines()) {
        if (line.rfind("phi", 0) == 0) {
            phi_flagged = line.find("tool-default") != std::string::npos &&
                          line.find("artifact choice") != std::string::npos;
        }
    }
    CHECK(phi_flagged);
}

TEST_CASE("config overrides and provenance") {
    TempDir dir;
    const auto path = write_file(dir, "a.cfg", "alpha = 0.12\ntf = 100 # comment\n");
    ScenarioConfig cfg = load_config(path.string());
    CHECK(cfg.params.alpha == 0.12);
    CHECK(cfg.tf == 100.0);
    CHECK(cfg.sources.at("alpha") == ValueSource::ConfigFile);

    apply_override(cfg, "gamma=0.04");
    CHECK(cfg.params.gamma == 0.04);
    CHECK(cfg.sources.at("gamma") == ValueSource::Override);
    CHECK(cfg.overrides.size() == 1);
}

TEST_CASE("config errors carry their kind and line") {
    TempDir dir;

    const auto bad_line = write_file(dir, "b.cfg", "alpha 0.12\n");
    CHECK_THROWS_AS(load_config(bad_line.string()), ParseError);

    const auto bad_key = write_file(dir, "c.cfg", "alhpa = 0.12\n");
    CHECK_THROWS_AS(load_config(bad_key.string()), UnknownKey);

    const auto bad_value = write_file(dir, "d.cfg", "alpha = fast\n");
    try {
        load_config(bad_value.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }

    const auto bad_invariant = write_file(dir, "e.cfg", "m1 = 0.3\nm2 = 0.6\n");
    CHECK_THROWS_AS(load_config(bad_invariant.string()), InvariantViolation);

    const auto bad_scan = write_file(dir, "f.cfg", "scan_param = alpha\nscan_lo = 0.2\nscan_hi = 0.1\nscan_n = 5\n");
    CHECK_THROWS_AS(load_config(bad_scan.string()), InvariantViolation);

    const auto bad_scan_name = write_file(dir, "g.cfg", "scan_param = speed\nscan_lo = 0.1\nscan_hi = 0.2\nscan_n = 5\n");
    CHECK_THROWS_AS(load_config(bad_scan_name.string()), InvariantViolation);
}

TEST_CASE("optimal-control horizon defaults to 60 days unless tf is set") {
    ScenarioConfig cfg = default_config();
    CHECK(cfg.grid(false).tf == 600.0);
    CHECK(cfg.grid(true).tf == 60.0);
    CHECK(cfg.grid(true).n_steps == 1200);

    TempDir dir;
    const auto path = write_file(dir, "tf.cfg", "tf = 30\n");
    const ScenarioConfig with_tf = load_config(path.string());
    CHECK(with_tf.grid(true).tf == 30.0);
}

TEST_CASE("simulate emits one re-parseable file per scan variant plus a script") {
    TempDir dir;
    ScenarioConfig cfg = default_config();
    cfg.scan.present = true;
    cfg.scan.parameter = "alpha";
    cfg.scan.values = {0.12, 0.16, 0.18};
    cfg.tf = 30.0;  // keep the unit test quick
    cfg.output_dir = (dir.path / "out").string();
    run_simulate(cfg, 2);

    CHECK(fs::exists(dir.path / "out" / "simulate.gp"));
    for (const char* name :
         {"simulate_alpha_0.12.csv", "simulate_alpha_0.16.csv", "simulate_alpha_0.18.csv"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(dir.path / "out" / name));
    }

    // round-trip: printed values parse back bit-for-bit
    ModelParams p = cfg.params;
    p.alpha = 0.12;
    const Trajectory traj = integrate_forward(p, cfg.initial_state, cfg.grid(false));
    const CsvTable table = read_csv((dir.path / "out" / "simulate_alpha_0.12.csv").string());
    REQUIRE(table.rows.size() == traj.values.size());
    CHECK(table.header == std::vector<std::string>{"t", "X", "S", "I", "A"});
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        for (int c = 0; c < 4; ++c) {
            CHECK(table.rows[k][static_cast<std::size_t>(c) + 1] == traj.values[k][c]);
        }
    }

    // the bounds line is part of the header comments
    bool has_bounds = false;
    for (const std::string& c : table.comments) {
        if (c.rfind("bounds:", 0) == 0) has_bounds = c.find("satisfied=true") != std::string::npos;
    }
    CHECK(has_bounds);
}

TEST_CASE("stability report json round-trips its numbers") {
    TempDir dir;
    ScenarioConfig cfg = default_config();
    cfg.output_dir = dir.path.string();
    run_equilibria_stability(cfg, "stability");

    REQUIRE(fs::exists(dir.path / "stability_report.txt"));
    const std::string body = slurp(dir.path / "stability_report.json");
    REQUIRE(!body.empty());

    // In-process oracle: R0 from the same config must equal the JSON value.
    const auto pos = body.find("\"R0\":");
    REQUIRE(pos != std::string::npos);
    const double r0 = std::strtod(body.c_str() + pos + 5, nullptr);
    CHECK(r0 == thresholds(cfg.params).R0);
}

TEST_CASE("bifurcation output is byte-identical across thread counts") {
    TempDir dir;
    ScenarioConfig cfg = default_config();
    cfg.scan.present = true;
    cfg.scan.parameter = "alpha";
    cfg.scan.lo = 0.09;
    cfg.scan.hi = 0.15;
    cfg.scan.n = 7;
    cfg.tf = 120.0;  // short attractor runs for the unit test

    cfg.output_dir = (dir.path / "t1").string();
    run_bifurcation(cfg, 1);
    cfg.output_dir = (dir.path / "t4").string();
    run_bifurcation(cfg, 4);

    const std::string a = slurp(dir.path / "t1" / "bifurcation.csv");
    const std::string b = slurp(dir.path / "t4" / "bifurcation.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);
}

TEST_CASE("hopf scan subcommand writes grid and points") {
    TempDir dir;
    ScenarioConfig cfg = default_config();
    cfg.params.K = 3.0;
    cfg.scan.present = true;
    cfg.scan.parameter = "alpha";
    cfg.scan.lo = 0.10;
    cfg.scan.hi = 0.25;
    cfg.scan.n = 11;
    cfg.output_dir = dir.path.string();
    run_hopf_scan(cfg);

    const CsvTable grid = read_csv((dir.path / "psi_grid.csv").string());
    CHECK(grid.rows.size() == 11);
    const CsvTable pts = read_csv((dir.path / "hopf_points.csv").string());
    REQUIRE(pts.rows.size() == 1);
    CHECK(pts.rows[0][0] > 0.10);
    CHECK(pts.rows[0][0] < 0.25);

    // scan requires alpha
    ScenarioConfig bad = default_config();
    CHECK_THROWS_AS(run_hopf_scan(bad), InvariantViolation);
}

TEST_CASE("optimal control run writes the full file set and converges") {
    TempDir dir;
    ScenarioConfig cfg = default_config();
    cfg.output_dir = dir.path.string();
    const bool converged = run_optimal_control(cfg);
    CHECK(converged);
    for (const char* name : {"oc_state.csv", "oc_control.csv", "oc_adjoint.csv",
                             "oc_iterations.csv", "oc_baseline_state.csv", "oc.gp"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir.path / name));
    }
    const CsvTable control = read_csv((dir.path / "oc_control.csv").string());
    for (const auto& row : control.rows) {
        for (int c = 1; c <= 3; ++c) {
            CHECK(row[static_cast<std::size_t>(c)] >= 0.0);
            CHECK(row[static_cast<std::size_t>(c)] <= 1.0);
        }
    }
    // adjoint terminal row is exactly zero
    const CsvTable adj = read_csv((dir.path / "oc_adjoint.csv").string());
    const auto& last = adj.rows.back();
    for (int c = 1; c <= 4; ++c) CHECK(last[static_cast<std::size_t>(c)] == 0.0);
}

TEST_CASE("settled attractor ranges hug the interior equilibrium") {
    TempDir dir;
    ScenarioConfig cfg = default_config();
    cfg.scan.present = true;
    cfg.scan.parameter = "alpha";
    cfg.scan.values = {0.10, 0.12, 0.14};
    cfg.tf = 2000.0;  // long enough for the damped oscillations to settle
    cfg.h = 0.1;
    cfg.output_dir = dir.path.string();
    run_bifurcation(cfg, 2);

    const CsvTable table = read_csv((dir.path / "bifurcation.csv").string());
    REQUIRE(table.rows.size() == 3);
    for (const auto& row : table.rows) {
        REQUIRE(row[1] == 1.0);  // interior point tracked everywhere here
        for (int c = 0; c < 4; ++c) {
            const double star = row[static_cast<std::size_t>(2 + c)];
            const double lo = row[static_cast<std::size_t>(7 + 2 * c)];
            const double hi = row[static_cast<std::size_t>(8 + 2 * c)];
            CHECK(lo <= hi);
            CHECK(hi - lo <= 0.02);                      // oscillation died out
            CHECK(std::abs(0.5 * (lo + hi) - star) <= 0.02);  // and settled on E*
        }
    }
}

TEST_CASE("missing interior branch leaves equilibrium cells empty") {
    TempDir dir;
    ScenarioConfig cfg = default_config();
    cfg.scan.present = true;
    cfg.scan.parameter = "alpha";
    cfg.scan.values = {0.002, 0.003};  // below the branch
    cfg.tf = 50.0;
    cfg.output_dir = dir.path.string();
    run_bifurcation(cfg, 1);

    const std::string body = slurp(dir.path / "bifurcation.csv");
    CHECK(body.find("0.002,0,,,,,none,") != std::string::npos);
    const CsvTable table = read_csv((dir.path / "bifurcation.csv").string());
    for (const auto& row : table.rows) {
        CHECK(row[1] == 0.0);
        CHECK(std::isfinite(row[7]));  // attractor columns still filled
    }
}

TEST_CASE("parallel_for fills every slot and rethrows worker failures") {
    std::vector<int> slots(257, 0);
    parallel_for(slots.size(), 4, [&](std::size_t i) { slots[i] = static_cast<int>(i) + 1; });
    for (std::size_t i = 0; i < slots.size(); ++i) CHECK(slots[i] == static_cast<int>(i) + 1);

    CHECK_THROWS_AS(parallel_for(64, 4,
                                 [&](std::size_t i) {
                                     if (i == 17) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("thread count resolution falls back to the environment") {
    CHECK(resolve_thread_count(3) == 3u);
    setenv("PESTCTL_THREADS", "5", 1);
    CHECK(resolve_thread_count(0) == 5u);
    unsetenv("PESTCTL_THREADS");
    CHECK(resolve_thread_count(0) >= 1u);
}

TEST_CASE("fmt17 round-trips doubles exactly") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> U(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = U(rng) * std::pow(10.0, std::uniform_int_distribution<int>(-12, 12)(rng));
        CHECK(std::strtod(fmt17(v).c_str(), nullptr) == v);
    }
}
