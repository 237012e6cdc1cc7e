#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsat/lab.hpp"

using namespace qsat;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path temp_prefix(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / "qsat_lab_tests";
    fs::create_directories(dir);
    return dir / tag;
}

} // namespace

TEST_CASE("per-run seed derivation is stable and run-distinct") {
    auto a = lab::derive_seeds(7, 0);
    auto b = lab::derive_seeds(7, 0);
    CHECK(a.process == b.process);
    CHECK(a.sampling == b.sampling);
    CHECK(a.process != a.sampling);
    CHECK(lab::derive_seeds(7, 1).process != a.process);
    CHECK(lab::derive_seeds(8, 0).process != a.process);
    // matches the engine-facing stream helper
    Rng direct = Rng::for_run(7, 0);
    Rng via_seed(a.process);
    for (int i = 0; i < 4; ++i) CHECK(direct.next() == via_seed.next());
}

TEST_CASE("run_single reproduces the same process for the same key") {
    lab::ExperimentConfig cfg;
    cfg.command = "run";
    cfg.d = 5;
    cfg.seed = 42;
    cfg.write_trajectory = false;
    auto a = lab::run_single(cfg, Dim(5), 3);
    auto b = lab::run_single(cfg, Dim(5), 3);
    CHECK(a.M == b.M);
    CHECK(a.seed == b.seed);
    CHECK(a.saturated);
    auto c = lab::run_single(cfg, Dim(5), 4);
    CHECK(c.seed != a.seed);
}

TEST_CASE("slope fit recovers a planted exponent") {
    std::vector<int> ds{8, 10, 12, 14};
    std::vector<double> mean_m;
    for (int d : ds)
        mean_m.push_back(3.7 * std::pow(double(d), 0.71) *
                         std::ldexp(1.0, d));
    CHECK(lab::fit_log_slope(ds, mean_m) == doctest::Approx(0.71).epsilon(1e-9));
}

TEST_CASE("run command writes byte-identical outputs across worker counts") {
    lab::ExperimentConfig cfg;
    cfg.command = "run";
    cfg.d = 4;
    cfg.runs = 12;
    cfg.seed = 99;
    cfg.mode = "uniform";
    cfg.out_prefix = temp_prefix("det_a").string();
    cfg.workers = 1;
    REQUIRE(lab::cmd_run(cfg) == lab::kExitOk);
    std::string csv1 = slurp(cfg.out_prefix + ".trajectory.csv");
    std::string man1 = slurp(cfg.out_prefix + ".manifest.json");

    cfg.workers = 4;
    REQUIRE(lab::cmd_run(cfg) == lab::kExitOk);
    CHECK(slurp(cfg.out_prefix + ".trajectory.csv") == csv1);
    CHECK(slurp(cfg.out_prefix + ".manifest.json") == man1);

    // ...and the bytes do not depend on the output path stem either
    // (the prefix itself is echoed, so compare a re-run at same path).
    cfg.workers = 2;
    REQUIRE(lab::cmd_run(cfg) == lab::kExitOk);
    CHECK(slurp(cfg.out_prefix + ".manifest.json") == man1);
}

TEST_CASE("permutation-mode run with checkpoints records them in order") {
    lab::ExperimentConfig cfg;
    cfg.command = "run";
    cfg.d = 5;
    cfg.runs = 2;
    cfg.seed = 5;
    cfg.mode = "permutation";
    cfg.scan_checkpoints = {0, 20, 40};
    cfg.out_prefix = temp_prefix("perm").string();
    REQUIRE(lab::cmd_run(cfg) == lab::kExitOk);

    nlohmann::json manifest =
        nlohmann::json::parse(slurp(cfg.out_prefix + ".manifest.json"));
    REQUIRE(manifest.at("results").size() == 2);
    for (auto& r : manifest.at("results")) {
        auto& cps = r.at("checkpoints");
        REQUIRE(cps.size() == 3);
        CHECK(cps[0].at("j") == 0);
        CHECK(cps[0].at("isolated_frac") == 1.0);
        CHECK(cps[1].at("j") == 20);
        CHECK(cps[2].at("j") == 40);
        CHECK(r.at("saturated") == true);
    }
    CHECK(manifest.at("aggregates").at("exit_status") == "ok");
    // fixed top-level key order
    auto keys = std::vector<std::string>();
    std::istringstream is(slurp(cfg.out_prefix + ".manifest.json"));
    std::string line;
    while (std::getline(is, line)) {
        for (std::string k :
             {"\"config\"", "\"seeds\"", "\"results\"", "\"aggregates\"",
              "\"version\""})
            if (line.rfind("  " + k, 0) == 0) keys.push_back(k);
    }
    CHECK(keys == std::vector<std::string>{"\"config\"", "\"seeds\"",
                                           "\"results\"", "\"aggregates\"",
                                           "\"version\""});
}

TEST_CASE("json trajectory format parses and mirrors the csv rows") {
    lab::ExperimentConfig cfg;
    cfg.command = "run";
    cfg.d = 3;
    cfg.runs = 3;
    cfg.seed = 11;
    cfg.format = "json";
    cfg.out_prefix = temp_prefix("fmt").string();
    REQUIRE(lab::cmd_run(cfg) == lab::kExitOk);
    nlohmann::json rows =
        nlohmann::json::parse(slurp(cfg.out_prefix + ".trajectory.json"));
    REQUIRE(rows.at("rows").size() > 0);
    CHECK(rows.at("rows")[0].at("i") == 0);
    CHECK(rows.at("rows")[0].at("O") == 12);
}

TEST_CASE("oracle files regenerate byte-identically") {
    lab::ExperimentConfig cfg;
    cfg.command = "oracle";
    cfg.d = 3;
    cfg.out_prefix = temp_prefix("oracle").string();
    REQUIRE(lab::cmd_oracle(cfg) == lab::kExitOk);
    std::string cat1 = slurp(cfg.out_prefix + ".catalog.json");
    std::string dist1 = slurp(cfg.out_prefix + ".distribution.json");
    REQUIRE(lab::cmd_oracle(cfg) == lab::kExitOk);
    CHECK(slurp(cfg.out_prefix + ".catalog.json") == cat1);
    CHECK(slurp(cfg.out_prefix + ".distribution.json") == dist1);

    nlohmann::json dist = nlohmann::json::parse(dist1);
    CHECK(dist.at("d") == 3);
    double mass = 0;
    for (auto& [k, v] : dist.at("pmf_float").items())
        mass += v.get<double>();
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("d=2 oracle distribution is the single entry 3 -> 1") {
    lab::ExperimentConfig cfg;
    cfg.command = "oracle";
    cfg.d = 2;
    cfg.out_prefix = temp_prefix("oracle2").string();
    REQUIRE(lab::cmd_oracle(cfg) == lab::kExitOk);
    nlohmann::json dist =
        nlohmann::json::parse(slurp(cfg.out_prefix + ".distribution.json"));
    REQUIRE(dist.at("pmf").size() == 1);
    CHECK(dist.at("pmf").at("3") == "1");
    CHECK(dist.at("pmf_float").at("3") == 1.0);
}

TEST_CASE("report --check passes a clean manifest and oracle pin") {
    lab::ExperimentConfig rcfg;
    rcfg.command = "run";
    rcfg.d = 2;
    rcfg.runs = 25;
    rcfg.seed = 1;
    rcfg.out_prefix = temp_prefix("chk").string();
    REQUIRE(lab::cmd_run(rcfg) == lab::kExitOk);

    lab::ExperimentConfig ocfg;
    ocfg.command = "oracle";
    ocfg.d = 2;
    ocfg.out_prefix = temp_prefix("chk_oracle").string();
    REQUIRE(lab::cmd_oracle(ocfg) == lab::kExitOk);

    lab::ExperimentConfig ccfg;
    ccfg.command = "report";
    ccfg.manifest_path = rcfg.out_prefix + ".manifest.json";
    ccfg.check = true;
    ccfg.oracle_path = ocfg.out_prefix + ".distribution.json";
    ccfg.tv_tol = 0.02;
    CHECK(lab::cmd_report(ccfg) == lab::kExitOk);

    // mismatched oracle pin must fail the check with exit code 3
    lab::ExperimentConfig o3;
    o3.command = "oracle";
    o3.d = 3;
    o3.out_prefix = temp_prefix("chk_oracle3").string();
    REQUIRE(lab::cmd_oracle(o3) == lab::kExitOk);
    ccfg.oracle_path = o3.out_prefix + ".distribution.json";
    CHECK(lab::cmd_report(ccfg) == lab::kExitCheckFailed);
}

TEST_CASE("dispatch maps bad configs to the usage exit code") {
    lab::ExperimentConfig cfg;
    cfg.command = "run";
    cfg.d = 0;
    CHECK(lab::dispatch(cfg) == lab::kExitUsage);

    cfg.command = "oracle";
    cfg.d = 5;
    CHECK(lab::dispatch(cfg) == lab::kExitUsage);

    cfg.command = "nonsense";
    CHECK(lab::dispatch(cfg) == lab::kExitUsage);

    cfg.command = "run";
    cfg.d = 23; // over the memory guard without --force-large
    cfg.runs = 1;
    CHECK(lab::dispatch(cfg) == lab::kExitUsage);

    cfg.command = "report";
    cfg.manifest_path = "/nonexistent/manifest.json";
    CHECK(lab::dispatch(cfg) == lab::kExitRuntime);

    cfg.command = "run";
    cfg.d = 4;
    cfg.mode = "uniform";
    cfg.scan_checkpoints = {5};
    CHECK(lab::dispatch(cfg) == lab::kExitUsage);
}

TEST_CASE("sweep writes one row per dimension with the slope aggregate") {
    lab::ExperimentConfig cfg;
    cfg.command = "sweep";
    cfg.d_min = 3;
    cfg.d_max = 6;
    cfg.runs = 4;
    cfg.seed = 2;
    cfg.out_prefix = temp_prefix("sweep").string();
    REQUIRE(lab::cmd_sweep(cfg) == lab::kExitOk);

    nlohmann::json manifest =
        nlohmann::json::parse(slurp(cfg.out_prefix + ".manifest.json"));
    CHECK(manifest.at("results").size() == 4);
    CHECK(manifest.at("aggregates").contains("log_slope"));

    std::string csv = slurp(cfg.out_prefix + ".sweep.csv");
    size_t rows = 0;
    for (char c : csv) rows += (c == '\n');
    CHECK(rows == 2 + 4); // comment + header + one per d
}

TEST_CASE("sweep honors the json table format") {
    lab::ExperimentConfig cfg;
    cfg.command = "sweep";
    cfg.d_min = 3;
    cfg.d_max = 4;
    cfg.runs = 2;
    cfg.seed = 8;
    cfg.format = "json";
    cfg.out_prefix = temp_prefix("sweep_json").string();
    REQUIRE(lab::cmd_sweep(cfg) == lab::kExitOk);
    nlohmann::json table =
        nlohmann::json::parse(slurp(cfg.out_prefix + ".sweep.json"));
    REQUIRE(table.at("rows").size() == 2);
    CHECK(table.at("rows")[0].at("d") == 3);
    CHECK(table.at("rows")[1].at("d") == 4);
}

TEST_CASE("goodedges command reports subset verdicts and expectation") {
    lab::ExperimentConfig cfg;
    cfg.command = "goodedges";
    cfg.d = 5;
    cfg.runs = 30;
    cfg.seed = 6;
    cfg.out_prefix = temp_prefix("good").string();
    REQUIRE(lab::cmd_goodedges(cfg) == lab::kExitOk);
    nlohmann::json manifest =
        nlohmann::json::parse(slurp(cfg.out_prefix + ".manifest.json"));
    CHECK(manifest.at("aggregates").at("subset_pass_rate") == 1.0);
    double expected = manifest.at("aggregates").at("expected_good");
    CHECK(expected > 0);
    for (auto& r : manifest.at("results"))
        CHECK(r.at("good_subset") == true);
}

TEST_CASE("ode command emits the error table and identity residuals") {
    lab::ExperimentConfig cfg;
    cfg.command = "ode";
    cfg.t_max = 0.5;
    cfg.ode_step = 1e-3;
    cfg.out_prefix = temp_prefix("ode").string();
    REQUIRE(lab::cmd_ode(cfg) == lab::kExitOk);
    nlohmann::json manifest =
        nlohmann::json::parse(slurp(cfg.out_prefix + ".manifest.json"));
    auto& res = manifest.at("results")[0];
    CHECK(res.at("sup_err").get<double>() < 1e-8);
    CHECK(res.at("identity_w_8q3_max").get<double>() < 1e-10);
    CHECK(res.at("identity_y_24t2q_max").get<double>() < 1e-10);
}

TEST_CASE("ode overlay consumes a trajectory csv") {
    lab::ExperimentConfig rcfg;
    rcfg.command = "run";
    rcfg.d = 6;
    rcfg.runs = 1;
    rcfg.seed = 4;
    rcfg.out_prefix = temp_prefix("ovl_run").string();
    REQUIRE(lab::cmd_run(rcfg) == lab::kExitOk);

    lab::ExperimentConfig ocfg;
    ocfg.command = "ode";
    ocfg.t_max = 0.5;
    ocfg.ode_step = 1e-3;
    ocfg.overlay_csv = rcfg.out_prefix + ".trajectory.csv";
    ocfg.overlay_run = 0;
    ocfg.out_prefix = temp_prefix("ovl").string();
    REQUIRE(lab::cmd_ode(ocfg) == lab::kExitOk);

    std::string csv = slurp(ocfg.out_prefix + ".overlay.csv");
    CHECK(csv.find("y_zero_frac") != std::string::npos);
    // first data row is the t=0 anchor with O_scaled exactly 0.5
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line); // comment
    std::getline(is, line); // header
    std::getline(is, line);
    CHECK(line.find(",0.5,0.5,") != std::string::npos);
}
