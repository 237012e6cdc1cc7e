#ifndef QSAT_LAB_HPP
#define QSAT_LAB_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsat/trajectory.hpp"

namespace qsat::lab {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitCheckFailed = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string command;
    int d = 0;
    int d_min = 0, d_max = 0; // sweep
    uint64_t runs = 1;
    uint64_t seed = 0;
    std::string mode = "uniform"; // uniform | permutation
    uint64_t snapshot_cadence = 0; // 0 = engine default
    uint64_t sample_pairs = 4096;
    std::string out_prefix;
    std::string format = "csv"; // table format: csv | json
    double degree_c = 0.3;
    std::vector<int> subcube_ks;
    std::vector<uint64_t> scan_checkpoints;
    int workers = 0; // 0 = all hardware threads; not echoed in outputs
    bool timestamps = false;
    bool force_large = false;
    bool write_trajectory = true;

    // ode
    double t_max = 2.0;
    double ode_step = 1e-3;
    std::string overlay_csv;
    uint64_t overlay_run = 0;

    // report
    std::string manifest_path;
    bool check = false;
    std::string oracle_path;
    double tv_tol = 0.02;
};

// Per-run worker seeds, derived so that results are independent of
// scheduling. `index` encodes (d, run) in sweeps.
struct RunSeeds {
    uint64_t process;
    uint64_t sampling;
};

RunSeeds derive_seeds(uint64_t master, uint64_t index);

struct CheckpointRow {
    uint64_t j = 0;
    uint64_t i = 0;
    double isolated_frac = 0.0;
    double y_zero_frac = 0.0; // exact, over all adjacent pairs
};

struct SingleRunOutput {
    uint64_t index = 0;
    uint64_t seed = 0;
    uint64_t M = 0;
    bool saturated = false;
    double ratio = 0.0; // M / (d^(2/3) 2^d)
    uint64_t clock_ties = 0;
    uint64_t good_count = 0; // goodedges command
    bool good_subset = false;
    uint16_t min_degree = 0, max_degree = 0;
    double degree_frac_at_c = 0.0; // final degree >= c d^(2/3)
    std::vector<TrajectoryRecord> trajectory;
    std::vector<CheckpointRow> checkpoints;
    std::vector<std::pair<int, uint64_t>> empty_subcubes;
    std::string error;
};

// One process run with observation hooks wired up per the config.
SingleRunOutput run_single(const ExperimentConfig& cfg, Dim d, uint64_t index);

int cmd_run(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_goodedges(const ExperimentConfig& cfg);
int cmd_ode(const ExperimentConfig& cfg);
int cmd_oracle(const ExperimentConfig& cfg);
int cmd_report(const ExperimentConfig& cfg);

// Validates and dispatches; maps exceptions onto exit codes.
int dispatch(const ExperimentConfig& cfg);

// Least-squares slope of log(mean M / 2^d) against log d; the sweep's
// scaling-exponent estimate.
double fit_log_slope(const std::vector<int>& ds,
                     const std::vector<double>& mean_m);

} // namespace qsat::lab

#endif
