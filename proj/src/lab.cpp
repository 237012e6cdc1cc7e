#include "qsat/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "qsat/analytic.hpp"
#include "qsat/jsonout.hpp"
#include "qsat/ode.hpp"
#include "qsat/oracle.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsat::lab {

RunSeeds derive_seeds(uint64_t master, uint64_t index) {
    SplitMix64 sm(master ^ (0xA0761D6478BD642Full * (index + 1)));
    uint64_t process = sm.next();
    uint64_t sampling = sm.next();
    return RunSeeds{process, sampling};
}

namespace {

double pow_scale(Dim d) {
    return std::pow(double(d.value), 2.0 / 3.0) * std::ldexp(1.0, d.value);
}

std::string csv_double(double v) {
    if (std::isnan(v)) return "";
    return fmt_double17(v);
}

struct MeanSE {
    double mean = 0.0, se = 0.0;
};

MeanSE mean_se(const std::vector<double>& xs) {
    MeanSE out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / double(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / double(xs.size() - 1)) /
                 std::sqrt(double(xs.size()));
    }
    return out;
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

// The command line that regenerates an output file, embedded in CSV
// comments. Excludes --workers: results do not depend on it.
std::string regeneration_command(const ExperimentConfig& cfg, int d_value) {
    std::ostringstream os;
    os << "qsatlab " << cfg.command;
    if (cfg.command == "sweep")
        os << " --d-min " << cfg.d_min << " --d-max " << cfg.d_max;
    else if (cfg.command == "ode")
        os << " --t-max " << fmt_double17(cfg.t_max) << " --step "
           << fmt_double17(cfg.ode_step);
    else
        os << " --d " << d_value;
    if (cfg.command == "run") os << " --mode " << cfg.mode;
    if (cfg.command == "run" || cfg.command == "sweep" ||
        cfg.command == "goodedges") {
        os << " --runs " << cfg.runs << " --seed " << cfg.seed;
        if (cfg.snapshot_cadence > 0) os << " --cadence " << cfg.snapshot_cadence;
        if (cfg.sample_pairs != 4096) os << " --pairs " << cfg.sample_pairs;
    }
    for (int k : cfg.subcube_ks) os << " --subcube-k " << k;
    for (uint64_t j : cfg.scan_checkpoints) os << " --j-checkpoint " << j;
    if (!cfg.out_prefix.empty()) os << " --out " << cfg.out_prefix;
    return os.str();
}

void echo_config(JsonWriter& jw, const ExperimentConfig& cfg, int d_value) {
    jw.key("config").begin_object();
    jw.key("command").value(cfg.command);
    if (cfg.command == "sweep") {
        jw.key("d_min").value(cfg.d_min);
        jw.key("d_max").value(cfg.d_max);
    } else if (cfg.command != "ode") {
        jw.key("d").value(d_value);
    }
    if (cfg.command == "run") jw.key("mode").value(cfg.mode);
    if (cfg.command == "run" || cfg.command == "sweep" ||
        cfg.command == "goodedges") {
        jw.key("runs").value(cfg.runs);
        jw.key("seed").value(cfg.seed);
        jw.key("snapshot_cadence").value(cfg.snapshot_cadence);
        jw.key("sample_pairs").value(cfg.sample_pairs);
        jw.key("degree_c").value(cfg.degree_c);
        jw.key("subcube_k").begin_array();
        for (int k : cfg.subcube_ks) jw.value(k);
        jw.end_array();
        jw.key("scan_checkpoints").begin_array();
        for (uint64_t j : cfg.scan_checkpoints) jw.value(j);
        jw.end_array();
    }
    if (cfg.command == "ode") {
        jw.key("t_max").value(cfg.t_max);
        jw.key("step").value(cfg.ode_step);
        if (!cfg.overlay_csv.empty()) {
            jw.key("overlay").value(cfg.overlay_csv);
            jw.key("overlay_run").value(cfg.overlay_run);
        }
    }
    jw.key("format").value(cfg.format);
    jw.key("out").value(cfg.out_prefix);
    jw.end_object();
}

int resolved_workers(const ExperimentConfig& cfg) {
#ifdef _OPENMP
    return cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#else
    (void)cfg;
    return 1;
#endif
}

template <class Fn>
std::vector<SingleRunOutput> parallel_map(uint64_t n, int workers, Fn&& fn) {
    std::vector<SingleRunOutput> outs(n);
    (void)workers;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (int64_t i = 0; i < int64_t(n); ++i) {
        try {
            outs[size_t(i)] = fn(uint64_t(i));
        } catch (const std::exception& e) {
            outs[size_t(i)].index = uint64_t(i);
            outs[size_t(i)].error = e.what();
        }
    }
    return outs;
}

void guard_dimension(const ExperimentConfig& cfg, int d_value) {
    if (d_value > 22 && !cfg.force_large)
        throw UsageError(
            "d > 22 allocates full edge-status arrays beyond the default "
            "memory budget; pass --force-large to override");
}

void write_trajectory_csv(std::ostream& os, const ExperimentConfig& cfg,
                          int d_value,
                          const std::vector<SingleRunOutput>& outs) {
    os << "# " << regeneration_command(cfg, d_value) << "\n";
    os << "run_id,d,mode,i,t,j,O,W_mean,X_mean,Y_mean,y_zero_frac,"
          "isolated_frac,min_deg,max_deg\n";
    for (const SingleRunOutput& out : outs) {
        for (const TrajectoryRecord& rec : out.trajectory) {
            os << out.index << "," << d_value << "," << cfg.mode << ","
               << rec.i << "," << csv_double(rec.t) << ",";
            if (rec.j >= 0) os << rec.j;
            os << "," << rec.open_count << "," << csv_double(rec.w_mean)
               << "," << csv_double(rec.x_mean) << ","
               << csv_double(rec.y_mean) << ","
               << csv_double(rec.y_zero_frac) << ","
               << csv_double(rec.isolated_frac) << "," << rec.min_degree
               << "," << rec.max_degree << "\n";
        }
    }
}

void write_trajectory_json(std::ostream& os, const ExperimentConfig& cfg,
                           int d_value,
                           const std::vector<SingleRunOutput>& outs) {
    JsonWriter jw(os);
    jw.begin_object();
    jw.key("generator").value(regeneration_command(cfg, d_value));
    jw.key("rows").begin_array();
    for (const SingleRunOutput& out : outs) {
        for (const TrajectoryRecord& rec : out.trajectory) {
            jw.begin_object();
            jw.key("run_id").value(out.index);
            jw.key("d").value(d_value);
            jw.key("mode").value(cfg.mode);
            jw.key("i").value(rec.i);
            jw.key("t").value(rec.t);
            if (rec.j >= 0)
                jw.key("j").value(int64_t(rec.j));
            else
                jw.key("j").value_null();
            jw.key("O").value(rec.open_count);
            jw.key("W_mean").value(rec.w_mean);
            jw.key("X_mean").value(rec.x_mean);
            jw.key("Y_mean").value(rec.y_mean);
            jw.key("y_zero_frac").value(rec.y_zero_frac);
            jw.key("isolated_frac").value(rec.isolated_frac);
            jw.key("min_deg").value(uint64_t(rec.min_degree));
            jw.key("max_deg").value(uint64_t(rec.max_degree));
            jw.end_object();
        }
    }
    jw.end_array();
    jw.end_object();
    jw.finish();
}

void write_results_array(JsonWriter& jw,
                         const std::vector<SingleRunOutput>& outs,
                         bool goodedges) {
    jw.key("results").begin_array();
    for (const SingleRunOutput& out : outs) {
        jw.begin_object();
        jw.key("run").value(out.index);
        jw.key("seed").value(out.seed);
        if (!out.error.empty()) {
            jw.key("error").value(out.error);
            jw.end_object();
            continue;
        }
        jw.key("M").value(out.M);
        jw.key("saturated").value(out.saturated);
        jw.key("ratio").value(out.ratio);
        if (out.clock_ties > 0) jw.key("clock_ties").value(out.clock_ties);
        if (goodedges) {
            jw.key("good_count").value(out.good_count);
            jw.key("good_subset").value(out.good_subset);
        } else {
            jw.key("min_deg").value(uint64_t(out.min_degree));
            jw.key("max_deg").value(uint64_t(out.max_degree));
            jw.key("deg_frac_at_c").value(out.degree_frac_at_c);
        }
        if (!out.empty_subcubes.empty()) {
            jw.key("empty_subcubes").begin_object();
            for (const auto& [k, count] : out.empty_subcubes)
                jw.key(std::to_string(k)).value(count);
            jw.end_object();
        }
        if (!out.checkpoints.empty()) {
            jw.key("checkpoints").begin_array();
            for (const CheckpointRow& cp : out.checkpoints) {
                jw.begin_object();
                jw.key("j").value(cp.j);
                jw.key("i").value(cp.i);
                jw.key("isolated_frac").value(cp.isolated_frac);
                jw.key("y_zero_frac").value(cp.y_zero_frac);
                jw.end_object();
            }
            jw.end_array();
        }
        jw.end_object();
    }
    jw.end_array();
}

} // namespace

SingleRunOutput run_single(const ExperimentConfig& cfg, Dim d,
                           uint64_t index) {
    RunSeeds seeds = derive_seeds(cfg.seed, index);
    SingleRunOutput out;
    out.index = index;
    out.seed = seeds.process;

    Rng sample_rng(seeds.sampling);
    std::vector<EdgeIndex> pairs =
        sample_adjacent_pairs(d, cfg.sample_pairs, sample_rng);

    RunHooks hooks;
    hooks.snapshot_cadence = cfg.snapshot_cadence;
    if (cfg.write_trajectory) {
        hooks.on_snapshot = [&](const SnapshotContext& ctx) {
            out.trajectory.push_back(snapshot(ctx.state, pairs,
                                              ctx.scan_position,
                                              ctx.h_degrees));
        };
    }
    hooks.scan_checkpoints = cfg.scan_checkpoints;
    hooks.on_scan_checkpoint = [&](const ScanCheckpointContext& ctx) {
        out.checkpoints.push_back(CheckpointRow{
            ctx.scan_position, ctx.state.edges_added(),
            isolated_pair_fraction(
                std::span<const uint16_t>(ctx.h_degrees), d),
            y_zero_fraction_exact(ctx.state)});
    };

    ProcessResult res;
    if (cfg.mode == "permutation") {
        Rng rng(seeds.process);
        ClockAssignment clocks = random_clocks(d, rng);
        res = run_permutation(d, clocks, &hooks);
    } else {
        res = run_uniform(d, Rng(seeds.process), &hooks);
    }

    out.M = res.M;
    out.clock_ties = res.clock_ties;
    out.saturated = is_saturated(res.final_edges, d);
    out.ratio = double(res.M) / pow_scale(d);
    DegreeSummary deg = degree_summary(res.final_edges, d, cfg.degree_c);
    out.min_degree = deg.min_degree;
    out.max_degree = deg.max_degree;
    out.degree_frac_at_c = deg.frac_at_least_threshold;
    for (int k : cfg.subcube_ks)
        out.empty_subcubes.emplace_back(
            k, empty_subcube_count(res.final_edges, k, d));
    return out;
}

int cmd_run(const ExperimentConfig& cfg) {
    Dim d(cfg.d);
    guard_dimension(cfg, cfg.d);
    int workers = resolved_workers(cfg);

    auto outs = parallel_map(cfg.runs, workers, [&](uint64_t i) {
        return run_single(cfg, d, i);
    });

    uint64_t failed = 0;
    std::vector<double> ms, ratios;
    bool all_saturated = true;
    for (const SingleRunOutput& out : outs) {
        if (!out.error.empty()) {
            ++failed;
            continue;
        }
        ms.push_back(double(out.M));
        ratios.push_back(out.ratio);
        all_saturated = all_saturated && out.saturated;
    }
    MeanSE m = mean_se(ms), ratio = mean_se(ratios);

    if (cfg.write_trajectory) {
        std::string path = cfg.out_prefix +
                           (cfg.format == "json" ? ".trajectory.json"
                                                 : ".trajectory.csv");
        auto os = open_output(path);
        if (cfg.format == "json")
            write_trajectory_json(os, cfg, cfg.d, outs);
        else
            write_trajectory_csv(os, cfg, cfg.d, outs);
    }

    {
        auto os = open_output(cfg.out_prefix + ".manifest.json");
        JsonWriter jw(os);
        jw.begin_object();
        echo_config(jw, cfg, cfg.d);
        jw.key("seeds").begin_array();
        for (const SingleRunOutput& out : outs) jw.value(out.seed);
        jw.end_array();
        write_results_array(jw, outs, false);
        jw.key("aggregates").begin_object();
        jw.key("runs").value(cfg.runs);
        jw.key("failed").value(failed);
        jw.key("M_mean").value(m.mean);
        jw.key("M_se").value(m.se);
        jw.key("ratio_mean").value(ratio.mean);
        jw.key("saturated_all").value(all_saturated);
        jw.key("exit_status").value(failed == 0 ? "ok" : "partial");
        if (cfg.timestamps) jw.key("timestamp").value(iso_timestamp());
        jw.end_object();
        jw.key("version").value(kVersion);
        jw.end_object();
        jw.finish();
    }

    std::cout << "run: d=" << cfg.d << " mode=" << cfg.mode
              << " runs=" << cfg.runs << " M_mean=" << m.mean
              << " ratio_mean=" << ratio.mean
              << " saturated_all=" << (all_saturated ? "yes" : "no")
              << (failed ? " FAILED_RUNS" : "") << "\n";
    return failed == 0 ? kExitOk : kExitRuntime;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    guard_dimension(cfg, cfg.d_max);
    int workers = resolved_workers(cfg);
    int nd = cfg.d_max - cfg.d_min + 1;
    uint64_t total = uint64_t(nd) * cfg.runs;

    // One flat task list over (d, run); seeds derive from a (d, run) key so
    // that per-run streams are stable under any partitioning.
    ExperimentConfig run_cfg = cfg;
    run_cfg.write_trajectory = false;
    auto outs = parallel_map(total, workers, [&](uint64_t task) {
        int d_value = cfg.d_min + int(task / cfg.runs);
        uint64_t run = task % cfg.runs;
        uint64_t key = (uint64_t(uint32_t(d_value)) << 32) | run;
        return run_single(run_cfg, Dim(d_value), key);
    });

    uint64_t failed = 0;
    std::vector<int> ds;
    std::vector<double> mean_ms;
    struct Row {
        int d;
        MeanSE m;
        double ratio, conj_ratio;
        bool all_saturated;
    };
    std::vector<Row> rows;
    for (int di = 0; di < nd; ++di) {
        int d_value = cfg.d_min + di;
        std::vector<double> ms;
        bool sat = true;
        for (uint64_t r = 0; r < cfg.runs; ++r) {
            const SingleRunOutput& out = outs[uint64_t(di) * cfg.runs + r];
            if (!out.error.empty()) {
                ++failed;
                continue;
            }
            ms.push_back(double(out.M));
            sat = sat && out.saturated;
        }
        MeanSE m = mean_se(ms);
        Row row;
        row.d = d_value;
        row.m = m;
        row.ratio = m.mean / pow_scale(Dim(d_value));
        row.conj_ratio = m.mean / ode::conjecture_scale(d_value);
        row.all_saturated = sat;
        rows.push_back(row);
        ds.push_back(d_value);
        mean_ms.push_back(m.mean);
    }
    double slope = fit_log_slope(ds, mean_ms);

    if (cfg.format == "json") {
        auto os = open_output(cfg.out_prefix + ".sweep.json");
        JsonWriter jw(os);
        jw.begin_object();
        jw.key("generator").value(regeneration_command(cfg, 0));
        jw.key("rows").begin_array();
        for (const Row& row : rows) {
            jw.begin_object();
            jw.key("d").value(row.d);
            jw.key("runs").value(cfg.runs);
            jw.key("M_mean").value(row.m.mean);
            jw.key("M_se").value(row.m.se);
            jw.key("ratio_d23").value(row.ratio);
            jw.key("ratio_conjecture").value(row.conj_ratio);
            jw.end_object();
        }
        jw.end_array();
        jw.end_object();
        jw.finish();
    } else {
        auto os = open_output(cfg.out_prefix + ".sweep.csv");
        os << "# " << regeneration_command(cfg, 0) << "\n";
        os << "d,runs,M_mean,M_se,ratio_d23,ratio_conjecture\n";
        for (const Row& row : rows)
            os << row.d << "," << cfg.runs << "," << fmt_double17(row.m.mean)
               << "," << fmt_double17(row.m.se) << ","
               << fmt_double17(row.ratio) << ","
               << fmt_double17(row.conj_ratio) << "\n";
    }
    {
        auto os = open_output(cfg.out_prefix + ".manifest.json");
        JsonWriter jw(os);
        jw.begin_object();
        echo_config(jw, cfg, 0);
        jw.key("seeds").begin_array();
        for (const SingleRunOutput& out : outs) jw.value(out.seed);
        jw.end_array();
        jw.key("results").begin_array();
        for (const Row& row : rows) {
            jw.begin_object();
            jw.key("d").value(row.d);
            jw.key("M_mean").value(row.m.mean);
            jw.key("M_se").value(row.m.se);
            jw.key("ratio_d23").value(row.ratio);
            jw.key("ratio_conjecture").value(row.conj_ratio);
            jw.key("saturated_all").value(row.all_saturated);
            jw.end_object();
        }
        jw.end_array();
        jw.key("aggregates").begin_object();
        jw.key("runs_per_d").value(cfg.runs);
        jw.key("failed").value(failed);
        jw.key("log_slope").value(slope);
        jw.key("exit_status").value(failed == 0 ? "ok" : "partial");
        if (cfg.timestamps) jw.key("timestamp").value(iso_timestamp());
        jw.end_object();
        jw.key("version").value(kVersion);
        jw.end_object();
        jw.finish();
    }

    std::cout << "sweep: d=" << cfg.d_min << ".." << cfg.d_max
              << " slope=" << slope << (failed ? " FAILED_RUNS" : "") << "\n";
    return failed == 0 ? kExitOk : kExitRuntime;
}

int cmd_goodedges(const ExperimentConfig& cfg) {
    Dim d(cfg.d);
    guard_dimension(cfg, cfg.d);
    int workers = resolved_workers(cfg);

    auto outs = parallel_map(cfg.runs, workers, [&](uint64_t i) {
        RunSeeds seeds = derive_seeds(cfg.seed, i);
        SingleRunOutput out;
        out.index = i;
        out.seed = seeds.process;
        Rng rng(seeds.process);
        ClockAssignment clocks = random_clocks(d, rng);
        EdgeSet good = good_edges(clocks, d);
        ProcessResult res = run_permutation(d, clocks, nullptr);
        out.M = res.M;
        out.clock_ties = res.clock_ties;
        out.saturated = is_saturated(res.final_edges, d);
        out.ratio = double(res.M) / pow_scale(d);
        out.good_count = good.count();
        out.good_subset = good.is_subset_of(res.final_edges);
        return out;
    });

    uint64_t failed = 0, subset_ok = 0, completed = 0;
    std::vector<double> goods;
    for (const SingleRunOutput& out : outs) {
        if (!out.error.empty()) {
            ++failed;
            continue;
        }
        ++completed;
        subset_ok += out.good_subset;
        goods.push_back(double(out.good_count));
    }
    MeanSE g = mean_se(goods);
    double expected = expected_good_count(cfg.d);
    double z = g.se > 0 ? (g.mean - expected) / g.se : 0.0;

    if (cfg.format == "json") {
        auto os = open_output(cfg.out_prefix + ".goodedges.json");
        JsonWriter jw(os);
        jw.begin_object();
        jw.key("generator").value(regeneration_command(cfg, cfg.d));
        jw.key("rows").begin_array();
        for (const SingleRunOutput& out : outs) {
            if (!out.error.empty()) continue;
            jw.begin_object();
            jw.key("run_id").value(out.index);
            jw.key("d").value(cfg.d);
            jw.key("good_count").value(out.good_count);
            jw.key("good_subset").value(out.good_subset);
            jw.key("M").value(out.M);
            jw.end_object();
        }
        jw.end_array();
        jw.end_object();
        jw.finish();
    } else {
        auto os = open_output(cfg.out_prefix + ".goodedges.csv");
        os << "# " << regeneration_command(cfg, cfg.d) << "\n";
        os << "run_id,d,good_count,good_subset,M\n";
        for (const SingleRunOutput& out : outs) {
            if (!out.error.empty()) continue;
            os << out.index << "," << cfg.d << "," << out.good_count << ","
               << (out.good_subset ? 1 : 0) << "," << out.M << "\n";
        }
    }
    {
        auto os = open_output(cfg.out_prefix + ".manifest.json");
        JsonWriter jw(os);
        jw.begin_object();
        echo_config(jw, cfg, cfg.d);
        jw.key("seeds").begin_array();
        for (const SingleRunOutput& out : outs) jw.value(out.seed);
        jw.end_array();
        write_results_array(jw, outs, true);
        jw.key("aggregates").begin_object();
        jw.key("runs").value(cfg.runs);
        jw.key("failed").value(failed);
        jw.key("subset_pass_rate").value(
            completed ? double(subset_ok) / double(completed) : 0.0);
        jw.key("good_mean").value(g.mean);
        jw.key("good_se").value(g.se);
        jw.key("expected_good").value(expected);
        jw.key("z_score").value(z);
        jw.key("exit_status").value(failed == 0 ? "ok" : "partial");
        if (cfg.timestamps) jw.key("timestamp").value(iso_timestamp());
        jw.end_object();
        jw.key("version").value(kVersion);
        jw.end_object();
        jw.finish();
    }

    std::cout << "goodedges: d=" << cfg.d << " runs=" << cfg.runs
              << " mean=" << g.mean << " expected=" << expected
              << " z=" << z << " subset_pass="
              << (completed ? double(subset_ok) / double(completed) : 0.0)
              << (failed ? " FAILED_RUNS" : "") << "\n";
    return failed == 0 ? kExitOk : kExitRuntime;
}

double fit_log_slope(const std::vector<int>& ds,
                     const std::vector<double>& mean_m) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = ds.size();
    for (size_t i = 0; i < n; ++i) {
        double x = std::log(double(ds[i]));
        double y = std::log(mean_m[i]) - double(ds[i]) * std::log(2.0);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = double(n) * sxx - sx * sx;
    return (double(n) * sxy - sx * sy) / denom;
}

namespace {

std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path,
                                                  uint64_t run_id,
                                                  int& d_out) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open trajectory CSV: " + path);
    std::vector<TrajectoryRecord> records;
    std::string line;
    bool header_seen = false;
    d_out = 0;
    auto field_double = [](const std::string& f) {
        return f.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : std::strtod(f.c_str(), nullptr);
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) { // column-name row
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        while (fields.size() < 14) fields.emplace_back();
        if (std::strtoull(fields[0].c_str(), nullptr, 10) != run_id) continue;
        TrajectoryRecord rec;
        d_out = int(std::strtol(fields[1].c_str(), nullptr, 10));
        rec.i = std::strtoull(fields[3].c_str(), nullptr, 10);
        rec.t = field_double(fields[4]);
        rec.j = fields[5].empty()
                    ? -1
                    : int64_t(std::strtoll(fields[5].c_str(), nullptr, 10));
        rec.open_count = std::strtoull(fields[6].c_str(), nullptr, 10);
        rec.w_mean = field_double(fields[7]);
        rec.x_mean = field_double(fields[8]);
        rec.y_mean = field_double(fields[9]);
        rec.y_zero_frac = field_double(fields[10]);
        rec.isolated_frac = field_double(fields[11]);
        records.push_back(rec);
    }
    return records;
}

} // namespace

int cmd_ode(const ExperimentConfig& cfg) {
    ode::OdeTrajectory traj = ode::integrate(cfg.t_max, cfg.ode_step);

    double sup_q = 0, sup_w = 0, sup_x = 0, sup_y = 0;
    double id_w = 0, id_y = 0;
    for (const ode::OdeState& s : traj.states) {
        ode::OdeState exact = ode::closed_form(s.t);
        sup_q = std::max(sup_q, std::abs(s.q - exact.q));
        sup_w = std::max(sup_w, std::abs(s.w - exact.w));
        sup_x = std::max(sup_x, std::abs(s.x - exact.x));
        sup_y = std::max(sup_y, std::abs(s.y - exact.y));
        // Identities of the closed forms: w = 8 q^3 and y = 24 t^2 q.
        id_w = std::max(id_w,
                        std::abs(exact.w - 8.0 * exact.q * exact.q * exact.q));
        id_y = std::max(id_y,
                        std::abs(exact.y - 24.0 * s.t * s.t * exact.q));
    }
    double sup_all = std::max(std::max(sup_q, sup_w), std::max(sup_x, sup_y));

    if (cfg.format == "json") {
        auto os = open_output(cfg.out_prefix + ".ode.json");
        JsonWriter jw(os);
        jw.begin_object();
        jw.key("generator").value(regeneration_command(cfg, 0));
        jw.key("rows").begin_array();
        for (const ode::OdeState& s : traj.states) {
            ode::OdeState exact = ode::closed_form(s.t);
            jw.begin_object();
            jw.key("t").value(s.t);
            jw.key("q").value(s.q);
            jw.key("w").value(s.w);
            jw.key("x").value(s.x);
            jw.key("y").value(s.y);
            jw.key("q_closed").value(exact.q);
            jw.key("w_closed").value(exact.w);
            jw.key("x_closed").value(exact.x);
            jw.key("y_closed").value(exact.y);
            jw.end_object();
        }
        jw.end_array();
        jw.end_object();
        jw.finish();
    } else {
        auto os = open_output(cfg.out_prefix + ".ode.csv");
        os << "# " << regeneration_command(cfg, 0) << "\n";
        os << "t,q,w,x,y,q_closed,w_closed,x_closed,y_closed\n";
        for (const ode::OdeState& s : traj.states) {
            ode::OdeState exact = ode::closed_form(s.t);
            os << fmt_double17(s.t) << "," << fmt_double17(s.q) << ","
               << fmt_double17(s.w) << "," << fmt_double17(s.x) << ","
               << fmt_double17(s.y) << "," << fmt_double17(exact.q) << ","
               << fmt_double17(exact.w) << "," << fmt_double17(exact.x)
               << "," << fmt_double17(exact.y) << "\n";
        }
    }
    {
        auto os = open_output(cfg.out_prefix + ".manifest.json");
        JsonWriter jw(os);
        jw.begin_object();
        echo_config(jw, cfg, 0);
        jw.key("seeds").begin_array().end_array();
        jw.key("results").begin_array();
        jw.begin_object();
        jw.key("sup_err_q").value(sup_q);
        jw.key("sup_err_w").value(sup_w);
        jw.key("sup_err_x").value(sup_x);
        jw.key("sup_err_y").value(sup_y);
        jw.key("sup_err").value(sup_all);
        jw.key("identity_w_8q3_max").value(id_w);
        jw.key("identity_y_24t2q_max").value(id_y);
        jw.end_object();
        jw.end_array();
        jw.key("aggregates").begin_object();
        jw.key("steps").value(uint64_t(traj.states.size() - 1));
        jw.key("exit_status").value("ok");
        if (cfg.timestamps) jw.key("timestamp").value(iso_timestamp());
        jw.end_object();
        jw.key("version").value(kVersion);
        jw.end_object();
        jw.finish();
    }

    if (!cfg.overlay_csv.empty()) {
        int d_value = 0;
        auto records =
            read_trajectory_csv(cfg.overlay_csv, cfg.overlay_run, d_value);
        if (records.empty())
            throw std::runtime_error("overlay: no rows for run " +
                                     std::to_string(cfg.overlay_run));
        auto rows = ode::overlay(records, Dim(d_value));
        auto os = open_output(cfg.out_prefix + ".overlay.csv");
        os << "# overlay of " << cfg.overlay_csv << " run "
           << cfg.overlay_run << "\n";
        os << "i,t,O_scaled,q_pred,W_scaled,w_pred,X_scaled,x_pred,Y_scaled,"
              "y_pred,y_zero_frac\n";
        for (const ode::OverlayRow& row : rows)
            os << row.i << "," << fmt_double17(row.t) << ","
               << fmt_double17(row.open_scaled) << ","
               << fmt_double17(row.q_pred) << ","
               << csv_double(row.w_scaled) << "," << fmt_double17(row.w_pred)
               << "," << csv_double(row.x_scaled) << ","
               << fmt_double17(row.x_pred) << "," << csv_double(row.y_scaled)
               << "," << fmt_double17(row.y_pred) << ","
               << csv_double(row.y_zero_frac) << "\n";
    }

    std::cout << "ode: steps=" << traj.states.size() - 1
              << " sup_err=" << sup_all << " identity_w=" << id_w
              << " identity_y=" << id_y << "\n";
    return kExitOk;
}

int cmd_oracle(const ExperimentConfig& cfg) {
    Dim d(cfg.d);
    oracle::SaturatedCatalog catalog = oracle::enumerate_saturated(d);
    oracle::ExactDistribution dist = oracle::exact_M_distribution(d);

    {
        auto os = open_output(cfg.out_prefix + ".catalog.json");
        JsonWriter jw(os);
        jw.begin_object();
        jw.key("d").value(catalog.d);
        jw.key("count").value(uint64_t(catalog.edge_masks.size()));
        jw.key("size_histogram").begin_object();
        for (const auto& [size, count] : catalog.size_histogram)
            jw.key(std::to_string(size)).value(count);
        jw.end_object();
        jw.key("edge_masks").begin_array();
        for (uint32_t mask : catalog.edge_masks) jw.value(uint64_t(mask));
        jw.end_array();
        jw.key("version").value(kVersion);
        jw.end_object();
        jw.finish();
    }
    {
        auto os = open_output(cfg.out_prefix + ".distribution.json");
        JsonWriter jw(os);
        jw.begin_object();
        jw.key("d").value(dist.d);
        jw.key("kind").value("uniform-process-exact");
        jw.key("pmf").begin_object();
        for (const auto& [m, p] : dist.pmf) {
            std::ostringstream rs;
            rs << p;
            jw.key(std::to_string(m)).value(rs.str());
        }
        jw.end_object();
        jw.key("pmf_float").begin_object();
        for (const auto& [m, p] : dist.pmf)
            jw.key(std::to_string(m)).value(p.convert_to<double>());
        jw.end_object();
        jw.key("version").value(kVersion);
        jw.end_object();
        jw.finish();
    }

    std::cout << "oracle: d=" << cfg.d << " saturated_graphs="
              << catalog.edge_masks.size() << " support="
              << dist.pmf.size() << "\n";
    return kExitOk;
}

int cmd_report(const ExperimentConfig& cfg) {
    std::ifstream is(cfg.manifest_path);
    if (!is)
        throw std::runtime_error("cannot open manifest: " + cfg.manifest_path);
    nlohmann::json manifest = nlohmann::json::parse(is);

    std::vector<std::string> violations;
    auto command = manifest.at("config").value("command", "");
    auto& results = manifest.at("results");
    auto& aggregates = manifest.at("aggregates");

    std::cout << "manifest: command=" << command
              << " version=" << manifest.value("version", "?") << "\n";
    std::cout << "runs recorded: " << results.size() << "\n";

    if (manifest.contains("seeds") &&
        manifest.at("seeds").size() != results.size() &&
        (command == "run" || command == "goodedges"))
        violations.push_back("seed count does not match result count");

    if (command == "run" || command == "goodedges") {
        std::vector<double> ms;
        std::map<uint64_t, uint64_t> m_counts;
        for (auto& r : results) {
            if (r.contains("error")) {
                violations.push_back("run " +
                                     std::to_string(r.value("run", 0)) +
                                     " failed: " + r.value("error", ""));
                continue;
            }
            if (!r.value("saturated", false))
                violations.push_back("run " +
                                     std::to_string(r.value("run", 0)) +
                                     " final graph not saturated");
            uint64_t m = r.value("M", uint64_t(0));
            ms.push_back(double(m));
            ++m_counts[m];
            if (command == "goodedges" && !r.value("good_subset", false))
                violations.push_back("run " +
                                     std::to_string(r.value("run", 0)) +
                                     " good edges not a subset");
        }
        if (!ms.empty()) {
            double mean = 0;
            for (double v : ms) mean += v;
            mean /= double(ms.size());
            std::cout << "M mean: " << mean << "\n";
            double recorded = aggregates.value(
                command == "run" ? "M_mean" : "good_mean", mean);
            if (command == "run" &&
                std::abs(recorded - mean) > 1e-9 * std::max(1.0, mean))
                violations.push_back("aggregate M_mean inconsistent with results");
        }
        if (!cfg.oracle_path.empty()) {
            std::ifstream ois(cfg.oracle_path);
            if (!ois)
                throw std::runtime_error("cannot open oracle file: " +
                                         cfg.oracle_path);
            nlohmann::json pin = nlohmann::json::parse(ois);
            double tv = 0.0;
            uint64_t total = 0;
            for (const auto& [m, c] : m_counts) total += c;
            std::map<uint64_t, double> exact;
            for (auto& [key, val] : pin.at("pmf_float").items())
                exact[std::strtoull(key.c_str(), nullptr, 10)] =
                    val.get<double>();
            for (const auto& [m, p] : exact) {
                auto it = m_counts.find(m);
                double emp =
                    it == m_counts.end() ? 0.0 : double(it->second) / total;
                tv += std::abs(emp - p);
            }
            for (const auto& [m, c] : m_counts)
                if (!exact.count(m)) tv += double(c) / total;
            tv *= 0.5;
            std::cout << "TV distance vs oracle: " << tv << "\n";
            if (tv >= cfg.tv_tol)
                violations.push_back("TV distance " + fmt_double17(tv) +
                                     " exceeds tolerance " +
                                     fmt_double17(cfg.tv_tol));
        }
    }

    std::string status = aggregates.value("exit_status", "ok");
    if (status != "ok")
        violations.push_back("manifest exit_status is '" + status + "'");

    if (cfg.check) {
        if (violations.empty()) {
            std::cout << "check: PASS\n";
            return kExitOk;
        }
        for (const std::string& v : violations)
            std::cout << "check violation: " << v << "\n";
        std::cout << "check: FAIL\n";
        return kExitCheckFailed;
    }
    for (const std::string& v : violations)
        std::cout << "note: " << v << "\n";
    return kExitOk;
}

int dispatch(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    std::sort(cfg.scan_checkpoints.begin(), cfg.scan_checkpoints.end());
    try {
        if (cfg.command == "run" || cfg.command == "goodedges") {
            if (cfg.d < 1) throw UsageError("--d is required and must be >= 1");
            if (cfg.runs < 1) throw UsageError("--runs must be >= 1");
        }
        if (cfg.command == "run") {
            if (cfg.mode != "uniform" && cfg.mode != "permutation")
                throw UsageError("--mode must be uniform or permutation");
            if (!cfg.scan_checkpoints.empty() && cfg.mode != "permutation")
                throw UsageError("--j-checkpoint requires --mode permutation");
            if (cfg.sample_pairs < 1)
                throw UsageError("--pairs must be >= 1");
            for (int k : cfg.subcube_ks)
                if (k < 1 || k > cfg.d)
                    throw UsageError("--subcube-k must lie in [1, d]");
            return cmd_run(cfg);
        }
        if (cfg.command == "sweep") {
            if (cfg.d_min < 1 || cfg.d_max < cfg.d_min)
                throw UsageError("sweep needs 1 <= --d-min <= --d-max");
            if (cfg.runs < 1) throw UsageError("--runs must be >= 1");
            return cmd_sweep(cfg);
        }
        if (cfg.command == "goodedges") return cmd_goodedges(cfg);
        if (cfg.command == "ode") {
            if (!(cfg.t_max > 0) || !(cfg.ode_step > 0))
                throw UsageError("--t-max and --step must be positive");
            return cmd_ode(cfg);
        }
        if (cfg.command == "oracle") {
            if (cfg.d < 1 || cfg.d > 3)
                throw UsageError("oracle: exhaustive enumeration needs d <= 3");
            return cmd_oracle(cfg);
        }
        if (cfg.command == "report") {
            if (cfg.manifest_path.empty())
                throw UsageError("report: --manifest is required");
            return cmd_report(cfg);
        }
        throw UsageError("unknown command: " + cfg.command);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace qsat::lab
