// Command-line driver for the Q_2-free process laboratory.

#include <CLI11.hpp>

#include "qsat/lab.hpp"

int main(int argc, char** argv) {
    using qsat::lab::ExperimentConfig;
    ExperimentConfig cfg;

    CLI::App app{"Simulation and analysis lab for the Q_2-free process in "
                 "the hypercube Q_d"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--workers", cfg.workers,
                        "worker threads (0 = all); never affects results");
        sub->add_option("--out", cfg.out_prefix, "output file prefix");
        sub->add_option("--format", cfg.format, "table format: csv | json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--timestamps", cfg.timestamps,
                      "record a wall-clock timestamp in the manifest "
                      "(breaks byte-identical reruns)");
    };

    CLI::App* run = app.add_subcommand("run", "simulate process runs");
    run->add_option("--d", cfg.d, "hypercube dimension")->required();
    run->add_option("--runs", cfg.runs, "number of independent runs");
    run->add_option("--seed", cfg.seed, "master seed");
    run->add_option("--mode", cfg.mode, "uniform | permutation")
        ->check(CLI::IsMember({"uniform", "permutation"}));
    run->add_option("--cadence", cfg.snapshot_cadence,
                    "steps between snapshots (0 = auto)");
    run->add_option("--pairs", cfg.sample_pairs,
                    "sampled adjacent pairs per run");
    run->add_option("--degree-c", cfg.degree_c,
                    "degree threshold constant c");
    run->add_option("--subcube-k", cfg.subcube_ks,
                    "report empty Q_k counts for these k");
    run->add_option("--j-checkpoint", cfg.scan_checkpoints,
                    "scan positions j for exact H(j) measurements "
                    "(permutation mode)");
    run->add_flag("--force-large", cfg.force_large,
                  "allow d > 22 despite the memory cost");
    run->add_flag("!--no-trajectory", cfg.write_trajectory,
                  "skip the trajectory file");
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "scaling sweep over d");
    sweep->add_option("--d-min", cfg.d_min, "smallest d")->required();
    sweep->add_option("--d-max", cfg.d_max, "largest d")->required();
    sweep->add_option("--runs", cfg.runs, "runs per dimension");
    sweep->add_option("--seed", cfg.seed, "master seed");
    sweep->add_flag("--force-large", cfg.force_large,
                    "allow d > 22 despite the memory cost");
    add_common(sweep);

    CLI::App* good = app.add_subcommand(
        "goodedges", "good-edge counts vs the exact expectation");
    good->add_option("--d", cfg.d, "hypercube dimension")->required();
    good->add_option("--runs", cfg.runs, "number of clock draws");
    good->add_option("--seed", cfg.seed, "master seed");
    good->add_flag("--force-large", cfg.force_large,
                   "allow d > 22 despite the memory cost");
    add_common(good);

    CLI::App* ode = app.add_subcommand(
        "ode", "integrate the trajectory heuristic and compare closed forms");
    ode->add_option("--t-max", cfg.t_max, "integration window end");
    ode->add_option("--step", cfg.ode_step, "fixed step size");
    ode->add_option("--overlay", cfg.overlay_csv,
                    "trajectory CSV to overlay against the predictions");
    ode->add_option("--overlay-run", cfg.overlay_run,
                    "run_id within the overlay CSV");
    add_common(ode);

    CLI::App* oracle =
        app.add_subcommand("oracle", "exact small-d ground truth files");
    oracle->add_option("--d", cfg.d, "dimension (<= 3)")->required();
    add_common(oracle);

    CLI::App* report =
        app.add_subcommand("report", "summarize and check a manifest");
    report->add_option("--manifest", cfg.manifest_path, "manifest JSON path")
        ->required();
    report->add_flag("--check", cfg.check,
                     "validate the manifest; exit 3 on violation");
    report->add_option("--oracle", cfg.oracle_path,
                       "oracle distribution JSON to compare against");
    report->add_option("--tv-tol", cfg.tv_tol,
                       "total-variation tolerance for --check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return qsat::lab::kExitUsage;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.out_prefix.empty()) cfg.out_prefix = "qsat_" + cfg.command;
    return qsat::lab::dispatch(cfg);
}
