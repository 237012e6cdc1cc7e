// Timings of the whole-cube scan kernels, serial reference vs OpenMP, plus
// process-run throughput across worker counts.
//
// Usage: qsat_bench [--d N] [--reps N]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "qsat/engine.hpp"
#include "qsat/trajectory.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace qsat;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

template <class F>
double time_best_of(int reps, F&& fn) {
    double best = 1e99;
    for (int r = 0; r < reps; ++r) {
        auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, seconds_since(start));
    }
    return best;
}

volatile uint64_t g_sink; // keeps results observable

void report(const char* name, double serial, double parallel) {
    std::printf("%-24s %10.4f ms %10.4f ms %8.2fx\n", name, serial * 1e3,
                parallel * 1e3, parallel > 0 ? serial / parallel : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    int dval = 16;
    int reps = 3;
    for (int a = 1; a + 1 < argc; a += 2) {
        if (std::strcmp(argv[a], "--d") == 0) dval = std::atoi(argv[a + 1]);
        if (std::strcmp(argv[a], "--reps") == 0)
            reps = std::atoi(argv[a + 1]);
    }
    Dim d(dval);

#ifdef _OPENMP
    std::printf("d=%d  edges=%llu  threads=%d\n", dval,
                (unsigned long long)d.edge_count(), omp_get_max_threads());
#else
    std::printf("d=%d  edges=%llu  (no OpenMP)\n", dval,
                (unsigned long long)d.edge_count());
#endif

    // One saturated graph, one mid-run state, one clock assignment.
    ProcessResult finals = run_uniform(d, Rng(1));
    ProcessState mid(d, Rng(2));
    uint64_t target = d.edge_count() / 8;
    while (mid.edges_added() < target && mid.open_count() > 0)
        mid.step_uniform();
    Rng crng(3);
    ClockAssignment clocks = random_clocks(d, crng);
    std::vector<uint16_t> degrees(d.vertex_count(), 0);
    mid.present_edges().for_each([&](EdgeIndex idx) {
        EdgeRef e = edge_from_index_fast(idx, d.value);
        ++degrees[e.u()];
        ++degrees[e.v()];
    });

    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "openmp",
                "speedup");

    report("is_saturated",
           time_best_of(reps, [&] {
               g_sink = kernels::is_saturated_serial(finals.final_edges, d);
           }),
           time_best_of(reps, [&] {
               g_sink = kernels::is_saturated_parallel(finals.final_edges, d);
           }));

    report("contains_q2",
           time_best_of(reps, [&] {
               g_sink = kernels::contains_q2_serial(finals.final_edges, d);
           }),
           time_best_of(reps, [&] {
               g_sink = kernels::contains_q2_parallel(finals.final_edges, d);
           }));

    report("good_edges",
           time_best_of(reps, [&] {
               g_sink = kernels::good_edges_serial(clocks.values, d).count();
           }),
           time_best_of(reps, [&] {
               g_sink =
                   kernels::good_edges_parallel(clocks.values, d).count();
           }));

    report("isolated_pair_count",
           time_best_of(reps, [&] {
               g_sink = kernels::isolated_pair_count_serial(degrees, d);
           }),
           time_best_of(reps, [&] {
               g_sink = kernels::isolated_pair_count_parallel(degrees, d);
           }));

    report("empty_subcube_count k=2",
           time_best_of(reps, [&] {
               g_sink = kernels::empty_subcube_count_serial(
                   finals.final_edges, 2, d);
           }),
           time_best_of(reps, [&] {
               g_sink = kernels::empty_subcube_count_parallel(
                   finals.final_edges, 2, d);
           }));

    report("y_zero_fraction_exact",
           time_best_of(reps,
                        [&] { g_sink = uint64_t(
                                  y_zero_fraction_exact_serial(mid) * 1e9); }),
           time_best_of(reps, [&] {
               g_sink = uint64_t(y_zero_fraction_exact_parallel(mid) * 1e9);
           }));

    // Whole-run throughput: independent runs in parallel (how the lab's
    // Monte Carlo loop scales).
    const int batch = 16;
    auto run_batch = [&](int workers) {
        auto start = std::chrono::steady_clock::now();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
        for (int r = 0; r < batch; ++r)
            g_sink = run_uniform(d, Rng::for_run(42, uint64_t(r))).M;
        return seconds_since(start);
    };
    double t1 = run_batch(1);
#ifdef _OPENMP
    int full = omp_get_max_threads();
#else
    int full = 1;
#endif
    double tn = run_batch(full);
    std::printf("%-24s %10.4f ms %10.4f ms %8.2fx  (%d runs, %d threads)\n",
                "uniform run batch", t1 * 1e3, tn * 1e3,
                tn > 0 ? t1 / tn : 0.0, batch, full);
    return 0;
}
