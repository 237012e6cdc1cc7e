#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include <map>

#include "qsat/engine.hpp"
#include "support/from_scratch.hpp"

using namespace qsat;

TEST_CASE("first step closes nothing and decrements O by one") {
    for (int dv : {2, 4, 6}) {
        Dim d(dv);
        ProcessState state(d, Rng(42));
        CHECK(state.open_count() == d.edge_count());
        StepOutcome out = state.step_uniform();
        CHECK(out.newly_closed == 0);
        CHECK(state.open_count() == d.edge_count() - 1);
        CHECK(state.edges_added() == 1);
        CHECK(state.status(edge_index(out.edge, d)) == PairStatus::Present);
    }
}

TEST_CASE("third edge of the 4-cycle closes the fourth") {
    Dim d(2);
    ProcessState state(d, Rng(0));
    // Edges of Q_2: (0,dir0), (2,dir0), (0,dir1), (1,dir1).
    CHECK(state.add_edge(EdgeRef{0, 0}) == 0);
    CHECK(state.add_edge(EdgeRef{2, 0}) == 0);
    CHECK(state.add_edge(EdgeRef{0, 1}) == 1);
    CHECK(state.open_count() == 0);
    CHECK(state.status(edge_index(EdgeRef{1, 1}, d)) == PairStatus::Closed);
}

TEST_CASE("d=1 and d=2 terminate at the exact M") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
        CHECK(run_uniform(Dim(1), Rng(seed)).M == 1);
        CHECK(run_uniform(Dim(2), Rng(seed)).M == 3);
    }
}

TEST_CASE("every permutation of E(Q_2) adds the first three scanned edges") {
    Dim d(2);
    // All 24 orders via clock values 0.1..0.4 permuted.
    std::vector<int> perm = {0, 1, 2, 3};
    int orders = 0;
    do {
        ClockAssignment clocks;
        clocks.values.resize(4);
        for (int i = 0; i < 4; ++i) clocks.values[perm[i]] = 0.1 * (i + 1);
        ProcessResult res = run_permutation(d, clocks);
        CHECK(res.M == 3);
        REQUIRE(res.scan_positions.size() == 3);
        CHECK(res.scan_positions == std::vector<uint64_t>{1, 2, 3});
        CHECK(!res.final_edges.test(EdgeIndex(perm[3])));
        ++orders;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(orders == 24);
}

TEST_CASE("uniform runs end saturated and stay square-free throughout") {
    for (int dv : {3, 4, 5, 6}) {
        Dim d(dv);
        RunHooks hooks;
        hooks.snapshot_cadence = 5;
        bool q2_seen = false;
        hooks.on_snapshot = [&](const SnapshotContext& ctx) {
            q2_seen = q2_seen || contains_q2(ctx.state.present_edges(), d);
        };
        ProcessResult res = run_uniform(d, Rng(1000 + dv), &hooks);
        CHECK(!q2_seen);
        CHECK(!contains_q2(res.final_edges, d));
        CHECK(is_saturated(res.final_edges, d));
        CHECK(res.final_edges.count() == res.M);
    }
}

TEST_CASE("permutation runs end saturated") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Dim d(5);
        Rng rng(seed);
        ClockAssignment clocks = random_clocks(d, rng);
        ProcessResult res = run_permutation(d, clocks);
        CHECK(is_saturated(res.final_edges, d));
        CHECK(res.clock_ties == 0);
        // scan positions strictly increase
        for (size_t i = 1; i < res.scan_positions.size(); ++i)
            CHECK(res.scan_positions[i] > res.scan_positions[i - 1]);
    }
}

TEST_CASE("step counting identity O_{i+1} = O_i - 1 - Y across a full run") {
    Dim d(6);
    ProcessState state(d, Rng(7));
    while (state.open_count() > 0) {
        EdgeSet present = state.present_edges();
        uint64_t open_before = state.open_count();
        StepOutcome out = state.step_uniform();
        WXYCounts pre = testsupport::wxy_from_scratch(
            present, out.edge.u(), out.edge.v(), d);
        CHECK(out.newly_closed == uint64_t(pre.y));
        CHECK(state.open_count() == open_before - 1 - out.newly_closed);
    }
    CHECK(is_saturated(state.present_edges(), d));
}

TEST_CASE("incremental statuses equal from-scratch statuses mid-run") {
    Dim d(5);
    ProcessState state(d, Rng(99));
    for (int step = 0; step < 40 && state.open_count() > 0; ++step)
        state.step_uniform();
    EdgeSet present = state.present_edges();
    for (EdgeIndex idx = 0; idx < d.edge_count(); ++idx) {
        auto scratch = testsupport::status_from_scratch(present, idx, d);
        PairStatus incr = state.status(idx);
        CHECK((incr == PairStatus::Open) ==
              (scratch == testsupport::ScratchStatus::Open));
        CHECK((incr == PairStatus::Present) ==
              (scratch == testsupport::ScratchStatus::Present));
    }
}

TEST_CASE("permutation equivalence: d=2 distribution is a point mass") {
    std::map<uint64_t, int> ms;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        ClockAssignment clocks = random_clocks(Dim(2), rng);
        ++ms[run_permutation(Dim(2), clocks).M];
    }
    CHECK(ms.size() == 1);
    CHECK(ms.count(3) == 1);
}

TEST_CASE("clock ties are detected and broken by index") {
    Dim d(2);
    ClockAssignment clocks;
    clocks.values = {0.5, 0.5, 0.25, 0.75};
    ProcessResult res = run_permutation(d, clocks);
    CHECK(res.clock_ties == 1);
    CHECK(res.M == 3);
    // Order: edge 2 (0.25), then 0 and 1 (tied 0.5, index order), then 3.
    CHECK(res.final_edges.test(2));
    CHECK(res.final_edges.test(0));
    CHECK(res.final_edges.test(1));
    CHECK(!res.final_edges.test(3));
}

TEST_CASE("identical rng gives identical runs, different rng varies") {
    Dim d(6);
    ProcessResult a = run_uniform(d, Rng(5), nullptr);
    ProcessResult b = run_uniform(d, Rng(5), nullptr);
    CHECK(a.M == b.M);
    CHECK(a.final_edges == b.final_edges);
    ProcessResult c = run_uniform(d, Rng(6), nullptr);
    CHECK(!(c.final_edges == a.final_edges));
}

TEST_CASE("step log records the exact addition sequence") {
    Dim d(4);
    RunHooks hooks;
    hooks.keep_step_log = true;
    ProcessResult res = run_uniform(d, Rng(3), &hooks);
    CHECK(res.step_log.size() == res.M);
    EdgeSet replay(d);
    for (const EdgeRef& e : res.step_log) replay.set(edge_index(e, d));
    CHECK(replay == res.final_edges);
}

TEST_CASE("saturation checker accepts and rejects correctly") {
    Dim d2(2);
    EdgeSet empty(d2);
    CHECK(!is_saturated(empty, d2)); // not maximal
    EdgeSet three(d2);
    three.set(0);
    three.set(1);
    three.set(2);
    CHECK(is_saturated(three, d2));
    EdgeSet full(d2);
    for (EdgeIndex i = 0; i < 4; ++i) full.set(i);
    CHECK(!is_saturated(full, d2)); // contains the square
    CHECK(contains_q2(full, d2));
    CHECK(!contains_q2(three, d2));

    // d=1: the full edge set is saturated, the empty one is not.
    Dim d1(1);
    EdgeSet one(d1);
    CHECK(!is_saturated(one, d1));
    one.set(0);
    CHECK(is_saturated(one, d1));
}

TEST_CASE("snapshot hooks fire at i=0 and at termination") {
    Dim d(4);
    RunHooks hooks;
    hooks.snapshot_cadence = 1000000; // only the forced anchors
    std::vector<uint64_t> is, os;
    hooks.on_snapshot = [&](const SnapshotContext& ctx) {
        is.push_back(ctx.state.edges_added());
        os.push_back(ctx.state.open_count());
    };
    ProcessResult res = run_uniform(d, Rng(11), &hooks);
    REQUIRE(is.size() == 2);
    CHECK(is.front() == 0);
    CHECK(os.front() == d.edge_count());
    CHECK(is.back() == res.M);
    CHECK(os.back() == 0);
}

TEST_CASE("scan checkpoints observe H(j) at the requested positions") {
    Dim d(4);
    Rng rng(17);
    ClockAssignment clocks = random_clocks(d, rng);
    RunHooks hooks;
    std::vector<uint64_t> seen_j;
    std::vector<uint64_t> h_edge_counts;
    hooks.scan_checkpoints = {0, 5, 16, 32};
    hooks.on_scan_checkpoint = [&](const ScanCheckpointContext& ctx) {
        seen_j.push_back(ctx.scan_position);
        uint64_t sum = 0;
        for (uint16_t deg : ctx.h_degrees) sum += deg;
        h_edge_counts.push_back(sum / 2);
    };
    run_permutation(d, clocks, &hooks);
    CHECK(seen_j == std::vector<uint64_t>{0, 5, 16, 32});
    CHECK(h_edge_counts == std::vector<uint64_t>{0, 5, 16, 32});
}
