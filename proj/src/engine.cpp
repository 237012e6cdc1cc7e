#include "qsat/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qsat {

ClockAssignment random_clocks(Dim d, Rng& rng) {
    ClockAssignment clocks;
    clocks.values.resize(d.edge_count());
    for (double& t : clocks.values) t = rng.next_double();
    return clocks;
}

ProcessState::ProcessState(Dim d, Rng rng) : d_(d), rng_(rng) {
    uint64_t nedges = d.edge_count();
    if (nedges > UINT32_MAX)
        throw std::invalid_argument("ProcessState: edge set too large");
    status_.assign(nedges, PairStatus::Open);
    open_.init_full(nedges);
    degree_.assign(d.vertex_count(), 0);
}

uint64_t ProcessState::add_edge(EdgeRef e) {
    EdgeIndex idx = edge_index(e, d_);
    assert(status_[idx] == PairStatus::Open);
    status_[idx] = PairStatus::Present;
    open_.remove(idx);
    ++degree_[e.u()];
    ++degree_[e.v()];
    ++added_;
    return close_after_add(e);
}

// For each square through e, adding e completes a 3-path between the
// endpoints of the one remaining non-present slot, provided the other two
// non-e edges are already present. Any new fully present 3-path must use e,
// so this local pass is exact.
uint64_t ProcessState::close_after_add(EdgeRef e) {
    uint64_t closed = 0;
    VertexId u = e.base;
    VertexId bi = VertexId(1) << e.dir;
    for (int j = 0; j < d_.value; ++j) {
        if (j == e.dir) continue;
        VertexId bj = VertexId(1) << j;
        EdgeIndex opposite = edge_slot(u ^ bj, e.dir, d_.value);
        EdgeIndex side_u = edge_slot(u, j, d_.value);
        EdgeIndex side_v = edge_slot(u ^ bi, j, d_.value);
        EdgeIndex slots[3] = {opposite, side_u, side_v};
        int present = 0, open_at = -1;
        for (int s = 0; s < 3; ++s) {
            PairStatus st = status_[slots[s]];
            if (st == PairStatus::Present)
                ++present;
            else if (st == PairStatus::Open)
                open_at = s;
        }
        if (present == 2 && open_at >= 0) {
            EdgeIndex victim = slots[open_at];
            assert(status_[victim] == PairStatus::Open);
            status_[victim] = PairStatus::Closed;
            open_.remove(victim);
            ++closed;
        }
    }
    return closed;
}

StepOutcome ProcessState::step_uniform() {
    assert(open_.size() > 0 && "process already saturated");
    EdgeIndex idx = open_.sample(rng_);
    EdgeRef e = edge_from_index_fast(idx, d_.value);
    uint64_t closed = add_edge(e);
    return StepOutcome{e, closed};
}

EdgeSet ProcessState::present_edges() const {
    EdgeSet out(d_);
    for (EdgeIndex idx = 0; idx < status_.size(); ++idx)
        if (status_[idx] == PairStatus::Present) out.set(idx);
    return out;
}

uint64_t default_snapshot_cadence(Dim d) {
    double scale = std::pow(double(d.value), 2.0 / 3.0) *
                   std::ldexp(1.0, d.value) / 200.0;
    uint64_t c = uint64_t(std::ceil(scale));
    return c > 0 ? c : 1;
}

namespace {

struct HookDriver {
    const RunHooks* hooks;
    uint64_t cadence;
    uint64_t last_snapshot_i = UINT64_MAX;

    HookDriver(Dim d, const RunHooks* h) : hooks(h) {
        cadence = (h && h->snapshot_cadence > 0) ? h->snapshot_cadence
                                                 : default_snapshot_cadence(d);
    }

    bool active() const { return hooks && hooks->on_snapshot; }

    void fire(const ProcessState& state, int64_t j,
              const std::vector<uint16_t>* h_deg) {
        if (!active() || state.edges_added() == last_snapshot_i) return;
        last_snapshot_i = state.edges_added();
        hooks->on_snapshot(SnapshotContext{state, j, h_deg});
    }

    void maybe_fire(const ProcessState& state, int64_t j,
                    const std::vector<uint16_t>* h_deg) {
        if (active() && state.edges_added() % cadence == 0)
            fire(state, j, h_deg);
    }
};

} // namespace

ProcessResult run_uniform(Dim d, Rng rng, const RunHooks* hooks) {
    ProcessState state(d, rng);
    HookDriver driver(d, hooks);
    ProcessResult result;
    bool log_steps = hooks && hooks->keep_step_log;

    driver.fire(state, -1, nullptr);
    while (state.open_count() > 0) {
        StepOutcome out = state.step_uniform();
        if (log_steps) result.step_log.push_back(out.edge);
        driver.maybe_fire(state, -1, nullptr);
    }
    driver.fire(state, -1, nullptr);

    result.M = state.edges_added();
    result.final_edges = state.present_edges();
    return result;
}

ProcessResult run_permutation(Dim d, const ClockAssignment& clocks,
                              const RunHooks* hooks) {
    uint64_t nedges = d.edge_count();
    if (clocks.values.size() != nedges)
        throw std::invalid_argument("run_permutation: clock count mismatch");

    // Scan order: by clock value, ties broken by edge index.
    std::vector<uint32_t> order(nedges);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        double ta = clocks.values[a], tb = clocks.values[b];
        return ta < tb || (ta == tb && a < b);
    });

    ProcessResult result;
    for (uint64_t k = 1; k < nedges; ++k)
        if (clocks.values[order[k]] == clocks.values[order[k - 1]])
            ++result.clock_ties;

    ProcessState state(d, Rng(0));
    HookDriver driver(d, hooks);
    bool log_steps = hooks && hooks->keep_step_log;
    std::vector<uint16_t> h_degrees(d.vertex_count(), 0);
    size_t next_checkpoint = 0;
    auto fire_checkpoints_at = [&](uint64_t j) {
        if (!hooks || !hooks->on_scan_checkpoint) return;
        while (next_checkpoint < hooks->scan_checkpoints.size() &&
               hooks->scan_checkpoints[next_checkpoint] == j) {
            hooks->on_scan_checkpoint(
                ScanCheckpointContext{state, j, h_degrees});
            ++next_checkpoint;
        }
    };

    driver.fire(state, 0, &h_degrees);
    fire_checkpoints_at(0);
    for (uint64_t j = 1; j <= nedges; ++j) {
        EdgeIndex idx = order[j - 1];
        EdgeRef e = edge_from_index_fast(idx, d.value);
        ++h_degrees[e.u()];
        ++h_degrees[e.v()];

        if (state.status(idx) == PairStatus::Open) {
            state.add_edge(e);
            result.scan_positions.push_back(j);
            if (log_steps) result.step_log.push_back(e);
            driver.maybe_fire(state, int64_t(j), &h_degrees);
        }

        fire_checkpoints_at(j);
    }
    driver.fire(state, int64_t(nedges), &h_degrees);

    result.M = state.edges_added();
    result.final_edges = state.present_edges();
    return result;
}

} // namespace qsat
