#ifndef QSAT_ENGINE_HPP
#define QSAT_ENGINE_HPP

#include <cassert>
#include <cstdint>
#include <functional>
#include <vector>

#include "qsat/cube.hpp"
#include "qsat/edgeset.hpp"
#include "qsat/kernels.hpp"
#include "qsat/rng.hpp"

namespace qsat {

enum class PairStatus : uint8_t { Open, Present, Closed };

// Uniform sampling and O(1) deletion over the shrinking set of open slots:
// dense array of open indices plus a reverse position map, swap-with-last
// removal.
class OpenSet {
public:
    void init_full(uint64_t n) {
        items_.resize(n);
        pos_.resize(n);
        for (uint64_t i = 0; i < n; ++i) {
            items_[i] = uint32_t(i);
            pos_[i] = uint32_t(i);
        }
    }

    uint64_t size() const { return items_.size(); }

    bool contains(EdgeIndex idx) const { return pos_[idx] != NPOS; }

    void remove(EdgeIndex idx) {
        uint32_t p = pos_[idx];
        assert(p != NPOS);
        uint32_t last = items_.back();
        items_[p] = last;
        pos_[last] = p;
        items_.pop_back();
        pos_[idx] = NPOS;
    }

    EdgeIndex sample(Rng& rng) const {
        assert(!items_.empty());
        return items_[rng.next_below(items_.size())];
    }

private:
    static constexpr uint32_t NPOS = UINT32_MAX;
    std::vector<uint32_t> items_;
    std::vector<uint32_t> pos_;
};

// Clock labels T_e in [0,1], indexed by EdgeIndex. Sorting by (T, index)
// yields the scan permutation; index breaks ties deterministically.
struct ClockAssignment {
    std::vector<double> values;
};

ClockAssignment random_clocks(Dim d, Rng& rng);

struct StepOutcome {
    EdgeRef edge;
    uint64_t newly_closed;
};

// Evolving status of every edge slot of Q_d, with exact incremental
// open/closed bookkeeping. Single-threaded; copyable for oracle-style tests.
class ProcessState {
public:
    ProcessState(Dim d, Rng rng);

    Dim dim() const { return d_; }
    uint64_t open_count() const { return open_.size(); }
    uint64_t edges_added() const { return added_; }
    PairStatus status(EdgeIndex idx) const { return status_[idx]; }
    const std::vector<uint16_t>& degrees() const { return degree_; }
    Rng& rng() { return rng_; }

    // Marks an Open slot Present and propagates closures. Returns the number
    // of slots newly marked Closed, which equals Y_i(uv) of the added pair
    // on the pre-addition state.
    uint64_t add_edge(EdgeRef e);

    // One step of the uniform-choice process. Requires open_count() > 0.
    StepOutcome step_uniform();

    EdgeSet present_edges() const;

private:
    uint64_t close_after_add(EdgeRef e);

    Dim d_;
    std::vector<PairStatus> status_;
    OpenSet open_;
    std::vector<uint16_t> degree_;
    uint64_t added_ = 0;
    Rng rng_;
};

// Observation context handed to snapshot hooks between steps. scan_position
// is the permutation-mode j (-1 in uniform mode); h_degrees are the vertex
// degrees of H(j), the unconstrained graph of all scanned edges.
struct SnapshotContext {
    const ProcessState& state;
    int64_t scan_position;
    const std::vector<uint16_t>* h_degrees;
};

struct ScanCheckpointContext {
    const ProcessState& state;
    uint64_t scan_position;
    const std::vector<uint16_t>& h_degrees;
};

struct RunHooks {
    // Steps between snapshots; 0 selects ceil(d^(2/3) * 2^d / 200).
    uint64_t snapshot_cadence = 0;
    std::function<void(const SnapshotContext&)> on_snapshot;
    // Permutation mode only: sorted scan positions j at which to observe
    // H(j) exactly.
    std::vector<uint64_t> scan_checkpoints;
    std::function<void(const ScanCheckpointContext&)> on_scan_checkpoint;
    bool keep_step_log = false;
};

struct ProcessResult {
    uint64_t M = 0;
    EdgeSet final_edges;
    std::vector<EdgeRef> step_log;        // iff keep_step_log
    std::vector<uint64_t> scan_positions; // permutation mode: t(i), 1-based
    uint64_t clock_ties = 0;              // duplicate clock values resolved
};

uint64_t default_snapshot_cadence(Dim d);

ProcessResult run_uniform(Dim d, Rng rng, const RunHooks* hooks = nullptr);
ProcessResult run_permutation(Dim d, const ClockAssignment& clocks,
                              const RunHooks* hooks = nullptr);

inline bool contains_q2(const EdgeSet& edges, Dim d) {
    return kernels::contains_q2(edges, d);
}

inline bool is_saturated(const EdgeSet& edges, Dim d) {
    return kernels::is_saturated(edges, d);
}

} // namespace qsat

#endif
