#include "qsat/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsat::kernels {

namespace {

// Parallel scans only pay off once the slot array is reasonably large.
constexpr uint64_t kParallelThreshold = 1u << 16;

// Statuses of the three non-e slots of the square through e spanned by
// e.dir and j: the opposite edge and the two side edges.
struct SquareSlots {
    EdgeIndex opposite, side_u, side_v;
};

inline SquareSlots square_slots(VertexId u, int i, int j, int dval) {
    VertexId bj = VertexId(1) << j;
    VertexId bi = VertexId(1) << i;
    return SquareSlots{
        edge_slot(u ^ bj, i, dval),        // (u^2^j, u^2^j^2^i)
        edge_slot(u, j, dval),             // (u, u^2^j)
        edge_slot(u ^ bi, j, dval),        // (v, v^2^j)
    };
}

inline bool slot_fully_squared(const EdgeSet& edges, EdgeIndex idx, int dval) {
    EdgeRef e = edge_from_index_fast(idx, dval);
    for (int j = 0; j < dval; ++j) {
        if (j == e.dir) continue;
        SquareSlots s = square_slots(e.base, e.dir, j, dval);
        if (edges.test(s.opposite) && edges.test(s.side_u) &&
            edges.test(s.side_v))
            return true;
    }
    return false;
}

// One saturation condition for one slot: a present slot must not complete a
// square, an absent slot must be blocked by a fully present 3-path.
inline bool slot_saturated(const EdgeSet& edges, EdgeIndex idx, int dval) {
    bool blocked = slot_fully_squared(edges, idx, dval);
    return edges.test(idx) ? !blocked : blocked;
}

inline bool slot_good(std::span<const double> clocks, EdgeIndex idx,
                      int dval) {
    EdgeRef e = edge_from_index_fast(idx, dval);
    double te = clocks[idx];
    for (int j = 0; j < dval; ++j) {
        if (j == e.dir) continue;
        SquareSlots s = square_slots(e.base, e.dir, j, dval);
        // e is last in this square iff every other edge precedes it under
        // the (T, index) order.
        auto precedes_e = [&](EdgeIndex f) {
            return clocks[f] < te || (clocks[f] == te && f < idx);
        };
        if (precedes_e(s.opposite) && precedes_e(s.side_u) &&
            precedes_e(s.side_v))
            return false;
    }
    return true;
}

inline bool slot_isolated(std::span<const uint16_t> degrees, EdgeIndex idx,
                          int dval) {
    EdgeRef e = edge_from_index_fast(idx, dval);
    return degrees[e.u()] == 0 && degrees[e.v()] == 0;
}

} // namespace

bool contains_q2_serial(const EdgeSet& edges, Dim d) {
    if (d.value < 2) return false;
    // Scan squares by corner and direction pair; each square once.
    uint64_t nverts = d.vertex_count();
    for (VertexId v = 0; v < nverts; ++v) {
        for (int i = 0; i < d.value; ++i) {
            if (v & (VertexId(1) << i)) continue;
            for (int j = i + 1; j < d.value; ++j) {
                if (v & (VertexId(1) << j)) continue;
                if (!edges.test(edge_slot(v, i, d.value))) continue;
                SquareSlots s = square_slots(v, i, j, d.value);
                if (edges.test(s.opposite) && edges.test(s.side_u) &&
                    edges.test(s.side_v))
                    return true;
            }
        }
    }
    return false;
}

bool contains_q2_parallel(const EdgeSet& edges, Dim d) {
    if (d.value < 2) return false;
    int64_t nverts = int64_t(d.vertex_count());
    bool found = false;
#pragma omp parallel for schedule(static) reduction(|| : found)
    for (int64_t v = 0; v < nverts; ++v) {
        if (found) continue;
        for (int i = 0; i < d.value && !found; ++i) {
            if (v & (int64_t(1) << i)) continue;
            for (int j = i + 1; j < d.value; ++j) {
                if (v & (int64_t(1) << j)) continue;
                if (!edges.test(edge_slot(VertexId(v), i, d.value))) continue;
                SquareSlots s = square_slots(VertexId(v), i, j, d.value);
                if (edges.test(s.opposite) && edges.test(s.side_u) &&
                    edges.test(s.side_v)) {
                    found = true;
                    break;
                }
            }
        }
    }
    return found;
}

bool contains_q2(const EdgeSet& edges, Dim d) {
#ifdef _OPENMP
    if (d.vertex_count() >= kParallelThreshold)
        return contains_q2_parallel(edges, d);
#endif
    return contains_q2_serial(edges, d);
}

bool is_saturated_serial(const EdgeSet& edges, Dim d) {
    uint64_t nedges = d.edge_count();
    for (EdgeIndex idx = 0; idx < nedges; ++idx)
        if (!slot_saturated(edges, idx, d.value)) return false;
    return true;
}

bool is_saturated_parallel(const EdgeSet& edges, Dim d) {
    int64_t nedges = int64_t(d.edge_count());
    bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
    for (int64_t idx = 0; idx < nedges; ++idx) {
        if (!ok) continue;
        if (!slot_saturated(edges, EdgeIndex(idx), d.value)) ok = false;
    }
    return ok;
}

bool is_saturated(const EdgeSet& edges, Dim d) {
#ifdef _OPENMP
    if (d.edge_count() >= kParallelThreshold)
        return is_saturated_parallel(edges, d);
#endif
    return is_saturated_serial(edges, d);
}

EdgeSet good_edges_serial(std::span<const double> clocks, Dim d) {
    uint64_t nedges = d.edge_count();
    EdgeSet good(nedges);
    for (EdgeIndex idx = 0; idx < nedges; ++idx)
        if (slot_good(clocks, idx, d.value)) good.set(idx);
    return good;
}

EdgeSet good_edges_parallel(std::span<const double> clocks, Dim d) {
    int64_t nedges = int64_t(d.edge_count());
    std::vector<uint8_t> flag(size_t(nedges), 0);
#pragma omp parallel for schedule(static)
    for (int64_t idx = 0; idx < nedges; ++idx)
        flag[size_t(idx)] = slot_good(clocks, EdgeIndex(idx), d.value);
    EdgeSet good{uint64_t(nedges)};
    for (int64_t idx = 0; idx < nedges; ++idx)
        if (flag[size_t(idx)]) good.set(EdgeIndex(idx));
    return good;
}

EdgeSet good_edges(std::span<const double> clocks, Dim d) {
#ifdef _OPENMP
    if (d.edge_count() >= kParallelThreshold)
        return good_edges_parallel(clocks, d);
#endif
    return good_edges_serial(clocks, d);
}

uint64_t isolated_pair_count_serial(std::span<const uint16_t> degrees, Dim d) {
    uint64_t nedges = d.edge_count();
    uint64_t count = 0;
    for (EdgeIndex idx = 0; idx < nedges; ++idx)
        count += slot_isolated(degrees, idx, d.value);
    return count;
}

uint64_t isolated_pair_count_parallel(std::span<const uint16_t> degrees,
                                      Dim d) {
    int64_t nedges = int64_t(d.edge_count());
    uint64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (int64_t idx = 0; idx < nedges; ++idx)
        count += slot_isolated(degrees, EdgeIndex(idx), d.value);
    return count;
}

uint64_t isolated_pair_count(std::span<const uint16_t> degrees, Dim d) {
#ifdef _OPENMP
    if (d.edge_count() >= kParallelThreshold)
        return isolated_pair_count_parallel(degrees, d);
#endif
    return isolated_pair_count_serial(degrees, d);
}

namespace {

inline bool subcube_empty(const EdgeSet& edges, const Subcube& sc, int dval) {
    bool empty = true;
    for_each_subcube_edge(sc, [&](EdgeRef e) {
        if (empty && edges.test(edge_slot(e.base, e.dir, dval))) empty = false;
    });
    return empty;
}

} // namespace

uint64_t empty_subcube_count_serial(const EdgeSet& edges, int k, Dim d) {
    uint64_t count = 0;
    for_each_subcube(k, d, [&](const Subcube& sc) {
        count += subcube_empty(edges, sc, d.value);
    });
    return count;
}

uint64_t empty_subcube_count_parallel(const EdgeSet& edges, int k, Dim d) {
    if (k < 0 || k > d.value)
        throw std::invalid_argument("empty_subcube_count: k out of range");
    uint64_t count = 0;
    // Direction subsets stay serial (there are few); base assignments are
    // the wide loop.
    std::vector<int> dirs(k);
    for (int i = 0; i < k; ++i) dirs[i] = i;
    for (;;) {
        uint32_t mask = 0;
        for (int dd : dirs) mask |= uint32_t(1) << dd;
        int64_t nfree = int64_t(1) << (d.value - k);
        uint64_t sub_count = 0;
#pragma omp parallel for schedule(static) reduction(+ : sub_count)
        for (int64_t packed = 0; packed < nfree; ++packed) {
            VertexId base = 0;
            uint64_t rest = uint64_t(packed);
            for (int b = 0; b < d.value; ++b) {
                if (mask & (uint32_t(1) << b)) continue;
                base |= VertexId(rest & 1) << b;
                rest >>= 1;
            }
            sub_count += subcube_empty(edges, Subcube{mask, base}, d.value);
        }
        count += sub_count;
        int i = k - 1;
        while (i >= 0 && dirs[i] == d.value - k + i) --i;
        if (i < 0) break;
        ++dirs[i];
        for (int j = i + 1; j < k; ++j) dirs[j] = dirs[j - 1] + 1;
    }
    return count;
}

uint64_t empty_subcube_count(const EdgeSet& edges, int k, Dim d) {
#ifdef _OPENMP
    if (k >= 1 && (uint64_t(1) << (d.value - k)) >= kParallelThreshold)
        return empty_subcube_count_parallel(edges, k, d);
#endif
    return empty_subcube_count_serial(edges, k, d);
}

} // namespace qsat::kernels
