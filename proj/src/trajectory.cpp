#include "qsat/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace qsat {

namespace {

// Path classification shared by the per-pair and whole-cube passes.
inline void classify_pair(const ProcessState& state, VertexId u, int dir,
                          int dval, WXYCounts& out) {
    VertexId bi = VertexId(1) << dir;
    for (int j = 0; j < dval; ++j) {
        if (j == dir) continue;
        VertexId bj = VertexId(1) << j;
        PairStatus s1 = state.status(edge_slot(u, j, dval));
        PairStatus s2 = state.status(edge_slot(u ^ bj, dir, dval));
        PairStatus s3 = state.status(edge_slot(u ^ bi, j, dval));
        int open = (s1 == PairStatus::Open) + (s2 == PairStatus::Open) +
                   (s3 == PairStatus::Open);
        int present = (s1 == PairStatus::Present) +
                      (s2 == PairStatus::Present) +
                      (s3 == PairStatus::Present);
        if (open == 3)
            ++out.w;
        else if (open == 2 && present == 1)
            ++out.x;
        else if (open == 1 && present == 2)
            ++out.y;
    }
}

inline int pair_y_count(const ProcessState& state, EdgeIndex idx, int dval) {
    EdgeRef e = edge_from_index_fast(idx, dval);
    WXYCounts c;
    classify_pair(state, e.base, e.dir, dval, c);
    return c.y;
}

} // namespace

WXYCounts wxy_counts(const ProcessState& state, VertexId u, VertexId v) {
    VertexId diff = u ^ v;
    if (diff == 0 || (diff & (diff - 1)) != 0)
        throw std::invalid_argument("wxy_counts: vertices not adjacent");
    int dir = __builtin_ctz(diff);
    WXYCounts out;
    classify_pair(state, u & ~diff, dir, state.dim().value, out);
    return out;
}

double scaled_time(uint64_t i, Dim d) {
    return double(i) /
           (std::pow(double(d.value), 2.0 / 3.0) * std::ldexp(1.0, d.value));
}

std::vector<EdgeIndex> sample_adjacent_pairs(Dim d, uint64_t count, Rng& rng) {
    uint64_t nedges = d.edge_count();
    if (count >= nedges) {
        std::vector<EdgeIndex> all(nedges);
        for (uint64_t i = 0; i < nedges; ++i) all[i] = i;
        return all;
    }
    // Floyd's sampling: count distinct values without replacement.
    std::unordered_set<uint64_t> chosen;
    std::vector<EdgeIndex> out;
    out.reserve(count);
    for (uint64_t top = nedges - count; top < nedges; ++top) {
        uint64_t v = rng.next_below(top + 1);
        if (!chosen.insert(v).second) {
            chosen.insert(top);
            out.push_back(top);
        } else {
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

TrajectoryRecord snapshot(const ProcessState& state,
                          std::span<const EdgeIndex> sample_pairs,
                          int64_t scan_position,
                          const std::vector<uint16_t>* h_degrees) {
    const Dim d = state.dim();
    TrajectoryRecord rec;
    rec.i = state.edges_added();
    rec.t = scaled_time(rec.i, d);
    rec.j = scan_position;
    rec.open_count = state.open_count();

    uint64_t w_sum = 0, x_sum = 0, y_sum = 0, y_zero = 0;
    std::vector<int> ws, xs, ys;
    for (EdgeIndex idx : sample_pairs) {
        if (state.status(idx) != PairStatus::Open) continue;
        EdgeRef e = edge_from_index_fast(idx, d.value);
        WXYCounts c;
        classify_pair(state, e.base, e.dir, d.value, c);
        ws.push_back(c.w);
        xs.push_back(c.x);
        ys.push_back(c.y);
        w_sum += uint64_t(c.w);
        x_sum += uint64_t(c.x);
        y_sum += uint64_t(c.y);
        y_zero += (c.y == 0);
    }
    auto quartiles = [](std::vector<int>& v) {
        std::array<double, 3> q;
        if (v.empty()) {
            q.fill(std::numeric_limits<double>::quiet_NaN());
            return q;
        }
        std::sort(v.begin(), v.end());
        for (int k = 0; k < 3; ++k)
            q[k] = double(v[(v.size() - 1) * size_t(k + 1) / 4]);
        return q;
    };
    uint64_t open_pairs = ws.size();
    rec.w_quartiles = quartiles(ws);
    rec.x_quartiles = quartiles(xs);
    rec.y_quartiles = quartiles(ys);
    if (open_pairs > 0) {
        rec.w_mean = double(w_sum) / double(open_pairs);
        rec.x_mean = double(x_sum) / double(open_pairs);
        rec.y_mean = double(y_sum) / double(open_pairs);
        rec.y_zero_frac = double(y_zero) / double(open_pairs);
    } else {
        rec.w_mean = rec.x_mean = rec.y_mean = rec.y_zero_frac =
            std::numeric_limits<double>::quiet_NaN();
    }

    rec.isolated_frac = h_degrees
                            ? isolated_pair_fraction(
                                  std::span<const uint16_t>(*h_degrees), d)
                            : std::numeric_limits<double>::quiet_NaN();

    const auto& deg = state.degrees();
    rec.degree_histogram.assign(size_t(d.value) + 1, 0);
    uint16_t mind = deg[0], maxd = deg[0];
    uint64_t total = 0;
    for (uint16_t dv : deg) {
        mind = std::min(mind, dv);
        maxd = std::max(maxd, dv);
        total += dv;
        ++rec.degree_histogram[dv];
    }
    rec.min_degree = mind;
    rec.max_degree = maxd;
    rec.mean_degree = double(total) / double(deg.size());
    return rec;
}

double y_zero_fraction_exact_serial(const ProcessState& state) {
    const int dval = state.dim().value;
    uint64_t nedges = state.dim().edge_count();
    uint64_t zero = 0;
    for (EdgeIndex idx = 0; idx < nedges; ++idx)
        zero += (pair_y_count(state, idx, dval) == 0);
    return double(zero) / double(nedges);
}

double y_zero_fraction_exact_parallel(const ProcessState& state) {
    const int dval = state.dim().value;
    int64_t nedges = int64_t(state.dim().edge_count());
    uint64_t zero = 0;
#pragma omp parallel for schedule(static) reduction(+ : zero)
    for (int64_t idx = 0; idx < nedges; ++idx)
        zero += (pair_y_count(state, EdgeIndex(idx), dval) == 0);
    return double(zero) / double(nedges);
}

double y_zero_fraction_exact(const ProcessState& state) {
#ifdef _OPENMP
    if (state.dim().edge_count() >= (1u << 16))
        return y_zero_fraction_exact_parallel(state);
#endif
    return y_zero_fraction_exact_serial(state);
}

double isolated_pair_fraction(std::span<const uint16_t> h_degrees, Dim d) {
    return double(kernels::isolated_pair_count(h_degrees, d)) /
           double(d.edge_count());
}

double isolated_pair_fraction(const EdgeSet& h_edges, Dim d) {
    std::vector<uint16_t> degrees(d.vertex_count(), 0);
    h_edges.for_each([&](EdgeIndex idx) {
        EdgeRef e = edge_from_index_fast(idx, d.value);
        ++degrees[e.u()];
        ++degrees[e.v()];
    });
    return isolated_pair_fraction(std::span<const uint16_t>(degrees), d);
}

DegreeSummary degree_summary(const EdgeSet& final_edges, Dim d,
                             double threshold_c) {
    std::vector<uint16_t> degrees(d.vertex_count(), 0);
    final_edges.for_each([&](EdgeIndex idx) {
        EdgeRef e = edge_from_index_fast(idx, d.value);
        ++degrees[e.u()];
        ++degrees[e.v()];
    });

    DegreeSummary out;
    out.threshold_c = threshold_c;
    out.histogram.assign(size_t(d.value) + 1, 0);
    double threshold = threshold_c * std::pow(double(d.value), 2.0 / 3.0);
    uint16_t mind = degrees[0], maxd = degrees[0];
    uint64_t total = 0, at_least = 0;
    for (uint16_t dv : degrees) {
        ++out.histogram[dv];
        mind = std::min(mind, dv);
        maxd = std::max(maxd, dv);
        total += dv;
        at_least += (double(dv) >= threshold);
    }
    out.min_degree = mind;
    out.max_degree = maxd;
    out.mean_degree = double(total) / double(degrees.size());
    out.frac_at_least_threshold = double(at_least) / double(degrees.size());
    return out;
}

} // namespace qsat
