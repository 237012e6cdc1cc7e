#ifndef QSAT_TRAJECTORY_HPP
#define QSAT_TRAJECTORY_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qsat/engine.hpp"

namespace qsat {

// Classification of the d-1 three-edge paths between one adjacent pair:
// W = all three slots open, X = two open one present, Y = one open two
// present. Paths containing a closed slot (or three present slots) count
// toward none of them.
struct WXYCounts {
    int w = 0, x = 0, y = 0;
};

WXYCounts wxy_counts(const ProcessState& state, VertexId u, VertexId v);

// One observation row. j and isolated_frac are permutation-mode only and
// NaN/-1 otherwise; the wxy fields are NaN once no sampled pair is open.
struct TrajectoryRecord {
    uint64_t i = 0;
    double t = 0.0; // i / (d^(2/3) * 2^d)
    int64_t j = -1;
    uint64_t open_count = 0;
    double w_mean = 0.0, x_mean = 0.0, y_mean = 0.0;
    // 25/50/75th percentiles over the still-open sampled pairs
    std::array<double, 3> w_quartiles{}, x_quartiles{}, y_quartiles{};
    double y_zero_frac = 0.0;  // over the still-open sampled pairs
    double isolated_frac = 0.0;
    uint16_t min_degree = 0, max_degree = 0;
    double mean_degree = 0.0;
    std::vector<uint64_t> degree_histogram;
};

double scaled_time(uint64_t i, Dim d);

// Fixed observation sample: `count` distinct edge slots drawn uniformly.
std::vector<EdgeIndex> sample_adjacent_pairs(Dim d, uint64_t count, Rng& rng);

TrajectoryRecord snapshot(const ProcessState& state,
                          std::span<const EdgeIndex> sample_pairs,
                          int64_t scan_position,
                          const std::vector<uint16_t>* h_degrees);

// Fraction of all adjacent pairs with Y = 0, recomputed over the whole cube.
double y_zero_fraction_exact_serial(const ProcessState& state);
double y_zero_fraction_exact_parallel(const ProcessState& state);
double y_zero_fraction_exact(const ProcessState& state);

// Fraction of adjacent pairs whose endpoints are both isolated in H(j).
double isolated_pair_fraction(std::span<const uint16_t> h_degrees, Dim d);
double isolated_pair_fraction(const EdgeSet& h_edges, Dim d);

struct DegreeSummary {
    std::vector<uint64_t> histogram; // histogram[k] = #vertices of degree k
    uint16_t min_degree = 0, max_degree = 0;
    double mean_degree = 0.0;
    double frac_at_least_threshold = 0.0; // degree >= c * d^(2/3)
    double threshold_c = 0.0;
};

DegreeSummary degree_summary(const EdgeSet& final_edges, Dim d,
                             double threshold_c);

inline uint64_t empty_subcube_count(const EdgeSet& final_edges, int k, Dim d) {
    if (k < 1 || k > d.value)
        throw std::invalid_argument("empty_subcube_count: k out of range");
    return kernels::empty_subcube_count(final_edges, k, d);
}

} // namespace qsat

#endif
