#ifndef QSAT_ORACLE_HPP
#define QSAT_ORACLE_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "qsat/analytic.hpp"
#include "qsat/cube.hpp"

namespace qsat::oracle {

// All (Q_d, Q_2)-saturated edge sets, as edge-index bitmasks, from an
// exhaustive scan of every subset. Only feasible for d <= 3 (4096 subsets).
struct SaturatedCatalog {
    int d = 0;
    std::vector<uint32_t> edge_masks;          // ascending
    std::map<int, uint64_t> size_histogram;    // |edges| -> count
};

SaturatedCatalog enumerate_saturated(Dim d);

// Exact probability mass function of the final edge count M.
struct ExactDistribution {
    int d = 0;
    std::map<uint64_t, BigRat> pmf;

    BigRat total_mass() const;
};

// Distribution of M under the uniform-choice process, by dynamic
// programming over all Q_2-free subsets with exact rationals. d <= 3.
ExactDistribution exact_M_distribution(Dim d);

// Distribution of M under the permutation formulation by exhausting all
// orders. Only d <= 2 (4! orders); larger d must be sampled instead.
ExactDistribution permutation_M_distribution(Dim d);

// Total variation distance between an exact pmf and empirical counts.
double total_variation(const ExactDistribution& exact,
                       const std::map<uint64_t, uint64_t>& counts);

} // namespace qsat::oracle

#endif
