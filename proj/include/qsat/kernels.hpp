#ifndef QSAT_KERNELS_HPP
#define QSAT_KERNELS_HPP

#include <cstdint>
#include <span>

#include "qsat/cube.hpp"
#include "qsat/edgeset.hpp"

// Whole-cube scan kernels. Every kernel comes in a serial reference
// implementation and an OpenMP variant; the unsuffixed name dispatches to
// the parallel one when it pays off. Serial and parallel variants are
// bit-identical (all reductions are over integers).

namespace qsat::kernels {

// Some square of Q_d has all four edges present.
bool contains_q2_serial(const EdgeSet& edges, Dim d);
bool contains_q2_parallel(const EdgeSet& edges, Dim d);
bool contains_q2(const EdgeSet& edges, Dim d);

// Q_2-free and edge-maximal: no square fully present, and every absent slot
// has some fully present 3-path between its endpoints.
bool is_saturated_serial(const EdgeSet& edges, Dim d);
bool is_saturated_parallel(const EdgeSet& edges, Dim d);
bool is_saturated(const EdgeSet& edges, Dim d);

// Edges that are not the (T, index)-last edge of any square containing them.
// clocks has one entry per EdgeIndex.
EdgeSet good_edges_serial(std::span<const double> clocks, Dim d);
EdgeSet good_edges_parallel(std::span<const double> clocks, Dim d);
EdgeSet good_edges(std::span<const double> clocks, Dim d);

// Number of adjacent pairs whose endpoints both have degree zero.
// degrees has one entry per vertex of Q_d.
uint64_t isolated_pair_count_serial(std::span<const uint16_t> degrees, Dim d);
uint64_t isolated_pair_count_parallel(std::span<const uint16_t> degrees, Dim d);
uint64_t isolated_pair_count(std::span<const uint16_t> degrees, Dim d);

// Number of axis-aligned Q_k copies with no present edge.
uint64_t empty_subcube_count_serial(const EdgeSet& edges, int k, Dim d);
uint64_t empty_subcube_count_parallel(const EdgeSet& edges, int k, Dim d);
uint64_t empty_subcube_count(const EdgeSet& edges, int k, Dim d);

} // namespace qsat::kernels

#endif
