#include "qsat/oracle.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace qsat::oracle {

namespace {

// The squares of Q_d as 4-bit edge-index masks. Tiny d only.
std::vector<uint32_t> square_masks(Dim d) {
    std::vector<uint32_t> masks;
    uint64_t nverts = d.vertex_count();
    for (VertexId v = 0; v < nverts; ++v)
        for (int i = 0; i < d.value; ++i) {
            if (v & (VertexId(1) << i)) continue;
            for (int j = i + 1; j < d.value; ++j) {
                if (v & (VertexId(1) << j)) continue;
                Square sq = square_at(v, i, j);
                uint32_t mask = 0;
                for (const EdgeRef& e : sq.edges)
                    mask |= uint32_t(1) << edge_index(e, d);
                masks.push_back(mask);
            }
        }
    return masks;
}

bool square_free(uint32_t edges, const std::vector<uint32_t>& squares) {
    for (uint32_t sq : squares)
        if ((edges & sq) == sq) return false;
    return true;
}

// Open slots of a Q_2-free subset: absent edges whose addition keeps it
// square-free.
uint32_t open_slots(uint32_t edges, int nedges,
                    const std::vector<uint32_t>& squares) {
    uint32_t open = 0;
    for (int f = 0; f < nedges; ++f) {
        uint32_t bit = uint32_t(1) << f;
        if (edges & bit) continue;
        if (square_free(edges | bit, squares)) open |= bit;
    }
    return open;
}

void require_tiny(Dim d, int max_d, const char* what) {
    if (d.value > max_d)
        throw std::invalid_argument(std::string(what) +
                                    ": exhaustive oracle limited to d <= " +
                                    std::to_string(max_d));
}

} // namespace

SaturatedCatalog enumerate_saturated(Dim d) {
    require_tiny(d, 3, "enumerate_saturated");
    int nedges = int(d.edge_count());
    auto squares = square_masks(d);

    SaturatedCatalog catalog;
    catalog.d = d.value;
    uint32_t all = (nedges == 32) ? ~uint32_t(0)
                                  : ((uint32_t(1) << nedges) - 1);
    for (uint32_t edges = 0; edges <= all; ++edges) {
        if (!square_free(edges, squares)) continue;
        if (open_slots(edges, nedges, squares) != 0) continue; // not maximal
        catalog.edge_masks.push_back(edges);
        ++catalog.size_histogram[std::popcount(edges)];
    }
    return catalog;
}

BigRat ExactDistribution::total_mass() const {
    BigRat sum = 0;
    for (const auto& [m, p] : pmf) sum += p;
    return sum;
}

ExactDistribution exact_M_distribution(Dim d) {
    require_tiny(d, 3, "exact_M_distribution");
    int nedges = int(d.edge_count());
    auto squares = square_masks(d);

    // Probability mass flows from each Q_2-free subset uniformly to its
    // open-edge successors; masses settle on saturated subsets. Subsets are
    // processed in increasing popcount so all inflow precedes outflow.
    uint32_t nstates = uint32_t(1) << nedges;
    std::vector<BigRat> mass(nstates, BigRat(0));
    mass[0] = 1;

    std::vector<uint32_t> by_popcount(nstates);
    std::iota(by_popcount.begin(), by_popcount.end(), 0);
    std::stable_sort(by_popcount.begin(), by_popcount.end(),
                     [](uint32_t a, uint32_t b) {
                         return std::popcount(a) < std::popcount(b);
                     });

    ExactDistribution dist;
    dist.d = d.value;
    for (uint32_t edges : by_popcount) {
        if (mass[edges] == 0) continue;
        uint32_t open = open_slots(edges, nedges, squares);
        if (open == 0) {
            dist.pmf[std::popcount(edges)] += mass[edges];
            continue;
        }
        BigRat share = mass[edges] / std::popcount(open);
        for (uint32_t m = open; m; m &= m - 1)
            mass[edges | (m & -m)] += share;
    }
    return dist;
}

ExactDistribution permutation_M_distribution(Dim d) {
    require_tiny(d, 2, "permutation_M_distribution");
    int nedges = int(d.edge_count());
    auto squares = square_masks(d);

    std::vector<int> order(nedges);
    std::iota(order.begin(), order.end(), 0);

    std::map<uint64_t, uint64_t> m_counts;
    uint64_t norders = 0;
    do {
        uint32_t edges = 0;
        for (int f : order) {
            uint32_t bit = uint32_t(1) << f;
            if (square_free(edges | bit, squares)) edges |= bit;
        }
        ++m_counts[std::popcount(edges)];
        ++norders;
    } while (std::next_permutation(order.begin(), order.end()));

    ExactDistribution dist;
    dist.d = d.value;
    for (const auto& [m, c] : m_counts) dist.pmf[m] = BigRat(c, norders);
    return dist;
}

double total_variation(const ExactDistribution& exact,
                       const std::map<uint64_t, uint64_t>& counts) {
    uint64_t total = 0;
    for (const auto& [m, c] : counts) total += c;
    if (total == 0)
        throw std::invalid_argument("total_variation: empty sample");

    double tv = 0.0;
    for (const auto& [m, p] : exact.pmf) {
        auto it = counts.find(m);
        double emp = it == counts.end() ? 0.0 : double(it->second) / double(total);
        tv += std::abs(emp - p.convert_to<double>());
    }
    for (const auto& [m, c] : counts)
        if (!exact.pmf.count(m)) tv += double(c) / double(total);
    return 0.5 * tv;
}

} // namespace qsat::oracle
