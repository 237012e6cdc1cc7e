#ifndef QSAT_CUBE_HPP
#define QSAT_CUBE_HPP

#include <array>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qsat {

using VertexId = uint32_t;
using EdgeIndex = uint64_t;

// Hypercube dimension. Capped at 30 so vertex masks fit in 32 bits and edge
// indices in 64; full edge-status arrays are only feasible for d <= ~22.
struct Dim {
    int value;

    explicit Dim(int d) : value(d) {
        if (d < 1 || d > 30)
            throw std::invalid_argument("Dim: d must be in [1, 30]");
    }

    uint64_t vertex_count() const { return uint64_t(1) << value; }
    uint64_t edge_count() const { return uint64_t(value) << (value - 1); }
};

// An edge of Q_d in direction `dir`, identified by the endpoint whose bit
// `dir` is clear. Endpoints are (base, base ^ 1<<dir).
struct EdgeRef {
    VertexId base;
    int dir;

    VertexId u() const { return base; }
    VertexId v() const { return base | (VertexId(1) << dir); }

    friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

// The edge joining two adjacent vertices.
inline EdgeRef edge_between(VertexId a, VertexId b) {
    VertexId diff = a ^ b;
    assert(diff != 0 && (diff & (diff - 1)) == 0 && "vertices not adjacent");
    int dir = __builtin_ctz(diff);
    return EdgeRef{a & ~diff, dir};
}

// Dense index: dir * 2^(d-1) + base with bit `dir` squeezed out.
inline EdgeIndex edge_index(EdgeRef e, Dim d) {
    if (e.dir < 0 || e.dir >= d.value)
        throw std::invalid_argument("edge_index: direction out of range");
    if (e.base & (VertexId(1) << e.dir))
        throw std::invalid_argument("edge_index: base has dir bit set");
    if (e.base >> d.value)
        throw std::invalid_argument("edge_index: base outside Q_d");
    VertexId lo = e.base & ((VertexId(1) << e.dir) - 1);
    VertexId hi = e.base >> (e.dir + 1);
    uint64_t offset = lo | (uint64_t(hi) << e.dir);
    return (uint64_t(e.dir) << (d.value - 1)) + offset;
}

// Index of the direction-`dir` edge through vertex w (unchecked hot path;
// w may have the dir bit set or clear).
inline EdgeIndex edge_slot(VertexId w, int dir, int dval) {
    VertexId base = w & ~(VertexId(1) << dir);
    VertexId lo = base & ((VertexId(1) << dir) - 1);
    VertexId hi = base >> (dir + 1);
    return (uint64_t(dir) << (dval - 1)) + (lo | (uint64_t(hi) << dir));
}

inline EdgeRef edge_from_index_fast(EdgeIndex idx, int dval) {
    int dir = int(idx >> (dval - 1));
    uint64_t offset = idx & ((uint64_t(1) << (dval - 1)) - 1);
    VertexId lo = VertexId(offset) & ((VertexId(1) << dir) - 1);
    VertexId hi = VertexId(offset >> dir);
    return EdgeRef{lo | (hi << (dir + 1)), dir};
}

inline EdgeRef edge_from_index(EdgeIndex idx, Dim d) {
    if (idx >= d.edge_count())
        throw std::invalid_argument("edge_from_index: index out of range");
    return edge_from_index_fast(idx, d.value);
}

// A copy of Q_2: the 4-cycle spanned by two directions at a corner vertex.
struct Square {
    std::array<EdgeRef, 4> edges;
};

// The square spanned by directions i and j (i != j) whose corner is `corner`
// (bits i and j clear). Edge order: (corner,i), (corner^2^j,i), (corner,j),
// (corner^2^i,j).
inline Square square_at(VertexId corner, int i, int j) {
    VertexId bi = VertexId(1) << i, bj = VertexId(1) << j;
    return Square{{EdgeRef{corner, i}, EdgeRef{VertexId(corner ^ bj), i},
                   EdgeRef{corner, j}, EdgeRef{VertexId(corner ^ bi), j}}};
}

// All d-1 squares containing e, one per direction j != e.dir. Empty at d=1.
inline std::vector<Square> squares_through(EdgeRef e, Dim d) {
    std::vector<Square> out;
    out.reserve(d.value - 1);
    for (int j = 0; j < d.value; ++j) {
        if (j == e.dir) continue;
        VertexId corner = e.base & ~(VertexId(1) << j);
        out.push_back(square_at(corner, e.dir, j));
    }
    return out;
}

// A path of three edges between adjacent vertices u and v.
struct Path3 {
    std::array<EdgeRef, 3> edges;
};

// The d-1 internally vertex-disjoint 3-paths between adjacent u and v, one
// per direction j != dir(uv): u -> u^2^j -> u^2^j^2^i -> v.
inline std::vector<Path3> paths3(VertexId u, VertexId v, Dim d) {
    VertexId diff = u ^ v;
    if (diff == 0 || (diff & (diff - 1)) != 0)
        throw std::invalid_argument("paths3: vertices not adjacent");
    int i = __builtin_ctz(diff);
    std::vector<Path3> out;
    out.reserve(d.value - 1);
    for (int j = 0; j < d.value; ++j) {
        if (j == i) continue;
        VertexId bj = VertexId(1) << j;
        out.push_back(Path3{{edge_between(u, u ^ bj),
                             edge_between(u ^ bj, u ^ bj ^ diff),
                             edge_between(u ^ bj ^ diff, v)}});
    }
    return out;
}

// Axis-aligned subcube: a set of k free directions plus the fixed bits of
// the remaining d-k coordinates.
struct Subcube {
    uint32_t dirs_mask; // k set bits: the free directions
    VertexId base;      // fixed coordinates; bits in dirs_mask are clear
};

inline uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    uint64_t r = 1;
    for (int i = 0; i < k; ++i) r = r * uint64_t(n - i) / uint64_t(i + 1);
    return r;
}

inline uint64_t subcube_count(int k, Dim d) {
    return binomial(d.value, k) << (d.value - k);
}

// Visits every Q_k copy in Q_d, lexicographically over direction subsets and
// then over base assignments, so iteration order is reproducible.
template <class F>
void for_each_subcube(int k, Dim d, F&& fn) {
    if (k < 0 || k > d.value)
        throw std::invalid_argument("for_each_subcube: k out of range");
    // Direction subsets in lexicographic order of their sorted element
    // lists, via the standard combination-increment walk.
    std::vector<int> dirs(k);
    for (int i = 0; i < k; ++i) dirs[i] = i;
    for (;;) {
        uint32_t mask = 0;
        for (int dd : dirs) mask |= uint32_t(1) << dd;
        // Enumerate fixed assignments of the other d-k bits in increasing
        // order of the packed value.
        uint64_t nfree = uint64_t(1) << (d.value - k);
        for (uint64_t packed = 0; packed < nfree; ++packed) {
            VertexId base = 0;
            uint64_t rest = packed;
            for (int b = 0; b < d.value; ++b) {
                if (mask & (uint32_t(1) << b)) continue;
                base |= VertexId(rest & 1) << b;
                rest >>= 1;
            }
            fn(Subcube{mask, base});
        }
        // next combination
        int i = k - 1;
        while (i >= 0 && dirs[i] == d.value - k + i) --i;
        if (i < 0) break;
        ++dirs[i];
        for (int j = i + 1; j < k; ++j) dirs[j] = dirs[j - 1] + 1;
    }
}

// Visits the k*2^(k-1) edges of a subcube.
template <class F>
void for_each_subcube_edge(const Subcube& sc, F&& fn) {
    uint32_t mask = sc.dirs_mask;
    for (uint32_t m = mask; m; m &= m - 1) {
        int dir = __builtin_ctz(m);
        uint32_t others = mask & ~(uint32_t(1) << dir);
        // All assignments of the other free bits, dir bit stays clear.
        uint32_t sub = 0;
        do {
            fn(EdgeRef{VertexId(sc.base | sub), dir});
            sub = (sub - others) & others; // enumerate submasks of `others`
        } while (sub != 0);
    }
}

} // namespace qsat

#endif
