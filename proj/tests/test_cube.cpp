#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "qsat/cube.hpp"
#include "support/from_scratch.hpp"

using namespace qsat;

TEST_CASE("dimension bounds and counts") {
    CHECK_THROWS_AS(Dim(0), std::invalid_argument);
    CHECK_THROWS_AS(Dim(31), std::invalid_argument);
    CHECK(Dim(3).edge_count() == 12);
    CHECK(Dim(3).vertex_count() == 8);
    CHECK(Dim(1).edge_count() == 1);
    CHECK(Dim(30).edge_count() == uint64_t(30) << 29);
}

TEST_CASE("edge_index is a bijection for d <= 6") {
    for (int dv = 1; dv <= 6; ++dv) {
        Dim d(dv);
        std::set<EdgeIndex> seen;
        for (VertexId base = 0; base < d.vertex_count(); ++base) {
            for (int dir = 0; dir < dv; ++dir) {
                if (base & (VertexId(1) << dir)) continue;
                EdgeRef e{base, dir};
                EdgeIndex idx = edge_index(e, d);
                CHECK(idx < d.edge_count());
                CHECK(seen.insert(idx).second);
                CHECK(edge_from_index(idx, d) == e);
            }
        }
        CHECK(seen.size() == d.edge_count());
    }
}

TEST_CASE("edge_index rejects malformed refs") {
    Dim d(3);
    CHECK_THROWS_AS(edge_index(EdgeRef{1, 0}, d), std::invalid_argument);
    CHECK_THROWS_AS(edge_index(EdgeRef{0, 3}, d), std::invalid_argument);
    CHECK_THROWS_AS(edge_index(EdgeRef{9, 1}, d), std::invalid_argument);
    CHECK_THROWS_AS(edge_from_index(12, d), std::invalid_argument);
}

TEST_CASE("single edge of Q_1") {
    Dim d(1);
    CHECK(edge_index(EdgeRef{0, 0}, d) == 0);
    CHECK(squares_through(EdgeRef{0, 0}, d).empty());
}

TEST_CASE("squares through an edge") {
    Dim d3(3);
    EdgeRef e{0, 0};
    auto squares = squares_through(e, d3);
    CHECK(squares.size() == 2); // d-1

    for (const Square& sq : squares) {
        // contains e, all edges distinct, exactly two directions
        std::set<std::pair<VertexId, int>> edges;
        std::set<int> dirs;
        bool has_e = false;
        for (const EdgeRef& se : sq.edges) {
            edges.insert({se.base, se.dir});
            dirs.insert(se.dir);
            has_e = has_e || (se == e);
        }
        CHECK(has_e);
        CHECK(edges.size() == 4);
        CHECK(dirs.size() == 2);
    }

    CHECK(squares_through(EdgeRef{0, 1}, Dim(2)).size() == 1);
}

TEST_CASE("non-e edges over all squares through e are pairwise distinct") {
    // d=4: 3 squares, 9 distinct non-e edges.
    Dim d(4);
    EdgeRef e{5, 1}; // base 0101, direction 1
    std::set<std::pair<VertexId, int>> non_e;
    for (const Square& sq : squares_through(e, d))
        for (const EdgeRef& se : sq.edges)
            if (!(se == e)) non_e.insert({se.base, se.dir});
    CHECK(non_e.size() == 9);
}

TEST_CASE("sum of squares_through sizes counts each square four times") {
    for (int dv : {2, 3, 4, 5}) {
        Dim d(dv);
        uint64_t total = 0;
        for (EdgeIndex idx = 0; idx < d.edge_count(); ++idx)
            total += squares_through(edge_from_index(idx, d), d).size();
        uint64_t nsquares =
            binomial(dv, 2) * (dv >= 2 ? uint64_t(1) << (dv - 2) : 0);
        CHECK(total == 4 * nsquares);
    }
}

TEST_CASE("paths3 matches brute-force walk enumeration") {
    Dim d(3);
    for (EdgeIndex idx = 0; idx < d.edge_count(); ++idx) {
        EdgeRef e = edge_from_index(idx, d);
        auto paths = paths3(e.u(), e.v(), d);
        CHECK(paths.size() == 2);

        std::set<std::array<VertexId, 4>> got;
        for (const Path3& p : paths) {
            // reconstruct the vertex sequence
            VertexId a = p.edges[0].u() == e.u() ? p.edges[0].v()
                                                 : p.edges[0].u();
            VertexId b = p.edges[2].u() == e.v() ? p.edges[2].v()
                                                 : p.edges[2].u();
            got.insert({e.u(), a, b, e.v()});
        }
        auto walks = testsupport::simple_3_walks(e.u(), e.v(), d);
        std::set<std::array<VertexId, 4>> expect(walks.begin(), walks.end());
        CHECK(got == expect);
    }
}

TEST_CASE("paths3 known vertex sequences at d=3") {
    // u=000, v=001: paths 000-010-011-001 and 000-100-101-001.
    Dim d(3);
    auto walks = testsupport::simple_3_walks(0, 1, d);
    std::set<std::array<VertexId, 4>> expect = {{0, 2, 3, 1}, {0, 4, 5, 1}};
    CHECK(std::set<std::array<VertexId, 4>>(walks.begin(), walks.end()) ==
          expect);
}

TEST_CASE("paths3 edge sets are pairwise disjoint and form squares") {
    Dim d(5);
    VertexId u = 9, v = 9 ^ 4; // direction 2
    auto paths = paths3(u, v, d);
    CHECK(paths.size() == 4);

    std::set<std::pair<VertexId, int>> all_edges;
    for (const Path3& p : paths)
        for (const EdgeRef& e : p.edges)
            CHECK(all_edges.insert({e.base, e.dir}).second); // disjointness

    // Each path plus uv forms one of squares_through(uv), as an edge set.
    EdgeRef uv = edge_between(u, v);
    std::set<std::set<std::pair<VertexId, int>>> from_paths, from_squares;
    for (const Path3& p : paths) {
        std::set<std::pair<VertexId, int>> sq{{uv.base, uv.dir}};
        for (const EdgeRef& e : p.edges) sq.insert({e.base, e.dir});
        from_paths.insert(sq);
    }
    for (const Square& sq : squares_through(uv, d)) {
        std::set<std::pair<VertexId, int>> s;
        for (const EdgeRef& e : sq.edges) s.insert({e.base, e.dir});
        from_squares.insert(s);
    }
    CHECK(from_paths == from_squares);
}

TEST_CASE("paths3 rejects non-adjacent vertices") {
    CHECK_THROWS_AS(paths3(0, 3, Dim(3)), std::invalid_argument);
    CHECK_THROWS_AS(paths3(2, 2, Dim(3)), std::invalid_argument);
}

TEST_CASE("exactly one 3-path at d=2") {
    CHECK(paths3(0, 1, Dim(2)).size() == 1);
    CHECK(paths3(1, 3, Dim(2)).size() == 1);
}

TEST_CASE("subcube enumeration counts") {
    auto count = [](int k, Dim d) {
        uint64_t n = 0;
        for_each_subcube(k, d, [&](const Subcube&) { ++n; });
        return n;
    };
    CHECK(count(2, Dim(3)) == 6);
    CHECK(count(3, Dim(3)) == 1);
    CHECK(count(2, Dim(4)) == 24);
    CHECK(count(0, Dim(3)) == 8);
    for (int k = 0; k <= 5; ++k) CHECK(count(k, Dim(5)) == subcube_count(k, Dim(5)));
}

TEST_CASE("subcube edges are the k*2^(k-1) edges spanned by its directions") {
    Dim d(4);
    for_each_subcube(2, d, [&](const Subcube& sc) {
        std::set<std::pair<VertexId, int>> edges;
        for_each_subcube_edge(sc, [&](EdgeRef e) {
            CHECK(((sc.dirs_mask >> e.dir) & 1) == 1);
            CHECK((e.base & ~sc.dirs_mask) == sc.base);
            edges.insert({e.base, e.dir});
        });
        CHECK(edges.size() == 4); // k * 2^(k-1) with k=2
    });
}

TEST_CASE("subcube iteration order is reproducible") {
    std::vector<std::pair<uint32_t, VertexId>> first, second;
    for_each_subcube(2, Dim(4), [&](const Subcube& sc) {
        first.push_back({sc.dirs_mask, sc.base});
    });
    for_each_subcube(2, Dim(4), [&](const Subcube& sc) {
        second.push_back({sc.dirs_mask, sc.base});
    });
    CHECK(first == second);
}
