#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "morseid/morse.hpp"
#include "oracles.hpp"

using namespace morseid;

namespace {

// 1-D grid with one cell per vertex turns plain adjacency into a CellMap.
CellMap map_from_adjacency(const std::vector<std::vector<std::int32_t>>& adj) {
    Vector lo(1), hi(1);
    lo << 0;
    hi << static_cast<double>(adj.size());
    CellMap map;
    map.grid = make_grid(make_box(lo, hi), {static_cast<int>(adj.size())});
    map.images = adj;
    for (auto& row : map.images) std::sort(row.begin(), row.end());
    map.escapes.assign(adj.size(), false);
    for (std::size_t v = 0; v < adj.size(); ++v)
        if (adj[v].empty()) map.escapes[v] = true;
    return map;
}

std::vector<std::vector<int>> to_plain(const std::vector<std::vector<std::int32_t>>& adj) {
    std::vector<std::vector<int>> out(adj.size());
    for (std::size_t v = 0; v < adj.size(); ++v) out[v].assign(adj[v].begin(), adj[v].end());
    return out;
}

}  // namespace

TEST_CASE("digraph: identity flow, escaped cells, edge count") {
    CellMap map = map_from_adjacency({{0, 1}, {1}, {}});
    const DiGraph g = to_digraph(map);
    CHECK(g.n == 3);
    CHECK(g.edge_count() == 3);
    CHECK(std::binary_search(g.adj[0].begin(), g.adj[0].end(), 0));  // self-edge kept
    CHECK(g.adj[2].empty());                                         // escaped: out-degree 0
}

TEST_CASE("scc: small hand case") {
    DiGraph g;
    g.n = 3;
    g.adj = {{1}, {0, 2}, {}};
    const SccResult r = scc(g);
    CHECK(r.count == 2);
    CHECK(r.component[0] == r.component[1]);
    CHECK(r.component[2] != r.component[0]);
    CHECK(r.nontrivial[r.component[0]]);
    CHECK_FALSE(r.nontrivial[r.component[2]]);
}

TEST_CASE("scc: empty graph gives trivial singletons") {
    DiGraph g;
    g.n = 5;
    g.adj.assign(5, {});
    const SccResult r = scc(g);
    CHECK(r.count == 5);
    for (int c = 0; c < r.count; ++c) CHECK_FALSE(r.nontrivial[c]);
}

TEST_CASE("scc: 200 random digraphs match mutual-reachability classes") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> nversus(1, 12);
        const int n = nversus(rng);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        DiGraph g;
        g.n = n;
        g.adj.assign(n, {});
        for (int v = 0; v < n; ++v)
            for (int u = 0; u < n; ++u)
                if (unit(rng) < 0.2) g.adj[v].push_back(u);
        const SccResult mine = scc(g);

        const auto classes = oracles::mutual_reachability_classes(to_plain(g.adj));
        CHECK(static_cast<int>(classes.size()) == mine.count);
        for (const auto& cls : classes)
            for (std::size_t i = 1; i < cls.size(); ++i)
                CHECK(mine.component[cls[i]] == mine.component[cls[0]]);
        // Nontriviality: size > 1 or a self-edge.
        for (const auto& cls : classes) {
            bool self = false;
            for (int v : cls)
                for (int u : g.adj[v])
                    if (u == v) self = true;
            CHECK(mine.nontrivial[mine.component[cls[0]]] == (cls.size() > 1 || self));
        }
    }
}

TEST_CASE("morse graph: two disjoint self loops are incomparable minima") {
    const CellMap map = map_from_adjacency({{0}, {2}, {2}});
    const MorseGraph mg = morse_graph(map);
    REQUIRE(mg.size() == 2);
    CHECK(mg.hasse_edges.empty());
    CHECK(mg.minimal[0]);
    CHECK(mg.minimal[1]);
    CHECK_FALSE(mg.reaches[0][1]);
    CHECK_FALSE(mg.reaches[1][0]);
}

TEST_CASE("morse graph: chain fixes the order direction") {
    // a -> b -> c with self loops at a and c; a sits above c.
    const CellMap map = map_from_adjacency({{0, 1}, {2}, {2}});
    const MorseGraph mg = morse_graph(map);
    REQUIRE(mg.size() == 2);
    CHECK(mg.node_cells[0] == std::vector<std::int32_t>{0});
    CHECK(mg.node_cells[1] == std::vector<std::int32_t>{2});
    REQUIRE(mg.hasse_edges.size() == 1);
    CHECK(mg.hasse_edges[0] == std::pair<int, int>{0, 1});  // upper -> lower
    CHECK(mg.reaches[0][1]);
    CHECK_FALSE(mg.reaches[1][0]);
    CHECK_FALSE(mg.minimal[0]);
    CHECK(mg.minimal[1]);  // minimal nodes are attractor-like
}

TEST_CASE("morse graph: hasse is the transitive reduction of the order") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 10;
        std::vector<std::vector<std::int32_t>> adj(n);
        for (int v = 0; v < n; ++v) {
            if (unit(rng) < 0.45) adj[v].push_back(v);
            for (int u = 0; u < n; ++u)
                if (u != v && unit(rng) < 0.15) adj[v].push_back(u);
            std::sort(adj[v].begin(), adj[v].end());
            adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
            if (adj[v].empty()) adj[v].push_back((v + 1) % n);
        }
        const CellMap map = map_from_adjacency(adj);
        const MorseGraph mg = morse_graph(map);
        const int m = mg.size();

        // Order antisymmetry (the condensation is acyclic).
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
                if (p != q) CHECK_FALSE((mg.reaches[p][q] && mg.reaches[q][p]));

        // Transitive closure of the hasse edges equals the strict order.
        std::vector<std::vector<bool>> closure(m, std::vector<bool>(m, false));
        for (const auto& [up, lo] : mg.hasse_edges) closure[up][lo] = true;
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                if (closure[i][k])
                    for (int j = 0; j < m; ++j)
                        if (closure[k][j]) closure[i][j] = true;
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
                if (p != q) CHECK(closure[p][q] == mg.reaches[p][q]);

        // No hasse edge is implied by transitivity through a third node.
        for (const auto& [up, lo] : mg.hasse_edges)
            for (int r = 0; r < m; ++r) {
                if (r == up || r == lo) continue;
                CHECK_FALSE((mg.reaches[up][r] && mg.reaches[r][lo]));
            }

        // Morse sets partition the recurrent cells.
        std::set<std::int32_t> seen;
        for (int p = 0; p < m; ++p)
            for (const std::int32_t c : mg.node_cells[p]) CHECK(seen.insert(c).second);
    }
}

TEST_CASE("reachable closure matches BFS") {
    const CellMap all = map_from_adjacency({{1}, {2}, {0}});
    std::vector<std::int32_t> seeds{0};
    CHECK(reachable_closure(all, seeds).size() == 3);

    const CellMap absorbing = map_from_adjacency({{0}, {0, 2}, {2}});
    CHECK(reachable_closure(absorbing, {0}) == std::vector<std::int32_t>{0});

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 9;
        std::vector<std::vector<std::int32_t>> adj(n);
        for (int v = 0; v < n; ++v)
            for (int u = 0; u < n; ++u)
                if (unit(rng) < 0.2) adj[v].push_back(u);
        const CellMap map = map_from_adjacency(adj);
        const std::vector<std::int32_t> seeds2{static_cast<std::int32_t>(trial % n)};
        const auto mine = reachable_closure(map, seeds2);
        const auto ref = oracles::bfs_closure(to_plain(adj), {trial % n});
        CHECK(std::set<int>(mine.begin(), mine.end()) == ref);
    }
}

TEST_CASE("region of attraction: hand cases") {
    {
        // Identity flow on a morse set: RoA contains the set (k = 0).
        const CellMap map = map_from_adjacency({{0}, {0, 2}, {2}});
        const MorseGraph mg = morse_graph(map);
        REQUIRE(mg.size() == 2);
        const auto roa0 = region_of_attraction(map, mg, 0);
        for (const std::int32_t c : mg.node_cells[0])
            CHECK(std::binary_search(roa0.begin(), roa0.end(), c));
        // Cell 1 maps to both attractors: in neither RoA.
        CHECK_FALSE(std::binary_search(roa0.begin(), roa0.end(), 1));
        const auto roa1 = region_of_attraction(map, mg, 1);
        CHECK_FALSE(std::binary_search(roa1.begin(), roa1.end(), 1));
    }
    {
        // Funnel: everything drains into the self-loop at 2.
        const CellMap map = map_from_adjacency({{1}, {2}, {2}});
        const MorseGraph mg = morse_graph(map);
        REQUIRE(mg.size() == 1);
        const auto roa = region_of_attraction(map, mg, 0);
        CHECK(roa == std::vector<std::int32_t>{0, 1, 2});
    }
    {
        // Escaped cells are excluded even when reachable.
        const CellMap map = map_from_adjacency({{0}, {0}, {}});
        const MorseGraph mg = morse_graph(map);
        const auto roa = region_of_attraction(map, mg, 0);
        CHECK(std::binary_search(roa.begin(), roa.end(), 1));
        CHECK_FALSE(std::binary_search(roa.begin(), roa.end(), 2));
    }
}

TEST_CASE("roa of distinct minimal nodes are disjoint on random total maps") {
    // Totality matters: a cell whose orbit dies in an escaped cell would
    // vacuously satisfy the containment for every node.
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 12;
        std::vector<std::vector<std::int32_t>> adj(n);
        for (int v = 0; v < n; ++v) {
            if (unit(rng) < 0.4) adj[v].push_back(v);
            for (int u = 0; u < n; ++u)
                if (u != v && unit(rng) < 0.12) adj[v].push_back(u);
            if (adj[v].empty()) adj[v].push_back((v + 5) % n);
        }
        const CellMap map = map_from_adjacency(adj);
        const MorseGraph mg = morse_graph(map);
        std::vector<std::vector<std::int32_t>> roas;
        for (int p = 0; p < mg.size(); ++p)
            if (mg.minimal[p]) roas.push_back(region_of_attraction(map, mg, p));
        for (std::size_t a = 0; a < roas.size(); ++a)
            for (std::size_t b = a + 1; b < roas.size(); ++b) {
                std::vector<std::int32_t> inter;
                std::set_intersection(roas[a].begin(), roas[a].end(), roas[b].begin(),
                                      roas[b].end(), std::back_inserter(inter));
                CHECK(inter.empty());
            }
    }
}
