#include "morseid/morse.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace morseid {

std::int64_t DiGraph::edge_count() const {
    std::int64_t e = 0;
    for (const auto& row : adj) e += static_cast<std::int64_t>(row.size());
    return e;
}

DiGraph to_digraph(const CellMap& map) {
    DiGraph g;
    g.n = map.cell_count();
    g.adj = map.images;  // already sorted and deduplicated
    return g;
}

SccResult scc(const DiGraph& g) {
    // Iterative Tarjan; the recursion state lives in an explicit frame stack.
    const std::int64_t n = g.n;
    SccResult out;
    out.component.assign(n, -1);
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::int32_t> stack;
    struct Frame {
        std::int32_t v;
        std::size_t child;
    };
    std::vector<Frame> frames;
    std::int32_t next_index = 0;
    std::vector<std::vector<std::int32_t>> comps;

    for (std::int64_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        frames.push_back({static_cast<std::int32_t>(root), 0});
        while (!frames.empty()) {
            Frame& f = frames.back();
            const std::int32_t v = f.v;
            if (f.child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (f.child < g.adj[v].size()) {
                const std::int32_t u = g.adj[v][f.child++];
                if (index[u] < 0) {
                    frames.push_back({u, 0});
                    descended = true;
                    break;
                }
                if (on_stack[u]) low[v] = std::min(low[v], index[u]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<std::int32_t> comp;
                while (true) {
                    const std::int32_t u = stack.back();
                    stack.pop_back();
                    on_stack[u] = false;
                    out.component[u] = static_cast<std::int32_t>(comps.size());
                    comp.push_back(u);
                    if (u == v) break;
                }
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            frames.pop_back();
            if (!frames.empty()) {
                Frame& parent = frames.back();
                low[parent.v] = std::min(low[parent.v], low[v]);
            }
        }
    }

    out.count = static_cast<int>(comps.size());
    out.nontrivial.assign(out.count, false);
    for (int c = 0; c < out.count; ++c) {
        if (comps[c].size() > 1) {
            out.nontrivial[c] = true;
            continue;
        }
        const std::int32_t v = comps[c][0];
        out.nontrivial[c] =
            std::binary_search(g.adj[v].begin(), g.adj[v].end(), v);  // self-edge
    }
    return out;
}

MorseGraph morse_graph(const CellMap& map) {
    const DiGraph g = to_digraph(map);
    const SccResult comps = scc(g);

    // Condensation adjacency (deduplicated).
    std::vector<std::vector<std::int32_t>> cond(comps.count);
    for (std::int64_t v = 0; v < g.n; ++v)
        for (const std::int32_t u : g.adj[v])
            if (comps.component[v] != comps.component[u])
                cond[comps.component[v]].push_back(comps.component[u]);
    for (auto& row : cond) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }

    // Morse nodes = nontrivial SCCs, numbered by minimal contained cell index.
    std::vector<std::int32_t> morse_comp;
    for (int c = 0; c < comps.count; ++c)
        if (comps.nontrivial[c]) morse_comp.push_back(c);
    std::vector<std::vector<std::int32_t>> cells_of(comps.count);
    for (std::int64_t v = 0; v < g.n; ++v)
        cells_of[comps.component[v]].push_back(static_cast<std::int32_t>(v));
    std::sort(morse_comp.begin(), morse_comp.end(), [&](std::int32_t a, std::int32_t b) {
        return cells_of[a].front() < cells_of[b].front();
    });

    MorseGraph mg;
    const int m = static_cast<int>(morse_comp.size());
    std::vector<int> morse_id(comps.count, -1);
    for (int i = 0; i < m; ++i) {
        morse_id[morse_comp[i]] = i;
        std::vector<std::int32_t> cells = cells_of[morse_comp[i]];
        std::sort(cells.begin(), cells.end());
        mg.node_cells.push_back(std::move(cells));
    }

    // reaches[p][q]: Morse node q is reachable from Morse node p downstream.
    mg.reaches.assign(m, std::vector<bool>(m, false));
    for (int i = 0; i < m; ++i) {
        mg.reaches[i][i] = true;
        std::vector<bool> seen(comps.count, false);
        std::deque<std::int32_t> queue{morse_comp[i]};
        seen[morse_comp[i]] = true;
        while (!queue.empty()) {
            const std::int32_t c = queue.front();
            queue.pop_front();
            if (morse_id[c] >= 0) mg.reaches[i][morse_id[c]] = true;
            for (const std::int32_t u : cond[c])
                if (!seen[u]) {
                    seen[u] = true;
                    queue.push_back(u);
                }
        }
    }

    mg.minimal.assign(m, true);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (j != i && mg.reaches[i][j]) mg.minimal[i] = false;

    // Hasse edges: transitive reduction of the strict reachability order.
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            if (p == q || !mg.reaches[p][q]) continue;
            bool direct = true;
            for (int r = 0; r < m; ++r) {
                if (r == p || r == q) continue;
                if (mg.reaches[p][r] && mg.reaches[r][q]) {
                    direct = false;
                    break;
                }
            }
            if (direct) mg.hasse_edges.push_back({p, q});
        }
    std::sort(mg.hasse_edges.begin(), mg.hasse_edges.end());
    return mg;
}

std::vector<std::int32_t> reachable_closure(const CellMap& map,
                                            const std::vector<std::int32_t>& seeds) {
    std::vector<bool> seen(map.cell_count(), false);
    std::deque<std::int32_t> queue;
    for (const std::int32_t s : seeds)
        if (!seen[s]) {
            seen[s] = true;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        const std::int32_t v = queue.front();
        queue.pop_front();
        for (const std::int32_t u : map.images[v])
            if (!seen[u]) {
                seen[u] = true;
                queue.push_back(u);
            }
    }
    std::vector<std::int32_t> out;
    for (std::int64_t v = 0; v < map.cell_count(); ++v)
        if (seen[v]) out.push_back(static_cast<std::int32_t>(v));
    return out;
}

std::vector<std::int32_t> region_of_attraction_cells(const CellMap& map,
                                                     const std::vector<std::int32_t>& seeds) {
    const std::int64_t n = map.cell_count();
    const std::vector<std::int32_t> closure = reachable_closure(map, seeds);
    std::vector<bool> in_set(n, false);
    for (const std::int32_t v : closure) in_set[v] = true;

    // Greatest growth: add cells whose whole image already landed; counting
    // outstanding image cells per vertex makes each edge work once.
    std::vector<std::vector<std::int32_t>> rev(n);
    for (std::int64_t v = 0; v < n; ++v)
        for (const std::int32_t u : map.images[v]) rev[u].push_back(static_cast<std::int32_t>(v));

    // pending[v] counts image cells still outside the set; it is computed
    // against the closure, so only post-init joiners go through the queue.
    std::vector<std::int32_t> pending(n, 0);
    std::deque<std::int32_t> queue;
    for (std::int64_t v = 0; v < n; ++v) {
        if (map.images[v].empty()) {
            pending[v] = -1;  // fully escaped cells never join
            continue;
        }
        std::int32_t count = 0;
        for (const std::int32_t u : map.images[v])
            if (!in_set[u]) ++count;
        pending[v] = count;
        if (count == 0 && !in_set[v]) {
            in_set[v] = true;
            queue.push_back(static_cast<std::int32_t>(v));
        }
    }
    while (!queue.empty()) {
        const std::int32_t v = queue.front();
        queue.pop_front();
        for (const std::int32_t pred : rev[v]) {
            if (pending[pred] <= 0) continue;
            if (--pending[pred] == 0 && !in_set[pred]) {
                in_set[pred] = true;
                queue.push_back(pred);
            }
        }
    }

    std::vector<std::int32_t> out;
    for (std::int64_t v = 0; v < n; ++v)
        if (in_set[v] && !map.images[v].empty()) out.push_back(static_cast<std::int32_t>(v));
    return out;
}

std::vector<std::int32_t> region_of_attraction(const CellMap& map, const MorseGraph& mg, int p) {
    if (p < 0 || p >= mg.size()) throw ConfigError("region_of_attraction: bad node id");
    return region_of_attraction_cells(map, mg.node_cells[p]);
}

}  // namespace morseid
