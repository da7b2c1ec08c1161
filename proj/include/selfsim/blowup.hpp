#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "selfsim/cellgraph.hpp"

namespace selfsim {

/// Finite level-n approximation of the self-similar graph built from a cell
/// graph. Vertex ids are assigned in construction order, so the ids of Y_k
/// are a stable prefix of Y_{k+1} (the level-1 cell occupies 0..|C|-1).
struct BlowupGraph {
    int levels = 0;
    int n_vertices = 0;
    int cell_size = 0;   // vertices per cell copy
    int theta = 0;

    // flat cell table: cells.size() = n_cells * cell_size; entry (c, local)
    // is the global id of the cell copy c at the cell-graph vertex `local`
    std::vector<int32_t> cells;
    // flat clique table: theta ids per clique, each sorted ascending
    std::vector<int32_t> cliques;

    std::vector<int> vy_sizes;       // |VY_1| .. |VY_n|
    std::vector<int32_t> base_cell_vertices; // VY_0: ids of the chosen base clique
    std::vector<int32_t> psi;        // psi[v] for v in VY_{n-1}; -1 otherwise
    std::vector<int16_t> f_entry;    // k >= 1 if v joined F at level k, 0 if v not in F_n
    std::vector<int32_t> outer_boundary;      // boundary of Y_n, position-ordered
    std::vector<int32_t> prev_outer_boundary; // boundary of Y_{n-1}
    int origin = -1;
    int base_clique_index = 0; // 0-based into the cell's clique list

    size_t n_cells() const { return cells.size() / static_cast<size_t>(cell_size); }
    size_t n_cliques() const { return cliques.size() / static_cast<size_t>(theta); }

    std::vector<int> level_set(int k) const {
        std::vector<int> out;
        for (int v = 0; v < n_vertices; ++v)
            if (f_entry[v] >= 1 && f_entry[v] <= k) out.push_back(v);
        return out;
    }

    /// every edge of the blow-up lies in exactly one cell copy
    std::vector<std::pair<int32_t, int32_t>> edge_list(const CellGraph& cell) const {
        std::vector<std::pair<int32_t, int32_t>> es;
        es.reserve(n_cells() * cell.edges.size());
        for (size_t c = 0; c < n_cells(); ++c) {
            const int32_t* map = &cells[c * cell_size];
            for (auto [a, b] : cell.edges) {
                int32_t x = map[a], y = map[b];
                es.emplace_back(std::min(x, y), std::max(x, y));
            }
        }
        std::sort(es.begin(), es.end());
        if (std::adjacent_find(es.begin(), es.end()) != es.end())
            throw InternalError("blow-up edge covered by two cells");
        return es;
    }

    std::vector<std::vector<int32_t>> adjacency(const CellGraph& cell) const {
        std::vector<std::vector<int32_t>> adj(n_vertices);
        for (auto [a, b] : edge_list(cell)) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        for (auto& row : adj) std::sort(row.begin(), row.end());
        return adj;
    }
};

namespace detail {

inline std::vector<int> bfs_distances(const std::vector<std::vector<int32_t>>& adj, int src) {
    std::vector<int> dist(adj.size(), -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v])
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
    }
    return dist;
}

} // namespace detail

/// Inductive blow-up construction. `base_clique` is the 0-based index of the
/// clique K^i the expansion starts from; when that clique meets the boundary
/// in exactly one vertex, that vertex is the origin (the fixed point of psi).
inline BlowupGraph blow_up(const CellGraph& cell, int base_clique, int levels) {
    if (base_clique < 0 || base_clique >= cell.mu())
        throw StructureError("base clique index out of range");
    if (levels < 1) throw StructureError("levels must be >= 1");
    {
        double cells_estimate = 1.0;
        for (int i = 1; i < levels; ++i) cells_estimate *= cell.mu();
        if (cells_estimate * cell.n > 2e8)
            throw StructureError("blow-up would exceed the size cap (~2e8 vertex slots)");
    }
    const int theta = cell.theta();

    BlowupGraph b;
    b.levels = levels;
    b.cell_size = cell.n;
    b.theta = theta;
    b.base_clique_index = base_clique;
    b.n_vertices = cell.n;
    b.vy_sizes = {cell.n};
    b.psi.assign(cell.n, -1);
    b.f_entry.assign(cell.n, 0);
    for (int v : cell.boundary) b.f_entry[v] = 1;
    b.cells.resize(cell.n);
    for (int v = 0; v < cell.n; ++v) b.cells[v] = v;
    for (const auto& q : cell.cliques)
        for (int v : q) b.cliques.push_back(v);
    b.outer_boundary.assign(cell.boundary.begin(), cell.boundary.end());

    // psi on VY_0 = base clique: pin the boundary vertex to itself when the
    // intersection with B is a singleton, remaining vertices by sorted order
    const std::vector<int>& k0 = cell.cliques[base_clique];
    b.base_cell_vertices.assign(k0.begin(), k0.end());
    {
        std::vector<int> in_b;
        for (int v : k0)
            if (cell.is_boundary(v)) in_b.push_back(v);
        std::vector<int> positions(theta, -1); // label p -> VY_0 vertex
        std::vector<char> pos_used(theta, 0), vtx_used(cell.n, 0);
        if (in_b.size() == 1) {
            int o = in_b[0];
            int p = static_cast<int>(std::find(cell.boundary.begin(), cell.boundary.end(), o) -
                                     cell.boundary.begin());
            positions[p] = o;
            pos_used[p] = 1;
            vtx_used[o] = 1;
        }
        int next_pos = 0;
        for (int v : k0) {
            if (vtx_used[v]) continue;
            while (pos_used[next_pos]) ++next_pos;
            positions[next_pos] = v;
            pos_used[next_pos] = 1;
        }
        b.prev_outer_boundary.assign(theta, -1);
        for (int p = 0; p < theta; ++p) {
            b.prev_outer_boundary[p] = positions[p];
            b.psi[positions[p]] = cell.boundary[p];
        }
    }

    for (int step = 1; step < levels; ++step) {
        const int cur_size = b.n_vertices;
        const int prev_size = (step == 1) ? -1 : b.vy_sizes[step - 2];
        auto in_prev = [&](int v) {
            if (step == 1)
                return std::find(b.base_cell_vertices.begin(), b.base_cell_vertices.end(), v) !=
                       b.base_cell_vertices.end();
            return v < prev_size;
        };

        // fresh copies of the outer ring, in id order
        std::vector<int32_t> alpha(cur_size, -1);
        int next_id = cur_size;
        for (int v = 0; v < cur_size; ++v)
            if (!in_prev(v)) alpha[v] = next_id++;

        std::vector<int32_t> anchor(cur_size, -1);
        for (int p = 0; p < theta; ++p) {
            int src = b.prev_outer_boundary[p];
            anchor[src] = b.outer_boundary[p];
        }
        auto copy_img = [&](int v) -> int32_t {
            if (!in_prev(v)) return alpha[v];
            if (anchor[v] < 0)
                throw InternalError("copy touches an interface vertex outside the boundary");
            return anchor[v];
        };

        b.psi.resize(next_id, -1);
        b.f_entry.resize(next_id, 0);
        for (int v = 0; v < cur_size; ++v)
            if (!in_prev(v)) {
                b.psi[v] = alpha[v];
                b.f_entry[alpha[v]] = static_cast<int16_t>(step + 1);
            }
        b.n_vertices = next_id;

        // substitute a fresh cell copy for every clique of Y_step that is not
        // completely contained in Y_{step-1}
        const size_t clique_count = b.n_cliques();
        std::vector<int32_t> sorted_b(theta);
        for (size_t qi = 0; qi < clique_count; ++qi) {
            const int32_t* q = &b.cliques[qi * theta];
            bool inside = true;
            for (int t = 0; t < theta; ++t)
                if (!in_prev(q[t])) {
                    inside = false;
                    break;
                }
            if (inside) continue;
            for (int t = 0; t < theta; ++t) sorted_b[t] = copy_img(q[t]);
            std::sort(sorted_b.begin(), sorted_b.end());
            // amalgamate: boundary position p onto the p-th smallest clique id,
            // interior vertices get fresh ids in local order
            std::vector<int32_t> vmap(cell.n, -1);
            for (int p = 0; p < theta; ++p) vmap[cell.boundary[p]] = sorted_b[p];
            for (int v = 0; v < cell.n; ++v)
                if (vmap[v] < 0) vmap[v] = b.n_vertices++;
            for (int v = 0; v < cell.n; ++v) b.cells.push_back(vmap[v]);
            for (const auto& cq : cell.cliques) {
                size_t at = b.cliques.size();
                for (int v : cq) b.cliques.push_back(vmap[v]);
                std::sort(b.cliques.begin() + at, b.cliques.end());
            }
        }
        b.psi.resize(b.n_vertices, -1);
        b.f_entry.resize(b.n_vertices, 0);

        std::vector<int32_t> nb(theta);
        for (int p = 0; p < theta; ++p) nb[p] = copy_img(b.outer_boundary[p]);
        b.prev_outer_boundary = b.outer_boundary;
        b.outer_boundary = nb;
        b.vy_sizes.push_back(b.n_vertices);
    }

    // origin: the unique fixed point of psi, when one exists
    for (int v = 0; v < std::min<int>(b.n_vertices, static_cast<int>(b.psi.size())); ++v)
        if (b.psi[v] == v) {
            if (b.origin >= 0) throw InternalError("psi has two fixed points");
            b.origin = v;
        }
    return b;
}

/// Radius r such that every walk of length <= r from the origin has the same
/// law in Y_n as in the infinite graph: one less than the distance from the
/// origin to the nearest vertex whose degree still grows when the construction
/// is extended one more level.
inline int safe_ball_radius(const BlowupGraph& b, const CellGraph& cell) {
    if (b.origin < 0) throw StructureError("blow-up has no origin vertex");
    const int theta = b.theta;
    auto in_prev = [&](int v) {
        if (b.levels == 1)
            return std::find(b.base_cell_vertices.begin(), b.base_cell_vertices.end(), v) !=
                   b.base_cell_vertices.end();
        return v < b.vy_sizes[b.levels - 2];
    };
    std::vector<int32_t> anchor_next(b.n_vertices, -1);
    for (int p = 0; p < theta; ++p) anchor_next[b.prev_outer_boundary[p]] = b.outer_boundary[p];

    std::vector<char> grows(b.n_vertices, 0);
    const size_t clique_count = b.n_cliques();
    for (size_t qi = 0; qi < clique_count; ++qi) {
        const int32_t* q = &b.cliques[qi * theta];
        bool inside = true;
        for (int t = 0; t < theta; ++t)
            if (!in_prev(q[t])) {
                inside = false;
                break;
            }
        if (inside) continue;
        for (int t = 0; t < theta; ++t)
            if (in_prev(q[t])) {
                if (anchor_next[q[t]] < 0)
                    throw InternalError("straddling clique outside the boundary interface");
                grows[anchor_next[q[t]]] = 1;
            }
    }
    auto adj = b.adjacency(cell);
    auto dist = detail::bfs_distances(adj, b.origin);
    int best = -1;
    for (int v = 0; v < b.n_vertices; ++v)
        if (grows[v] && dist[v] >= 0 && (best < 0 || dist[v] < best)) best = dist[v];
    if (best < 0) throw InternalError("no growing vertex found");
    return best - 1;
}

// ---------- exports (the JSON form lives in jsonio.hpp) ----------

enum class GraphFormat { EdgeList, CellFormat, AdjacencyJson };

inline std::string export_edge_list(const BlowupGraph& b, const CellGraph& cell) {
    std::ostringstream os;
    for (auto [a, c] : b.edge_list(cell)) os << a << " " << c << "\n";
    return os.str();
}

/// The level-n approximation is itself a valid cell graph with boundary
/// boundary(Y_n); this emits it in the cell format.
inline std::string export_cell_format(const BlowupGraph& b, const CellGraph& cell) {
    CellGraph g;
    g.n = b.n_vertices;
    for (auto [a, c] : b.edge_list(cell)) g.edges.emplace_back(a, c);
    g.boundary.assign(b.outer_boundary.begin(), b.outer_boundary.end());
    for (size_t qi = 0; qi < b.n_cliques(); ++qi) {
        std::vector<int> q(b.cliques.begin() + qi * b.theta,
                           b.cliques.begin() + (qi + 1) * b.theta);
        g.cliques.push_back(std::move(q));
    }
    std::sort(g.cliques.begin(), g.cliques.end());
    return cell_to_format(g);
}

} // namespace selfsim
