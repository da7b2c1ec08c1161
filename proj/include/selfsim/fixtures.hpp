#pragma once

#include <map>
#include <numeric>
#include <random>

#include "selfsim/cellgraph.hpp"

namespace selfsim {
namespace fixtures {

/// Path of length n with the two endpoints as boundary.
inline CellGraph line(int n) {
    if (n < 2) throw StructureError("line cell needs length >= 2");
    CellGraph g;
    g.n = n + 1;
    for (int i = 0; i < n; ++i) g.edges.emplace_back(i, i + 1);
    g.boundary = {0, n};
    validate_cell(g);
    return g;
}

/// n copies of the complete graph K_n amalgamated in a single centre vertex;
/// the boundary picks one free vertex out of each copy.
inline CellGraph flake(int n) {
    if (n < 2) throw StructureError("flake cell needs n >= 2");
    CellGraph g;
    g.n = 1 + n * (n - 1);
    for (int copy = 0; copy < n; ++copy) {
        std::vector<int> verts = {0};
        for (int j = 0; j < n - 1; ++j) verts.push_back(1 + copy * (n - 1) + j);
        for (size_t i = 0; i < verts.size(); ++i)
            for (size_t j = i + 1; j < verts.size(); ++j) g.edges.emplace_back(verts[i], verts[j]);
        g.boundary.push_back(1 + copy * (n - 1));
    }
    validate_cell(g);
    return g;
}

/// Simplex Sierpinski cell on the barycentric lattice: cells are indexed by
/// c in Z^(D+1), c >= 0, sum c = L-1; the cell at c spans the vertices c+e_i;
/// the boundary is the D+1 corners L*e_i. D=2, L=2 is the Sierpinski gasket
/// cell; D=3, L=4 gives the 3-dimensional 4-scaled example with 20 cells.
inline CellGraph sierpinski(int D, int L) {
    if (D < 1 || L < 2) throw StructureError("sierpinski cell needs D >= 1, L >= 2");
    using Point = std::vector<int>;
    std::map<Point, int> id;
    auto vertex_id = [&](const Point& p) {
        auto it = id.find(p);
        if (it == id.end()) it = id.emplace(p, static_cast<int>(id.size())).first;
        return it->second;
    };
    // enumerate lattice points with sum L in lexicographic order for stable ids
    std::vector<Point> pts;
    Point cur(D + 1, 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == D) {
            cur[pos] = left;
            pts.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[pos] = v;
            self(self, pos + 1, left - v);
        }
    };
    rec(rec, 0, L);
    for (const auto& p : pts) vertex_id(p);

    CellGraph g;
    g.n = static_cast<int>(pts.size());
    // cells: c with sum = L-1
    std::vector<Point> cells;
    Point cc(D + 1, 0);
    auto recc = [&](auto&& self, int pos, int left) -> void {
        if (pos == D) {
            cc[pos] = left;
            cells.push_back(cc);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cc[pos] = v;
            self(self, pos + 1, left - v);
        }
    };
    recc(recc, 0, L - 1);
    for (const auto& c : cells) {
        std::vector<int> verts;
        for (int i = 0; i <= D; ++i) {
            Point p = c;
            p[i] += 1;
            verts.push_back(vertex_id(p));
        }
        std::sort(verts.begin(), verts.end());
        g.cliques.push_back(verts);
        for (size_t i = 0; i < verts.size(); ++i)
            for (size_t j = i + 1; j < verts.size(); ++j) g.edges.emplace_back(verts[i], verts[j]);
    }
    for (int i = 0; i <= D; ++i) {
        Point corner(D + 1, 0);
        corner[i] = L;
        g.boundary.push_back(vertex_id(corner));
    }
    validate_cell(g);
    return g;
}

/// Mirror-symmetric random theta=2 cell: a random connected graph glued to its
/// own mirror image along a hinge vertex, boundary = one far vertex per half.
/// The mirror swap is a boundary-exchanging automorphism, so (S2) holds by
/// construction. Deterministic in the seed.
inline CellGraph random_mirror_cell(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nhalf_d(2, 5);
    int h = nhalf_d(rng); // vertices per half, excluding the hinge
    // random connected half on vertices {0..h-1}; hinge is vertex h (shared);
    // half vertex 0 is the boundary tip
    std::vector<std::pair<int, int>> half_edges;
    for (int v = 1; v < h; ++v) {
        std::uniform_int_distribution<int> prev(0, v - 1);
        half_edges.emplace_back(prev(rng), v);
    }
    std::uniform_int_distribution<int> extra_d(0, h);
    int extra = extra_d(rng);
    for (int e = 0; e < extra; ++e) {
        std::uniform_int_distribution<int> pick(0, h - 1);
        int a = pick(rng), b = pick(rng);
        if (a != b) half_edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    // hinge attaches to a nonempty random subset of the half, never to the tip
    // (the tip must stay non-adjacent to its mirror and at distance > 1)
    std::vector<int> hinge_nbrs;
    for (int v = 1; v < h; ++v) {
        std::uniform_int_distribution<int> coin(0, 1);
        if (coin(rng)) hinge_nbrs.push_back(v);
    }
    if (hinge_nbrs.empty()) hinge_nbrs.push_back(h - 1);

    CellGraph g;
    g.n = 2 * h + 1;
    const int hinge = 2 * h;
    auto mirror = [&](int v) { return h + v; };
    std::set<std::pair<int, int>> es;
    auto add = [&](int a, int b) {
        if (a == b) return;
        es.insert({std::min(a, b), std::max(a, b)});
    };
    for (auto [a, b] : half_edges) {
        add(a, b);
        add(mirror(a), mirror(b));
    }
    for (int v : hinge_nbrs) {
        add(hinge, v);
        add(hinge, mirror(v));
    }
    g.edges.assign(es.begin(), es.end());
    g.boundary = {0, mirror(0)};
    validate_cell(g);
    return g;
}

/// Deterministic stream of random cells that pass the full symmetry check.
inline std::vector<CellGraph> random_symmetric_cells(int count, uint64_t seed) {
    std::vector<CellGraph> out;
    uint64_t s = seed;
    while (static_cast<int>(out.size()) < count) {
        ++s;
        try {
            CellGraph g = random_mirror_cell(s);
            AxiomReport rep = verify_symmetry(g);
            if (rep.passed) out.push_back(std::move(g));
        } catch (const StructureError&) {
            continue; // e.g. tip accidentally adjacent to hinge-mirror path
        }
    }
    return out;
}

// Failing-axiom counterexamples used in tests and shipped by the CLI.

/// boundary vertices adjacent: invalid
inline std::string bad_adjacent_boundary() {
    return "vertices 2\nedge 0 1\nboundary 0 1\n";
}

/// valid structure but not doubly transitive (asymmetric boundary pair:
/// a path with a pendant vertex breaking the swap)
inline std::string bad_not_transitive() {
    return "vertices 5\nedge 0 1\nedge 1 2\nedge 2 3\nedge 1 4\nboundary 0 3\n";
}

/// no decomposition into edge-disjoint 3-cliques (K4 minus an edge, theta=3)
inline std::string bad_no_clique_cover() {
    return "vertices 5\nedge 0 1\nedge 0 2\nedge 1 2\nedge 1 3\nedge 2 3\nedge 3 4\nedge 1 4\n"
           "boundary 0 3 4\n";
}

/// interior disconnected (4-cycle with antipodal boundary)
inline std::string bad_disconnected_interior() {
    return "vertices 4\nedge 0 1\nedge 1 2\nedge 2 3\nedge 3 0\nboundary 0 2\n";
}

} // namespace fixtures
} // namespace selfsim
