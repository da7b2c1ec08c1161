#include "doctest.h"

#include <random>
#include <set>

#include "selfsim/blowup.hpp"
#include "selfsim/fixtures.hpp"
#include "selfsim/jsonio.hpp"

using namespace selfsim;

namespace {

int base_clique_with_origin(const CellGraph& g) {
    for (int i = 0; i < g.mu(); ++i) {
        int hits = 0;
        for (int v : g.cliques[i])
            if (g.is_boundary(v)) ++hits;
        if (hits == 1) return i;
    }
    throw StructureError("no clique meets the boundary in exactly one vertex");
}

// reduction of a graph to F: connect two F-vertices when a component of the
// complement has both in its boundary
std::vector<std::pair<int, int>> reduced_edges(const std::vector<std::vector<int32_t>>& adj,
                                               const std::vector<int>& fset) {
    std::vector<char> in_f(adj.size(), 0);
    for (int v : fset) in_f[v] = 1;
    std::vector<char> seen(adj.size(), 0);
    std::set<std::pair<int, int>> out;
    for (size_t s = 0; s < adj.size(); ++s) {
        if (in_f[s] || seen[s]) continue;
        std::vector<int> stack = {static_cast<int>(s)};
        std::set<int> bnd;
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v]) {
                if (in_f[w]) {
                    bnd.insert(w);
                } else if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        for (int x : bnd)
            for (int y : bnd)
                if (x < y) out.insert({x, y});
    }
    return {out.begin(), out.end()};
}

} // namespace

TEST_CASE("one level is the cell graph itself") {
    CellGraph g = fixtures::flake(3);
    BlowupGraph b = blow_up(g, base_clique_with_origin(g), 1);
    CHECK(b.n_vertices == g.n);
    CHECK(b.edge_list(g).size() == g.edges.size());
    CHECK(b.origin >= 0);
    CHECK(safe_ball_radius(b, g) >= 1);
}

TEST_CASE("line blow-up is a single ray") {
    CellGraph g = fixtures::line(2);
    BlowupGraph b = blow_up(g, 0, 3);
    CHECK(b.n_vertices == 9);
    auto adj = b.adjacency(g);
    int deg1 = 0, deg2 = 0;
    for (auto& row : adj) {
        if (row.size() == 1) ++deg1;
        if (row.size() == 2) ++deg2;
    }
    CHECK(deg1 == 2); // a path
    CHECK(deg2 == 7);
    CHECK(b.origin == 0);
    CHECK(safe_ball_radius(b, g) == 7); // 2^3 - 1
}

TEST_CASE("edge and clique counts follow the scaling law") {
    CellGraph fl = fixtures::flake(4);
    for (int lv = 1; lv <= 3; ++lv) {
        BlowupGraph b = blow_up(fl, base_clique_with_origin(fl), lv);
        size_t mu = fl.mu();
        size_t cells_expect = 1;
        for (int i = 1; i < lv; ++i) cells_expect *= mu;
        CHECK(b.n_cells() == cells_expect);
        CHECK(b.edge_list(fl).size() == cells_expect * fl.edges.size());
    }
    // flake(4), 2 levels: 16 cliques and 96 edges
    BlowupGraph b2 = blow_up(fl, base_clique_with_origin(fl), 2);
    CHECK(b2.n_cliques() == 16);
    CHECK(b2.edge_list(fl).size() == 96);
}

TEST_CASE("sierpinski gasket counts and radius") {
    CellGraph g = fixtures::sierpinski(2, 2);
    int base = base_clique_with_origin(g);
    for (int lv = 1; lv <= 4; ++lv) {
        BlowupGraph b = blow_up(g, base, lv);
        size_t tri = 1;
        for (int i = 0; i < lv; ++i) tri *= 3;
        // 3^lv triangles, 3^(lv+1) edges, (3^(lv+1)+3)/2 vertices
        CHECK(b.n_cliques() == tri);
        CHECK(b.edge_list(g).size() == 3 * tri);
        CHECK(b.n_vertices == static_cast<int>((3 * tri + 3) / 2));
    }
    BlowupGraph b4 = blow_up(g, base, 4);
    CHECK(safe_ball_radius(b4, g) == 15); // 2^4 - 1
}

TEST_CASE("degree law in the blow-up") {
    CellGraph g = fixtures::sierpinski(2, 2);
    BlowupGraph b = blow_up(g, base_clique_with_origin(g), 3);
    auto adj = b.adjacency(g);
    std::vector<int> beta(b.n_vertices, 0);
    for (size_t qi = 0; qi < b.n_cliques(); ++qi)
        for (int t = 0; t < b.theta; ++t) ++beta[b.cliques[qi * b.theta + t]];
    for (int v = 0; v < b.n_vertices; ++v)
        CHECK(static_cast<int>(adj[v].size()) == (b.theta - 1) * beta[v]);
}

TEST_CASE("psi reduces Y_(k+1) onto Y_k") {
    for (const CellGraph& g :
         {fixtures::line(2), fixtures::line(3), fixtures::flake(3), fixtures::sierpinski(2, 2)}) {
        int base = base_clique_with_origin(g);
        for (int k = 1; k <= 3; ++k) {
            BlowupGraph big = blow_up(g, base, k + 1);
            BlowupGraph small = blow_up(g, base, k);
            // stable prefix: Y_k ids inside Y_{k+1}
            CHECK(big.vy_sizes[k - 1] == small.n_vertices);
            auto small_edges = small.edge_list(g);
            auto big_edges_vec = big.edge_list(g);
            std::set<std::pair<int32_t, int32_t>> big_edges(big_edges_vec.begin(),
                                                            big_edges_vec.end());
            for (auto [a, c] : small_edges) CHECK(big_edges.count({a, c}) == 1);

            // psi is defined exactly on VY_k and injective
            std::set<int> image;
            for (int v = 0; v < small.n_vertices; ++v) {
                REQUIRE(big.psi[v] >= 0);
                image.insert(big.psi[v]);
            }
            CHECK(static_cast<int>(image.size()) == small.n_vertices);
            for (int v = small.n_vertices; v < big.n_vertices; ++v) CHECK(big.psi[v] == -1);

            // image of psi is F_{k+1}
            std::vector<int> fk1 = big.level_set(k + 1);
            CHECK(std::set<int>(fk1.begin(), fk1.end()) == image);

            // no two F vertices adjacent
            auto adj = big.adjacency(g);
            for (int x : fk1)
                for (int w : adj[x]) CHECK(!std::binary_search(fk1.begin(), fk1.end(), w));

            // reduced graph is isomorphic to Y_k via psi
            auto red = reduced_edges(adj, fk1);
            std::set<std::pair<int, int>> expect;
            for (auto [a, c] : small_edges) {
                int x = big.psi[a], y = big.psi[c];
                expect.insert({std::min(x, y), std::max(x, y)});
            }
            CHECK(std::set<std::pair<int, int>>(red.begin(), red.end()) == expect);
        }
    }
}

TEST_CASE("distance doubling under psi") {
    CellGraph g = fixtures::sierpinski(2, 2);
    BlowupGraph b = blow_up(g, base_clique_with_origin(g), 4);
    BlowupGraph prev = blow_up(g, base_clique_with_origin(g), 3);
    auto adj = b.adjacency(g);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, prev.n_vertices - 1);
    for (int it = 0; it < 12; ++it) {
        int x = pick(rng);
        auto dist = detail::bfs_distances(adj, x);
        auto dist_psi = detail::bfs_distances(adj, b.psi[x]);
        for (int jt = 0; jt < 8; ++jt) {
            int y = pick(rng);
            CHECK(dist_psi[b.psi[y]] >= 2 * dist[y]);
        }
    }
}

TEST_CASE("origin requires a singleton intersection with the boundary") {
    CellGraph g = fixtures::sierpinski(2, 3);
    // a middle cell touches no boundary corner: no fixed point of psi
    int middle = -1;
    for (int i = 0; i < g.mu(); ++i) {
        int hits = 0;
        for (int v : g.cliques[i])
            if (g.is_boundary(v)) ++hits;
        if (hits == 0) middle = i;
    }
    REQUIRE(middle >= 0);
    BlowupGraph b = blow_up(g, middle, 3);
    CHECK(b.origin == -1);
    CHECK_THROWS_AS(safe_ball_radius(b, g), StructureError);
}

TEST_CASE("blow-up rejects bad arguments") {
    CellGraph g = fixtures::line(2);
    CHECK_THROWS_AS(blow_up(g, 5, 2), StructureError);
    CHECK_THROWS_AS(blow_up(g, 0, 0), StructureError);
}

TEST_CASE("exports round trip") {
  for (const CellGraph& g :
       {fixtures::line(3), fixtures::flake(3), fixtures::sierpinski(2, 2)}) {
    BlowupGraph b = blow_up(g, base_clique_with_origin(g), 2);

    // edge list: parse back and compare
    std::string el = export_edge_list(b, g);
    std::istringstream in(el);
    std::vector<std::pair<int32_t, int32_t>> parsed;
    int32_t a, c;
    while (in >> a >> c) parsed.emplace_back(a, c);
    CHECK(parsed == b.edge_list(g));

    // cell format: the finite approximation is itself a valid cell graph
    CellGraph as_cell = load_cell_graph(export_cell_format(b, g));
    CHECK(as_cell.n == b.n_vertices);
    CHECK(as_cell.edges.size() == b.edge_list(g).size());
    CHECK(export_cell_format(b, g) == cell_to_format(as_cell));

    // adjacency json: emit, parse, emit again byte-identically
    json j = blowup_to_json(b, g);
    BlowupJsonView view = blowup_from_json(j);
    CHECK(view.vertices == b.n_vertices);
    CHECK(view.origin == b.origin);
    CHECK(view.levels == b.levels);
    json j2;
    j2["vertices"] = view.vertices;
    j2["edges"] = json::array();
    for (auto [x, y] : view.edges) j2["edges"].push_back({x, y});
    j2["levels"] = view.levels;
    j2["level_sets"] = view.level_sets;
    j2["origin"] = view.origin;
    CHECK(j.dump() == j2.dump());
  }
}
