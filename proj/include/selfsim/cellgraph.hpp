#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "selfsim/rational.hpp"

namespace selfsim {

/// Finite cell graph: the blow-up seed. Vertices are 0-based; `boundary` is an
/// ordered set (deterministic reports and file round trips); `cliques` is the
/// edge partition into theta-complete subgraphs, computed on validation when
/// the input omits it.
struct CellGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges; // a < b, sorted, unique
    std::vector<int> boundary;
    std::vector<std::vector<int>> cliques;  // each sorted ascending

    std::vector<std::vector<int>> adj;      // built by validate()

    int theta() const { return static_cast<int>(boundary.size()); }
    int mu() const { return static_cast<int>(cliques.size()); }

    bool is_boundary(int v) const {
        return std::find(boundary.begin(), boundary.end(), v) != boundary.end();
    }

    /// branching number: how many cliques contain v
    std::vector<int> branching_numbers() const {
        std::vector<int> beta(n, 0);
        for (const auto& q : cliques)
            for (int v : q) ++beta[v];
        return beta;
    }

    int degree(int v) const { return static_cast<int>(adj[v].size()); }
};

struct AxiomReport {
    bool passed = false;
    int theta = 0;
    int mu = 0;
    std::vector<int> beta_map;
    int beta = 0;               // common branching number of boundary vertices
    bool doubly_transitive = false;
    bool bipartite = false;
    std::vector<std::pair<std::string, std::string>> failures; // (code, message)
};

namespace detail {

inline void build_adjacency(CellGraph& g) {
    g.adj.assign(g.n, {});
    for (auto [a, b] : g.edges) {
        g.adj[a].push_back(b);
        g.adj[b].push_back(a);
    }
    for (auto& row : g.adj) std::sort(row.begin(), row.end());
}

inline bool connected_subset(const CellGraph& g, const std::vector<int>& verts) {
    if (verts.empty()) return true;
    std::vector<char> in(g.n, 0), seen(g.n, 0);
    for (int v : verts) in[v] = 1;
    std::queue<int> q;
    q.push(verts[0]);
    seen[verts[0]] = 1;
    int cnt = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        ++cnt;
        for (int w : g.adj[v])
            if (in[w] && !seen[w]) {
                seen[w] = 1;
                q.push(w);
            }
    }
    return cnt == static_cast<int>(verts.size());
}

// Backtracking cover of the edge set by theta-cliques, edges in lexicographic
// order. Returns false when no exact cover exists.
struct CliqueCover {
    const CellGraph& g;
    int theta;
    std::map<std::pair<int, int>, int> edge_index;
    std::vector<char> covered;
    std::vector<std::vector<int>> out;

    CliqueCover(const CellGraph& graph, int th) : g(graph), theta(th) {
        int idx = 0;
        for (auto& e : g.edges) edge_index[e] = idx++;
        covered.assign(g.edges.size(), 0);
    }

    int eindex(int a, int b) const {
        auto it = edge_index.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
        return it == edge_index.end() ? -1 : it->second;
    }

    bool clique_edges_free(const std::vector<int>& verts) const {
        for (size_t i = 0; i < verts.size(); ++i)
            for (size_t j = i + 1; j < verts.size(); ++j) {
                int e = eindex(verts[i], verts[j]);
                if (e < 0 || covered[e]) return false;
            }
        return true;
    }

    void mark(const std::vector<int>& verts, char val) {
        for (size_t i = 0; i < verts.size(); ++i)
            for (size_t j = i + 1; j < verts.size(); ++j) covered[eindex(verts[i], verts[j])] = val;
    }

    bool solve() {
        size_t first = 0;
        while (first < covered.size() && covered[first]) ++first;
        if (first == covered.size()) return true;
        auto [a, b] = g.edges[first];
        // candidate extensions: theta-2 common neighbours forming a complete
        // subgraph with all edges uncovered
        std::vector<int> common;
        std::set_intersection(g.adj[a].begin(), g.adj[a].end(), g.adj[b].begin(), g.adj[b].end(),
                              std::back_inserter(common));
        std::vector<int> pick;
        return extend(a, b, common, 0, pick);
    }

    bool extend(int a, int b, const std::vector<int>& common, size_t from, std::vector<int>& pick) {
        if (static_cast<int>(pick.size()) == theta - 2) {
            std::vector<int> verts = {a, b};
            verts.insert(verts.end(), pick.begin(), pick.end());
            std::sort(verts.begin(), verts.end());
            if (!clique_edges_free(verts)) return false;
            mark(verts, 1);
            out.push_back(verts);
            if (solve()) return true;
            out.pop_back();
            mark(verts, 0);
            return false;
        }
        for (size_t i = from; i < common.size(); ++i) {
            int c = common[i];
            bool ok = true;
            for (int p : pick)
                if (!std::binary_search(g.adj[c].begin(), g.adj[c].end(), p)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            pick.push_back(c);
            if (extend(a, b, common, i + 1, pick)) return true;
            pick.pop_back();
        }
        return false;
    }
};

} // namespace detail

/// Structural validation per the blow-up preconditions. Fills adjacency and,
/// when absent, the clique decomposition. Throws StructureError on violation.
inline void validate_cell(CellGraph& g) {
    if (g.n <= 0) throw StructureError("cell graph needs at least one vertex");
    for (auto& [a, b] : g.edges) {
        if (a == b) throw StructureError("loop edge");
        if (a > b) std::swap(a, b);
        if (a < 0 || b >= g.n) throw StructureError("edge endpoint out of range");
    }
    std::sort(g.edges.begin(), g.edges.end());
    if (std::adjacent_find(g.edges.begin(), g.edges.end()) != g.edges.end())
        throw StructureError("duplicate edge");
    detail::build_adjacency(g);

    std::vector<int> all(g.n);
    for (int i = 0; i < g.n; ++i) all[i] = i;
    if (!detail::connected_subset(g, all)) throw StructureError("graph is not connected");

    int theta = g.theta();
    if (theta < 2) throw StructureError("boundary needs at least two vertices");
    {
        std::set<int> bs(g.boundary.begin(), g.boundary.end());
        if (static_cast<int>(bs.size()) != theta) throw StructureError("repeated boundary vertex");
        for (int v : g.boundary)
            if (v < 0 || v >= g.n) throw StructureError("boundary vertex out of range");
        for (int v : g.boundary)
            for (int w : g.adj[v])
                if (bs.count(w))
                    throw StructureError("boundary vertices " + std::to_string(v) + " and " +
                                         std::to_string(w) + " are adjacent");
    }
    {
        std::vector<int> interior;
        for (int v = 0; v < g.n; ++v)
            if (!g.is_boundary(v)) interior.push_back(v);
        if (interior.empty()) throw StructureError("no interior vertices");
        if (!detail::connected_subset(g, interior))
            throw StructureError("interior is not connected");
    }

    if (g.cliques.empty()) {
        if (theta == 2) {
            for (auto [a, b] : g.edges) g.cliques.push_back({a, b});
        } else {
            if (2 * g.edges.size() % (static_cast<size_t>(theta) * (theta - 1)) != 0)
                throw StructureError("edge count admits no decomposition into " +
                                     std::to_string(theta) + "-cliques");
            detail::CliqueCover cover(g, theta);
            if (!cover.solve())
                throw StructureError("no decomposition into edge-disjoint " +
                                     std::to_string(theta) + "-cliques exists");
            g.cliques = std::move(cover.out);
        }
    } else {
        // verify the supplied decomposition
        std::set<std::pair<int, int>> seen;
        for (auto& q : g.cliques) {
            std::sort(q.begin(), q.end());
            if (static_cast<int>(q.size()) != theta)
                throw StructureError("clique of wrong size");
            for (size_t i = 0; i < q.size(); ++i)
                for (size_t j = i + 1; j < q.size(); ++j) {
                    if (!std::binary_search(g.adj[q[i]].begin(), g.adj[q[i]].end(), q[j]))
                        throw StructureError("declared clique is not complete");
                    if (!seen.insert({q[i], q[j]}).second)
                        throw StructureError("edge covered by two cliques");
                }
        }
        if (seen.size() != g.edges.size())
            throw StructureError("cliques do not cover every edge");
        for (size_t i = 0; i < g.cliques.size(); ++i)
            for (size_t j = i + 1; j < g.cliques.size(); ++j) {
                std::vector<int> inter;
                std::set_intersection(g.cliques[i].begin(), g.cliques[i].end(),
                                      g.cliques[j].begin(), g.cliques[j].end(),
                                      std::back_inserter(inter));
                if (inter.size() > 1) throw StructureError("two cliques share more than one vertex");
            }
    }
    std::sort(g.cliques.begin(), g.cliques.end());
    // mu * theta * (theta-1) = 2|E| holds by the exact edge partition
    if (2 * g.edges.size() != g.cliques.size() * static_cast<size_t>(theta) * (theta - 1))
        throw InternalError("edge partition miscount");
}

// ---------- cell-format / JSON parsing ----------

/// Parse the cell-format text document (see README) and validate.
inline CellGraph load_cell_graph(const std::string& text);

inline CellGraph parse_cell_format(const std::string& text) {
    CellGraph g;
    std::istringstream in(text);
    std::string line;
    bool have_vertices = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto want_int = [&](const char* what) {
            long long x;
            if (!(ls >> x)) throw ParseError(std::string("line ") + std::to_string(lineno) +
                                             ": expected " + what);
            return static_cast<int>(x);
        };
        if (kw == "vertices") {
            g.n = want_int("vertex count");
            if (g.n <= 0) throw ParseError("vertex count must be positive");
            have_vertices = true;
        } else if (kw == "edge") {
            int a = want_int("edge endpoint"), b = want_int("edge endpoint");
            g.edges.emplace_back(a, b);
        } else if (kw == "boundary") {
            int v;
            while (ls >> v) g.boundary.push_back(v);
        } else if (kw == "clique") {
            std::vector<int> q;
            int v;
            while (ls >> v) q.push_back(v);
            g.cliques.push_back(std::move(q));
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
        }
    }
    if (!have_vertices) throw ParseError("missing 'vertices' line");
    if (g.boundary.empty()) throw ParseError("missing 'boundary' line");
    return g;
}

inline std::string cell_to_format(const CellGraph& g) {
    std::ostringstream os;
    os << "vertices " << g.n << "\n";
    for (auto [a, b] : g.edges) os << "edge " << a << " " << b << "\n";
    os << "boundary";
    for (int v : g.boundary) os << " " << v;
    os << "\n";
    for (const auto& q : g.cliques) {
        os << "clique";
        for (int v : q) os << " " << v;
        os << "\n";
    }
    return os.str();
}

// ---------- simple walk measure / bipartiteness ----------

/// m(x) = beta(x) / (mu * theta), verified exactly to be the stationary
/// distribution of the simple random walk on the cell graph.
inline std::vector<Rat> invariant_measure(const CellGraph& g) {
    std::vector<int> beta = g.branching_numbers();
    Rat denom(static_cast<long>(g.mu()) * g.theta());
    std::vector<Rat> m(g.n);
    Rat total(0);
    for (int v = 0; v < g.n; ++v) {
        m[v] = Rat(beta[v]) / denom;
        total += m[v];
    }
    if (total != 1) throw TheoremViolation("invariant measure does not normalize: sum = " +
                                           rat_to_string(total));
    // stationarity: m(x) = sum_y m(y) p(y, x) with p(y, x) = 1/deg(y)
    for (int x = 0; x < g.n; ++x) {
        Rat acc(0);
        for (int y : g.adj[x]) acc += m[y] / Rat(g.degree(y));
        if (acc != m[x])
            throw TheoremViolation("invariant measure fails m*P = m at vertex " +
                                   std::to_string(x) + ": " + rat_to_string(acc) + " vs " +
                                   rat_to_string(m[x]));
    }
    return m;
}

struct BipartiteResult {
    bool bipartite = false;
    std::vector<int> color; // 0/1 classes when bipartite, empty otherwise
};

inline BipartiteResult is_bipartite(const CellGraph& g) {
    std::vector<int> color(g.n, -1);
    std::queue<int> q;
    color[0] = 0;
    q.push(0);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : g.adj[v]) {
            if (color[w] < 0) {
                color[w] = 1 - color[v];
                q.push(w);
            } else if (color[w] == color[v]) {
                return {};
            }
        }
    }
    BipartiteResult r;
    r.bipartite = true;
    r.color = std::move(color);
    if (g.theta() != 2)
        throw TheoremViolation("bipartite cell with theta != 2 contradicts the bipartite lemma");
    // all boundary-to-boundary paths share one parity: the two-coloring fixes it
    return r;
}

// ---------- automorphisms / double transitivity ----------

namespace detail {

// 1-WL style refinement labels; initial label = (is_boundary, degree)
inline std::vector<int> refine_labels(const CellGraph& g) {
    std::vector<int> lab(g.n);
    for (int v = 0; v < g.n; ++v) lab[v] = g.degree(v) * 2 + (g.is_boundary(v) ? 1 : 0);
    for (int round = 0; round < g.n; ++round) {
        std::map<std::pair<int, std::vector<int>>, int> dict;
        std::vector<int> next(g.n);
        for (int v = 0; v < g.n; ++v) {
            std::vector<int> sig;
            sig.reserve(g.adj[v].size());
            for (int w : g.adj[v]) sig.push_back(lab[w]);
            std::sort(sig.begin(), sig.end());
            auto key = std::make_pair(lab[v], std::move(sig));
            auto it = dict.find(key);
            if (it == dict.end()) it = dict.emplace(std::move(key), static_cast<int>(dict.size())).first;
            next[v] = it->second;
        }
        if (next == lab) break;
        lab = std::move(next);
    }
    return lab;
}

// Backtracking search for a boundary-preserving automorphism extending the
// given pins. Candidates are pruned by refinement class and adjacency
// consistency with the partial map.
struct AutoSearch {
    const CellGraph& g;
    std::vector<int> lab;
    std::vector<int> img, pre; // partial map and inverse, -1 = unset

    explicit AutoSearch(const CellGraph& g_) : g(g_), lab(refine_labels(g_)) {
        img.assign(g.n, -1);
        pre.assign(g.n, -1);
    }

    bool compatible(int v, int w) const {
        if (lab[v] != lab[w]) return false;
        if (g.is_boundary(v) != g.is_boundary(w)) return false;
        // adjacency with already-mapped vertices must match both ways
        for (int x : g.adj[v]) {
            if (img[x] >= 0 && !std::binary_search(g.adj[w].begin(), g.adj[w].end(), img[x]))
                return false;
        }
        for (int y : g.adj[w]) {
            if (pre[y] >= 0 && !std::binary_search(g.adj[v].begin(), g.adj[v].end(), pre[y]))
                return false;
        }
        return true;
    }

    bool assign(int v, int w) {
        if (img[v] >= 0) return img[v] == w;
        if (pre[w] >= 0) return false;
        if (!compatible(v, w)) return false;
        img[v] = w;
        pre[w] = v;
        return true;
    }

    int pick_unmapped() const {
        // most-constrained first: prefer vertices with mapped neighbours
        int best = -1, best_score = -1;
        for (int v = 0; v < g.n; ++v) {
            if (img[v] >= 0) continue;
            int score = 0;
            for (int x : g.adj[v])
                if (img[x] >= 0) ++score;
            if (score > best_score) {
                best_score = score;
                best = v;
            }
        }
        return best;
    }

    bool search() {
        int v = pick_unmapped();
        if (v < 0) return true; // total map; edge consistency enforced incrementally
        for (int w = 0; w < g.n; ++w) {
            if (pre[w] >= 0 || !compatible(v, w)) continue;
            img[v] = w;
            pre[w] = v;
            if (search()) return true;
            img[v] = -1;
            pre[w] = -1;
        }
        return false;
    }
};

// is there a boundary-preserving automorphism with g(a)=c, g(b)=d?
inline bool exists_automorphism_with_pins(const CellGraph& g, int a, int c, int b, int d) {
    AutoSearch s(g);
    if (!s.assign(a, c)) return false;
    if (!s.assign(b, d)) return false;
    return s.search();
}

} // namespace detail

inline constexpr int kDefaultAutomorphismCap = 64;

/// Double transitivity of the boundary action plus the cheap axioms; the
/// search is exhaustive up to `size_cap` vertices.
inline AxiomReport verify_symmetry(const CellGraph& g, int size_cap = kDefaultAutomorphismCap) {
    if (g.n > size_cap)
        throw StructureError("cell with " + std::to_string(g.n) +
                             " vertices exceeds the exhaustive automorphism search cap of " +
                             std::to_string(size_cap));
    AxiomReport rep;
    rep.theta = g.theta();
    rep.mu = g.mu();
    rep.beta_map = g.branching_numbers();

    bool beta_common = true;
    int beta0 = rep.beta_map[g.boundary[0]];
    for (int v : g.boundary)
        if (rep.beta_map[v] != beta0) beta_common = false;
    if (!beta_common)
        rep.failures.emplace_back("beta", "boundary vertices have unequal branching numbers");
    rep.beta = beta0;

    // degree law deg = (theta-1) * beta holds in any clique-decomposed cell;
    // check as an internal consistency guard
    for (int v = 0; v < g.n; ++v)
        if (g.degree(v) != (rep.theta - 1) * rep.beta_map[v])
            throw InternalError("degree/branching mismatch at vertex " + std::to_string(v));

    // doubly transitive: enough to map one fixed ordered pair to every other
    int a = g.boundary[0], b = g.boundary[1];
    rep.doubly_transitive = true;
    for (int x : g.boundary) {
        for (int y : g.boundary) {
            if (x == y) continue;
            if (x == a && y == b) continue;
            if (!detail::exists_automorphism_with_pins(g, a, x, b, y)) {
                rep.doubly_transitive = false;
                rep.failures.emplace_back(
                    "S2", "no automorphism maps boundary pair (" + std::to_string(a) + "," +
                              std::to_string(b) + ") to (" + std::to_string(x) + "," +
                              std::to_string(y) + ")");
                break;
            }
        }
        if (!rep.doubly_transitive) break;
    }

    try {
        rep.bipartite = is_bipartite(g).bipartite;
    } catch (const TheoremViolation&) {
        // bipartite with theta != 2 cannot pass symmetry; record and move on
        rep.bipartite = true;
        rep.failures.emplace_back("bipartite", "bipartite cell with theta != 2");
    }

    rep.passed = rep.doubly_transitive && beta_common && rep.failures.empty();
    return rep;
}

inline CellGraph load_cell_graph(const std::string& text) {
    CellGraph g = parse_cell_format(text);
    validate_cell(g);
    return g;
}

} // namespace selfsim
