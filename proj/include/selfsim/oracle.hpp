#pragma once

#include <cstdint>
#include <map>
#include <thread>
#include <tuple>

#include "selfsim/blowup.hpp"
#include "selfsim/cellgraph.hpp"

namespace selfsim {

/// Counter-based generator: the SplitMix64 finalizer applied to
/// key + (counter+1) * 0x9E3779B97F4A7C15. Stateless, so any shard can read
/// any position of its stream; results are bit-reproducible across platforms
/// and thread counts. Stream s of a sharded run uses counters offset by
/// s * 2^40.
struct CounterRng {
    uint64_t key;

    static uint64_t finalize(uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }
    uint64_t at(uint64_t counter) const {
        return finalize(key + (counter + 1) * 0x9E3779B97F4A7C15ull);
    }
    /// uniform index in [0, bound) by the multiply-shift reduction
    uint32_t bounded(uint64_t counter, uint32_t bound) const {
        return static_cast<uint32_t>((static_cast<unsigned __int128>(at(counter)) * bound) >> 64);
    }
};

/// Finite Markov chain stored as an in-edge list: for each target y, the pairs
/// (x, q(x,y)). Rows of absorbing vertices are zero, so their mass vanishes a
/// step after arrival; reading the arrival step gives first-hit distributions.
struct FiniteChain {
    int n = 0;
    std::vector<int> in_offsets;       // size n+1
    std::vector<int32_t> in_src;       // flattened sources
    std::vector<Rat> in_q;             // exact q(src, y)
    std::vector<double> in_q_d;        // double mirror
    std::vector<char> absorbing;
    std::vector<Rat> stationary;       // filled when reversibility is known
    bool reversible = false;

    static FiniteChain from_in_edges(int n,
                                     std::vector<std::vector<std::pair<int, Rat>>> in_edges,
                                     std::vector<char> absorbing_flags) {
        FiniteChain c;
        c.n = n;
        c.absorbing = std::move(absorbing_flags);
        c.in_offsets.assign(n + 1, 0);
        for (int y = 0; y < n; ++y) c.in_offsets[y + 1] = c.in_offsets[y] + static_cast<int>(in_edges[y].size());
        c.in_src.reserve(c.in_offsets[n]);
        c.in_q.reserve(c.in_offsets[n]);
        for (int y = 0; y < n; ++y) {
            std::sort(in_edges[y].begin(), in_edges[y].end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (auto& [x, q] : in_edges[y]) {
                c.in_src.push_back(x);
                c.in_q.push_back(q);
                c.in_q_d.push_back(mpq_get_d(q.get_mpq_t()));
            }
        }
        return c;
    }

    /// simple random walk on an undirected graph with an absorbing vertex set
    static FiniteChain simple_walk(int n, const std::vector<std::pair<int, int>>& edges,
                                   const std::vector<int>& absorbing_set) {
        std::vector<int> deg(n, 0);
        for (auto [a, b] : edges) {
            ++deg[a];
            ++deg[b];
        }
        std::vector<char> abs_flags(n, 0);
        for (int v : absorbing_set) abs_flags[v] = 1;
        std::vector<std::vector<std::pair<int, Rat>>> in_edges(n);
        for (auto [a, b] : edges) {
            if (!abs_flags[a]) in_edges[b].emplace_back(a, Rat(1) / Rat(deg[a]));
            if (!abs_flags[b]) in_edges[a].emplace_back(b, Rat(1) / Rat(deg[b]));
        }
        FiniteChain c = from_in_edges(n, std::move(in_edges), std::move(abs_flags));
        c.reversible = absorbing_set.empty();
        if (c.reversible) {
            long total = 0;
            for (int v = 0; v < n; ++v) total += deg[v];
            c.stationary.resize(n);
            for (int v = 0; v < n; ++v) c.stationary[v] = Rat(deg[v]) / Rat(total);
        }
        return c;
    }

    /// reversible nearest-neighbour chain from positive undirected edge
    /// weights: q(x,y) = w(xy) / W(x)
    static FiniteChain weighted_walk(int n, const std::vector<std::tuple<int, int, Rat>>& wedges) {
        std::vector<Rat> wsum(n, Rat(0));
        for (const auto& [a, b, w] : wedges) {
            if (w <= 0) throw StructureError("edge weights must be positive");
            wsum[a] += w;
            wsum[b] += w;
        }
        std::vector<std::vector<std::pair<int, Rat>>> in_edges(n);
        for (const auto& [a, b, w] : wedges) {
            in_edges[b].emplace_back(a, w / wsum[a]);
            in_edges[a].emplace_back(b, w / wsum[b]);
        }
        FiniteChain c = from_in_edges(n, std::move(in_edges), std::vector<char>(n, 0));
        c.reversible = true;
        Rat total(0);
        for (const Rat& w : wsum) total += w;
        c.stationary.resize(n);
        for (int v = 0; v < n; ++v) c.stationary[v] = wsum[v] / total;
        return c;
    }

    /// explicit transition rows; detailed balance is verified and chains that
    /// fail it are rejected (needed by the geodesic bound, which assumes
    /// reversibility)
    static FiniteChain directed(int n, const std::vector<std::vector<std::pair<int, Rat>>>& rows,
                                bool require_reversible) {
        std::vector<std::vector<std::pair<int, Rat>>> in_edges(n);
        std::vector<char> abs_flags(n, 0);
        std::vector<std::map<int, Rat>> q(n);
        for (int x = 0; x < n; ++x) {
            Rat sum(0);
            for (auto& [y, p] : rows[x]) {
                if (p < 0) throw StructureError("negative transition probability");
                q[x][y] = p;
                sum += p;
                if (p > 0) in_edges[y].emplace_back(x, p);
            }
            if (rows[x].empty())
                abs_flags[x] = 1;
            else if (sum != 1)
                throw StructureError("transition row does not sum to 1");
        }
        FiniteChain c = from_in_edges(n, std::move(in_edges), std::move(abs_flags));
        if (require_reversible) {
            // m along a BFS tree, then detailed balance on every edge
            std::vector<Rat> m(n, Rat(0));
            std::vector<int> order;
            m[0] = 1;
            order.push_back(0);
            for (size_t i = 0; i < order.size(); ++i) {
                int x = order[i];
                for (auto& [y, p] : q[x]) {
                    if (p == 0 || m[y] != 0 || y == 0) continue;
                    auto back = q[y].find(x);
                    if (back == q[y].end() || back->second == 0)
                        throw StructureError("chain is not reversible: one-way edge");
                    m[y] = m[x] * p / back->second;
                    order.push_back(y);
                }
            }
            Rat total(0);
            for (int v = 0; v < n; ++v) {
                if (m[v] == 0) throw StructureError("chain is not irreducible");
                total += m[v];
            }
            for (int x = 0; x < n; ++x)
                for (auto& [y, p] : q[x]) {
                    auto back = q[y].find(x);
                    Rat pyx = back == q[y].end() ? Rat(0) : back->second;
                    if (m[x] * p != m[y] * pyx)
                        throw StructureError("chain is not reversible: detailed balance fails");
                }
            c.reversible = true;
            c.stationary.resize(n);
            for (int v = 0; v < n; ++v) c.stationary[v] = m[v] / total;
        }
        return c;
    }

    /// Sub-stochastic restriction of the simple walk on a blow-up to the set
    /// of vertices within the given ball; transition denominators keep the
    /// full-graph degrees, so return probabilities inside the ball are exact.
    /// Returns the chain plus the map from chain ids to blow-up ids.
    static std::pair<FiniteChain, std::vector<int32_t>> blowup_ball(
        const BlowupGraph& b, const CellGraph& cell, const std::vector<int>& centers, int radius) {
        auto adj = b.adjacency(cell);
        std::vector<int> dist(b.n_vertices, -1);
        std::queue<int> q;
        for (int c0 : centers) {
            dist[c0] = 0;
            q.push(c0);
        }
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            if (dist[v] == radius) continue;
            for (int w : adj[v])
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
        }
        std::vector<int32_t> ids;
        std::vector<int32_t> back(b.n_vertices, -1);
        for (int v = 0; v < b.n_vertices; ++v)
            if (dist[v] >= 0) {
                back[v] = static_cast<int32_t>(ids.size());
                ids.push_back(v);
            }
        int m = static_cast<int>(ids.size());
        std::vector<std::vector<std::pair<int, Rat>>> in_edges(m);
        for (int i = 0; i < m; ++i) {
            int v = ids[i];
            Rat p = Rat(1) / Rat(static_cast<long>(adj[v].size()));
            for (int w : adj[v])
                if (back[w] >= 0) in_edges[back[w]].emplace_back(i, p);
        }
        FiniteChain c = from_in_edges(m, std::move(in_edges), std::vector<char>(m, 0));
        return {std::move(c), std::move(ids)};
    }
};

enum class PowerMode { Exact, Float };

/// Iterated transition applications from the indicator of x: returns the full
/// history p^(k)(x, .) for k = 0..n. Exact mode throws when the table exceeds
/// the entry cap.
inline std::vector<std::vector<Rat>> matrix_power_probabilities(
    const FiniteChain& c, int x, int n, size_t memory_cap_entries = 40'000'000) {
    if (static_cast<size_t>(n + 1) * c.n > memory_cap_entries)
        throw NumericError("matrix power history exceeds the memory cap");
    std::vector<std::vector<Rat>> hist;
    hist.reserve(n + 1);
    std::vector<Rat> v(c.n, Rat(0));
    v[x] = 1;
    hist.push_back(v);
    for (int k = 1; k <= n; ++k) {
        std::vector<Rat> next(c.n, Rat(0));
        for (int y = 0; y < c.n; ++y) {
            Rat acc(0);
            for (int e = c.in_offsets[y]; e < c.in_offsets[y + 1]; ++e) {
                const Rat& vx = v[c.in_src[e]];
                if (vx != 0) acc += vx * c.in_q[e];
            }
            next[y] = acc;
        }
        v = std::move(next);
        hist.push_back(v);
    }
    return hist;
}

/// Float-mode power iteration reading only the listed target vertices;
/// deterministic for any thread count (gather form, fixed per-row order).
inline std::vector<std::vector<double>> matrix_power_targets(const FiniteChain& c, int x, int n,
                                                             const std::vector<int>& targets,
                                                             int threads = 1) {
    std::vector<double> v(c.n, 0.0), next(c.n, 0.0);
    v[x] = 1.0;
    std::vector<std::vector<double>> out(targets.size(), std::vector<double>(n + 1, 0.0));
    for (size_t t = 0; t < targets.size(); ++t) out[t][0] = v[targets[t]];
    auto sweep = [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            double acc = 0.0;
            for (int e = c.in_offsets[y]; e < c.in_offsets[y + 1]; ++e)
                acc += v[c.in_src[e]] * c.in_q_d[e];
            next[y] = acc;
        }
    };
    for (int k = 1; k <= n; ++k) {
        if (threads <= 1) {
            sweep(0, c.n);
        } else {
            std::vector<std::thread> pool;
            int chunk = (c.n + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                int y0 = t * chunk, y1 = std::min(c.n, y0 + chunk);
                if (y0 < y1) pool.emplace_back(sweep, y0, y1);
            }
            for (auto& th : pool) th.join();
        }
        std::swap(v, next);
        for (size_t t = 0; t < targets.size(); ++t) out[t][k] = v[targets[t]];
    }
    return out;
}

// ---------- Monte Carlo absorbed walks on a cell graph ----------

struct FirstHitStats {
    long trials = 0;
    std::map<int, long> hit_time_counts;       // first hitting time of B \ {v}
    std::map<int, long> return_count_counts;   // visits to v before that, start included
    double mean_hit_time = 0.0, se_hit_time = 0.0;
    double mean_returns = 0.0, se_returns = 0.0;

    double pmf(int t) const {
        auto it = hit_time_counts.find(t);
        return it == hit_time_counts.end() ? 0.0 : static_cast<double>(it->second) / trials;
    }
    double pmf_se(int t) const {
        double p = pmf(t);
        return std::sqrt(p * (1 - p) / trials);
    }
};

/// Deterministic-seed Monte Carlo of the absorbed walk from a boundary vertex.
/// Shards split the trial range; the merged result is independent of the
/// shard count.
inline FirstHitStats monte_carlo_first_hit(const CellGraph& g, int v, long trials, uint64_t seed,
                                           int threads = 1) {
    if (!g.is_boundary(v)) throw StructureError("start vertex must be a boundary vertex");
    std::vector<char> target(g.n, 0);
    for (int b : g.boundary)
        if (b != v) target[b] = 1;

    constexpr int kStepBits = 24;
    auto run_range = [&](long lo, long hi, FirstHitStats& st) {
        CounterRng rng{seed};
        for (long trial = lo; trial < hi; ++trial) {
            int pos = v;
            int steps = 0;
            int visits = 1; // the start counts as the first visit
            while (!target[pos]) {
                uint64_t counter = (static_cast<uint64_t>(trial) << kStepBits) |
                                   static_cast<uint64_t>(steps & ((1 << kStepBits) - 1));
                if (steps >= (1 << kStepBits))
                    throw NumericError("walk exceeded the step budget");
                const auto& nb = g.adj[pos];
                pos = nb[rng.bounded(counter, static_cast<uint32_t>(nb.size()))];
                ++steps;
                if (pos == v) ++visits;
            }
            ++st.hit_time_counts[steps];
            ++st.return_count_counts[visits];
        }
        st.trials += hi - lo;
    };

    FirstHitStats total;
    if (threads <= 1) {
        run_range(0, trials, total);
    } else {
        std::vector<FirstHitStats> parts(threads);
        std::vector<std::thread> pool;
        long chunk = (trials + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            long lo = t * chunk, hi = std::min(trials, lo + chunk);
            if (lo < hi) pool.emplace_back(run_range, lo, hi, std::ref(parts[t]));
        }
        for (auto& th : pool) th.join();
        for (const auto& p : parts) {
            total.trials += p.trials;
            for (auto [k, c] : p.hit_time_counts) total.hit_time_counts[k] += c;
            for (auto [k, c] : p.return_count_counts) total.return_count_counts[k] += c;
        }
    }

    auto moments = [&](const std::map<int, long>& counts, double& mean, double& se) {
        double s = 0, s2 = 0;
        for (auto [k, c] : counts) {
            s += static_cast<double>(k) * c;
            s2 += static_cast<double>(k) * k * c;
        }
        mean = s / total.trials;
        double var = s2 / total.trials - mean * mean;
        se = std::sqrt(var / total.trials);
    };
    moments(total.hit_time_counts, total.mean_hit_time, total.se_hit_time);
    moments(total.return_count_counts, total.mean_returns, total.se_returns);
    return total;
}

// ---------- geodesic product bound ----------

struct GeodesicBound {
    int distance = 0;
    Rat lhs;     // q^(n)(x,y) * q^(n)(y,x)
    Rat bound;   // 4^(1-n)
    bool equality = false;
};

/// q^(n)(x,y) q^(n)(y,x) <= 4^(1-n) for reversible nearest-neighbour chains
/// at distance n, exactly; the bound is attained iff the chain projects onto
/// the simple walk on the line of length n.
inline GeodesicBound geodesic_bound_check(const FiniteChain& c, int x, int y) {
    if (!c.reversible) throw StructureError("geodesic bound needs a reversible chain");
    // BFS over edges with positive probability
    std::vector<int> dist(c.n, -1);
    std::queue<int> q;
    dist[x] = 0;
    q.push(x);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e = c.in_offsets[v]; e < c.in_offsets[v + 1]; ++e) {
            int w = c.in_src[e]; // reversible: in-neighbours are out-neighbours
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
        }
    }
    if (dist[y] < 0) throw StructureError("vertices are not connected");
    GeodesicBound gb;
    gb.distance = dist[y];
    if (gb.distance < 1) throw StructureError("geodesic bound needs distinct vertices");
    auto hx = matrix_power_probabilities(c, x, gb.distance);
    auto hy = matrix_power_probabilities(c, y, gb.distance);
    gb.lhs = hx[gb.distance][y] * hy[gb.distance][x];
    gb.bound = rat_pow(rat(1, 4), static_cast<unsigned long>(gb.distance - 1));
    gb.equality = (gb.lhs == gb.bound);
    return gb;
}

} // namespace selfsim
