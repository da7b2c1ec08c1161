#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "selfsim/bigfloat.hpp"
#include "selfsim/ratfunc.hpp"

namespace selfsim {

// ---------- Sturm sequences and real root isolation ----------

namespace sturm {

inline std::vector<Poly> chain(const Poly& p) {
    Poly g = poly_gcd(p, p.derivative());
    Poly p0 = g.degree() > 0 ? Poly::div_exact(p, g) : p;
    std::vector<Poly> out = {p0, p0.derivative()};
    while (!out.back().is_zero() && out.back().degree() > 0) {
        auto [q, r] = Poly::divmod(out[out.size() - 2], out.back());
        (void)q;
        if (r.is_zero()) break;
        out.push_back(-r);
    }
    return out;
}

inline int sign_at(const Poly& p, const Rat& x) { return sgn(p.eval(x)); }

inline int sign_at_pos_inf(const Poly& p) {
    return p.is_zero() ? 0 : sgn(p.coeffs().back());
}

inline int variations(const std::vector<Poly>& ch, const std::optional<Rat>& x) {
    int count = 0, prev = 0;
    for (const Poly& p : ch) {
        int s = x.has_value() ? sign_at(p, *x) : sign_at_pos_inf(p);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

/// number of distinct real roots in (a, b]; b = nullopt means +infinity
inline int count_roots(const std::vector<Poly>& ch, const Rat& a, const std::optional<Rat>& b) {
    return variations(ch, a) - variations(ch, b);
}

/// Cauchy bound: all real roots lie in [-B, B]
inline Rat root_bound(const Poly& p) {
    Rat lead = rat_abs(p.coeffs().back());
    Rat maxc(0);
    for (const Rat& c : p.coeffs()) maxc = std::max(maxc, rat_abs(c));
    return Rat(1) + maxc / lead;
}

/// simplest rational in [lo, hi] by continued-fraction descent
inline Rat simplest_rational_between(const Rat& lo, const Rat& hi) {
    if (lo > hi) throw InternalError("empty interval");
    if (lo <= 0 && hi >= 0) return Rat(0);
    if (hi < 0) return -simplest_rational_between(-hi, -lo);
    // 0 < lo <= hi
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
    Rat flr(fl);
    if (lo == flr) return lo;
    if (flr + 1 <= hi) return flr + 1;
    Rat frac = simplest_rational_between(Rat(1) / (hi - flr), Rat(1) / (lo - flr));
    return flr + Rat(1) / frac;
}

struct RootEnclosure {
    std::optional<Rat> exact; // set when the root is rational
    Rat lo, hi;               // sign-definite bracket otherwise (lo < root < hi)
};

/// Isolate all real roots of p in the open interval (left, +infinity).
/// Interval endpoints are kept off the roots, so every non-exact enclosure is
/// a sign-definite bracket of the squarefree part.
inline std::vector<RootEnclosure> isolate_roots_above(const Poly& p, const Rat& left) {
    std::vector<RootEnclosure> out;
    if (p.degree() <= 0) return out;
    Poly g = poly_gcd(p, p.derivative());
    Poly sf = g.degree() > 0 ? Poly::div_exact(p, g) : p;
    std::vector<Poly> ch = chain(sf);
    Rat right = root_bound(sf) + 1;
    if (right <= left) return out;
    // nudge the left end so no root sits on it (roots at `left` are excluded)
    Rat lo = left;
    if (sf.eval(lo) == 0) {
        Rat eps = (right - left) / 2;
        while (count_roots(ch, left, left + eps) > 0) eps = eps / 2;
        lo = left + eps;
    }
    struct Seg {
        Rat a, b;
        int count;
    };
    std::vector<Seg> work;
    int total = count_roots(ch, lo, right);
    if (total == 0) return out;
    work.push_back({lo, right, total});
    while (!work.empty()) {
        Seg s = work.back();
        work.pop_back();
        if (s.count == 0) continue;
        if (s.count == 1) {
            Rat a = s.a, b = s.b;
            std::optional<Rat> exact;
            for (int it = 0; it < 12 && !exact; ++it) {
                Rat cand = simplest_rational_between(a, b);
                if (sf.eval(cand) == 0) {
                    exact = cand;
                    break;
                }
                Rat mid = (a + b) / 2;
                if (sf.eval(mid) == 0) {
                    exact = mid;
                    break;
                }
                if (count_roots(ch, a, mid) == 1)
                    b = mid;
                else
                    a = mid;
            }
            if (exact)
                out.push_back({*exact, *exact, *exact});
            else
                out.push_back({std::nullopt, a, b});
            continue;
        }
        // split at a non-root point
        Rat split = (s.a + s.b) / 2;
        long denom = 3;
        while (sf.eval(split) == 0) {
            split = s.a + (s.b - s.a) / Rat(denom);
            denom += 2;
        }
        int left_count = count_roots(ch, s.a, split);
        work.push_back({s.a, split, left_count});
        work.push_back({split, s.b, s.count - left_count});
    }
    std::sort(out.begin(), out.end(),
              [](const RootEnclosure& x, const RootEnclosure& y) { return x.lo < y.lo; });
    return out;
}

/// bisect a sign-definite bracket down to the requested width exponent
inline Real refine_to_real(const Poly& sf, const RootEnclosure& e, mpfr_prec_t prec) {
    if (e.exact) return Real(*e.exact, prec);
    Rat a = e.lo, b = e.hi;
    int sa = sgn(sf.eval(a));
    for (int it = 0; it < static_cast<int>(prec) + 8; ++it) {
        Rat mid = (a + b) / 2;
        int sm = sgn(sf.eval(mid));
        if (sm == 0) return Real(mid, prec);
        if (sm == sa)
            a = mid;
        else
            b = mid;
    }
    return Real((a + b) / 2, prec);
}

} // namespace sturm

// ---------- fixed point diagnostics ----------

struct FixedPointReport {
    long vanishing_order = 0; // order of d at z=0
    Rat tau;                  // d'(1)
};

/// Asserts the super-attracting fixed point at 0 and the repelling fixed
/// point at 1; failure means the function did not come from a valid cell.
inline FixedPointReport fixed_point_report(const RatFunc& d) {
    FixedPointReport rep;
    if (d.is_zero() || d.den().coeff(0) == 0)
        throw TheoremViolation("transition function must be finite and zero at the origin");
    rep.vanishing_order = d.vanishing_order();
    if (rep.vanishing_order < 2)
        throw TheoremViolation("transition function must vanish to order >= 2 at 0 (got order " +
                               std::to_string(rep.vanishing_order) + ")");
    if (d.eval(rat(1)) != 1) throw TheoremViolation("transition function must fix z = 1");
    rep.tau = d.derivative().eval(rat(1));
    if (!(rep.tau > 1)) throw TheoremViolation("z = 1 must be repelling: d'(1) = " +
                                               rat_to_string(rep.tau));
    return rep;
}

// ---------- local inverse near z = 1 ----------

/// Newton solve of d(w) = z from the linearized seed 1 + (z-1)/tau; validated
/// a posteriori by the residual and the contraction |w-1| < |z-1|.
inline Cplx local_inverse_near_one(const RatFunc& d, const Cplx& z, mpfr_prec_t prec) {
    const mpfr_prec_t wp = prec + kEvalGuardBits;
    Rat tau = d.derivative().eval(rat(1));
    RatFunc dp = d.derivative();
    Cplx one = Cplx::from_real(Real(1.0, wp));
    Cplx zw(Real::with_prec(wp, z.re), Real::with_prec(wp, z.im));
    Cplx offset = zw - one;
    Cplx w = one + offset / Cplx::from_real(Real(tau, wp));
    if (offset.re.is_zero() && offset.im.is_zero()) return w;
    Real tol = pow2(-static_cast<long>(prec) - 4, wp);
    bool converged = false;
    for (int it = 0; it < 80; ++it) {
        Cplx fw = eval_complex(d, w, wp) - zw;
        Cplx step = fw / eval_complex(dp, w, wp);
        w = w - step;
        if (abs(step) < tol * abs(w)) {
            converged = true;
            break;
        }
    }
    Real resid = abs(eval_complex(d, w, wp) - zw);
    if (!converged || !(abs(w - one) < abs(offset)) ||
        !(resid < pow2(-static_cast<long>(prec) + 8, wp) * (abs(zw) + Real(1.0, wp))))
        throw NumericError("local inverse did not converge; point outside the validated region");
    return w;
}

inline Real local_inverse_near_one_real(const RatFunc& d, const Real& z, mpfr_prec_t prec) {
    Cplx w = local_inverse_near_one(d, Cplx::from_real(z), prec);
    return w.re;
}

// ---------- Julia set classification ----------

enum class JuliaKind { Interval, Cantor, Unknown };

struct JuliaWitness {
    Rat z0;
    int steps = 0;   // |d^steps(z0)| < 1
    Rat value;       // d^steps(z0), exactly
};

struct PreimageMarker {
    int level = 1;            // d^level maps the marker to 1
    bool at_infinity = false;
    std::optional<Rat> exact;
    Rat lo, hi;               // rational bracket when not exact / infinite

    Rat lower_bound() const { return exact ? *exact : lo; }
};

struct JuliaVerdict {
    JuliaKind kind = JuliaKind::Unknown;
    std::optional<JuliaWitness> witness;
    std::vector<PreimageMarker> markers;  // certified backward iterates > 1
    std::vector<Real> preimage_chain;     // refined numeric values (finite ones)
    std::string notes;
};

namespace detail {

/// exact forward orbit on the Riemann sphere with step and size caps;
/// returns (steps, value) when the orbit enters |w| < 1
inline std::optional<std::pair<int, Rat>> orbit_enters_unit_disk(const RatFunc& d, const Rat& z0,
                                                                 int max_steps, size_t bit_cap) {
    std::optional<Rat> w = z0;
    for (int steps = 1; steps <= max_steps; ++steps) {
        w = d.eval_projective(w);
        if (w.has_value()) {
            if (rat_abs(*w) < 1) return std::make_pair(steps, *w);
            if (rat_bits(*w) > bit_cap) return std::nullopt;
        }
    }
    return std::nullopt;
}

inline Poly chebyshev_poly(int n) {
    Poly t0 = Poly::constant(rat(1));
    if (n == 0) return t0;
    Poly t1 = Poly::identity();
    Poly twoz({rat(0), rat(2)});
    for (int k = 2; k <= n; ++k) {
        Poly t2 = twoz * t1 - t0;
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    return t1;
}

/// d is the transition function of a line cell iff d(z) * T_n(1/z) = 1 with
/// n the vanishing order
inline bool is_chebyshev_conjugate(const RatFunc& d) {
    long n = d.vanishing_order();
    if (n < 2) return false;
    Poly tn = chebyshev_poly(static_cast<int>(n));
    Poly p; // z^n T_n(1/z)
    for (long k = 0; k <= tn.degree(); ++k)
        p = p + Poly::monomial(tn.coeff(static_cast<size_t>(k)), static_cast<size_t>(n - k));
    RatFunc tn_inv(p, Poly::monomial(rat(1), static_cast<size_t>(n)));
    return d * tn_inv == RatFunc::constant(rat(1));
}

} // namespace detail

struct JuliaOptions {
    int backward_depth = 3;
    int probes_per_gap = 64;
    int orbit_steps = 48;
    size_t orbit_bit_cap = 1 << 16;
    mpfr_prec_t chain_precision = 128;
};

/// Classify the Julia set of a transition function. Interval is certified by
/// the Chebyshev conjugacy (line cells), Cantor by the backward-iterate escape
/// criterion with an exact witness; anything else stays Unknown, which is a
/// legitimate outcome since the criterion is sufficient only.
inline JuliaVerdict julia_classify(const RatFunc& d, const JuliaOptions& opt = {}) {
    fixed_point_report(d);
    JuliaVerdict verdict;

    if (detail::is_chebyshev_conjugate(d)) {
        verdict.kind = JuliaKind::Interval;
        verdict.notes = "transition function of a line cell: the Julia set is the full "
                        "interval [1,-1] through infinity";
        return verdict;
    }

    // Certified real backward iterates of 1, tracked on the whole real line:
    // only those above 1 become gap markers, but preimages of any exact
    // iterate (for instance negative ones) may land above 1 a level later.
    std::set<Rat> visited = {rat(1)};
    std::vector<Rat> exact_level = {rat(1)};
    bool infinity_reached = false;
    for (int level = 1; level <= opt.backward_depth && !exact_level.empty(); ++level) {
        std::vector<Rat> next_exact;
        for (const Rat& target : exact_level) {
            Poly eq = d.num() - target * d.den();
            Poly g = poly_gcd(eq, eq.derivative());
            Poly sf = g.degree() > 0 ? Poly::div_exact(eq, g) : eq;
            Rat whole_line = -(sturm::root_bound(sf) + 2);
            for (const auto& enc : sturm::isolate_roots_above(eq, whole_line)) {
                if (enc.exact) {
                    if (!visited.insert(*enc.exact).second) continue;
                    next_exact.push_back(*enc.exact);
                }
                if (enc.lo > 1) {
                    PreimageMarker m;
                    m.level = level;
                    m.exact = enc.exact;
                    m.lo = enc.lo;
                    m.hi = enc.hi;
                    verdict.markers.push_back(m);
                    verdict.preimage_chain.push_back(
                        sturm::refine_to_real(sf, enc, opt.chain_precision));
                }
            }
            if (!infinity_reached) {
                auto at_inf = d.eval_projective(std::nullopt);
                if (at_inf.has_value() && *at_inf == target) {
                    infinity_reached = true;
                    PreimageMarker m;
                    m.level = level;
                    m.at_infinity = true;
                    verdict.markers.push_back(m);
                }
            }
        }
        exact_level = std::move(next_exact);
    }

    if (verdict.markers.empty()) {
        verdict.notes = "no real backward iterates of 1 above 1 were found to the configured "
                        "depth; the escape criterion does not apply";
        return verdict;
    }

    // probe rationals in (1, marker) and iterate exactly; any orbit entering
    // the unit disk certifies a Cantor Julia set
    std::set<Rat> probes;
    for (const PreimageMarker& m : verdict.markers) {
        if (m.at_infinity) {
            for (int j = 1; j <= opt.probes_per_gap; ++j) probes.insert(Rat(1) + Rat(j));
        } else {
            Rat width = m.lower_bound() - 1;
            if (width <= 0) continue;
            for (int j = 1; j <= opt.probes_per_gap; ++j) {
                Rat z0 = Rat(1) + width * Rat(j) / Rat(opt.probes_per_gap + 1);
                probes.insert(z0);
            }
        }
    }
    for (const Rat& z0 : probes) { // std::set iterates in increasing order
        auto hit = detail::orbit_enters_unit_disk(d, z0, opt.orbit_steps, opt.orbit_bit_cap);
        if (!hit) continue;
        // the witness must sit strictly below a certified marker
        bool below = false;
        for (const PreimageMarker& m : verdict.markers)
            if (m.at_infinity || z0 < m.lower_bound()) {
                below = true;
                break;
            }
        if (!below) continue;
        verdict.kind = JuliaKind::Cantor;
        verdict.witness = JuliaWitness{z0, hit->first, hit->second};
        verdict.notes = "backward iterate of 1 above a Fatou point: the Julia set is "
                        "disconnected, hence a Cantor set";
        return verdict;
    }
    verdict.notes = "backward iterates exist but no probe orbit entered the unit disk; "
                    "the sufficient criterion is inconclusive";
    return verdict;
}

/// Re-verify a Cantor certificate in exact arithmetic.
inline bool verify_julia_witness(const RatFunc& d, const JuliaVerdict& v) {
    if (v.kind != JuliaKind::Cantor || !v.witness) return false;
    const JuliaWitness& w = *v.witness;
    if (!(w.z0 > 1)) return false;
    bool below = false;
    for (const PreimageMarker& m : v.markers) {
        if (m.at_infinity) {
            below = true;
        } else if (w.z0 < m.lower_bound()) {
            // confirm the marker really maps to 1 after `level` steps when exact
            if (m.exact) {
                std::optional<Rat> x = *m.exact;
                for (int i = 0; i < m.level; ++i) x = d.eval_projective(x);
                if (!x || *x != 1) return false;
            }
            below = true;
        }
    }
    if (!below) return false;
    std::optional<Rat> x = w.z0;
    for (int i = 0; i < w.steps; ++i) x = d.eval_projective(x);
    return x.has_value() && *x == w.value && rat_abs(w.value) < 1;
}

} // namespace selfsim
