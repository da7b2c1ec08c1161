#pragma once

#include <thread>
#include <vector>

#include "selfsim/bigfloat.hpp"
#include "selfsim/dynamics.hpp"
#include "selfsim/walkfn.hpp"

namespace selfsim {

// ---------- truncated power series helpers (double or Real coefficients) ----------

namespace series_ops {

template <typename T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b, size_t n, const T& zero) {
    std::vector<T> r(n + 1, zero);
    for (size_t i = 0; i < a.size() && i <= n; ++i) {
        if (a[i] == zero) continue;
        size_t jmax = std::min(b.size() - 1, n - i);
        for (size_t j = 0; j <= jmax; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

template <typename T>
std::vector<T> div(const std::vector<T>& a, const std::vector<T>& b, size_t n, const T& zero) {
    std::vector<T> r(n + 1, zero);
    for (size_t k = 0; k <= n; ++k) {
        T acc = k < a.size() ? a[k] : zero;
        size_t jmax = std::min(b.size() - 1, k);
        for (size_t j = 1; j <= jmax; ++j) acc -= b[j] * r[k - j];
        r[k] = acc / b[0];
    }
    return r;
}

/// substitute the series w into a rational polynomial by Horner
template <typename T, typename Conv>
std::vector<T> poly_at_series(const Poly& p, const std::vector<T>& w, size_t n, const T& zero,
                              Conv to_t) {
    std::vector<T> acc(1, zero);
    for (size_t i = p.coeffs().size(); i-- > 0;) {
        acc = mul(acc, w, n, zero);
        if (acc.empty()) acc.assign(1, zero);
        acc[0] += to_t(p.coeffs()[i]);
    }
    if (acc.size() < n + 1) acc.resize(n + 1, zero);
    return acc;
}

template <typename T, typename Conv>
std::vector<T> ratfunc_at_series(const RatFunc& f, const std::vector<T>& w, size_t n,
                                 const T& zero, Conv to_t) {
    std::vector<T> num = poly_at_series(f.num(), w, n, zero, to_t);
    std::vector<T> den = poly_at_series(f.den(), w, n, zero, to_t);
    return div(num, den, n, zero);
}

} // namespace series_ops

// ---------- Green series at the origin ----------

struct GreenSeries {
    std::vector<Rat> exact;      // exact mode only
    std::vector<double> values;  // filled in both modes
    bool bipartite = false;
    double forward_error = 0.0;  // float-mode coefficient error bound
};

enum class CoeffMode { Exact, Float };

namespace detail {

inline RatFunc negate_argument(const RatFunc& f) {
    auto flip = [](const Poly& p) {
        std::vector<Rat> c = p.coeffs();
        for (size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
        return Poly(std::move(c));
    };
    return RatFunc(flip(f.num()), flip(f.den()));
}

/// bipartite walk detection from the functions alone: d odd or even, f even
inline bool parity_is_bipartite(const WalkFunctions& wf) {
    RatFunc dneg = negate_argument(wf.transition);
    bool d_sym = (dneg == wf.transition) || (dneg == -wf.transition);
    return d_sym && negate_argument(wf.return_fn) == wf.return_fn;
}

/// Exact extraction from G = f * (G o d): the coefficient of order n on the
/// right depends only on coefficients of order <= n/s with s = ord_0(d) >= 2,
/// so the recursion is well founded once g_0 = 1 is fixed.
inline std::vector<Rat> coefficients_exact(const WalkFunctions& wf, size_t n) {
    const long s = wf.transition.vanishing_order();
    if (s < 2) throw TheoremViolation("transition function must vanish to order >= 2");
    std::vector<Rat> dser = wf.transition.series(n);
    std::vector<Rat> fser = wf.return_fn.series(n);
    std::vector<Rat> g(n + 1, Rat(0));
    g[0] = 1;
    // composite = sum_k g_k * dser^k, folded in as the g_k become available
    std::vector<Rat> composite(n + 1, Rat(0));
    composite[0] = 1;
    std::vector<Rat> power(n + 1, Rat(0)); // dser^folded
    power[0] = 1;
    size_t folded = 0;
    const Rat zero(0);
    for (size_t m = 1; m <= n; ++m) {
        size_t want = m / static_cast<size_t>(s);
        while (folded < want) {
            power = series_ops::mul(power, dser, n, zero);
            ++folded;
            if (g[folded] != 0) {
                for (size_t i = 0; i <= n; ++i)
                    if (power[i] != 0) composite[i] += g[folded] * power[i];
            }
        }
        Rat acc(0);
        for (size_t j = 0; j <= m; ++j)
            if (fser[j] != 0) acc += fser[j] * composite[m - j];
        g[m] = acc;
    }
    return g;
}

/// Float extraction through the convergent product representation: modulo
/// z^(n+1) only the first O(log n) factors of prod_k f(d^k) differ from 1.
template <typename T, typename Conv>
std::vector<T> coefficients_product(const WalkFunctions& wf, size_t n, const T& zero, Conv to_t) {
    const long s = wf.transition.vanishing_order();
    std::vector<T> total = series_ops::ratfunc_at_series(
        wf.return_fn, std::vector<T>{zero, zero + to_t(rat(1))}, n, zero, to_t);
    std::vector<T> w = series_ops::ratfunc_at_series(
        wf.transition, std::vector<T>{zero, zero + to_t(rat(1))}, n, zero, to_t);
    // f(d^k) - 1 vanishes to order 2 s^k
    for (double reach = 2.0 * s; reach <= static_cast<double>(n);
         reach *= static_cast<double>(s)) {
        std::vector<T> fk = series_ops::ratfunc_at_series(wf.return_fn, w, n, zero, to_t);
        total = series_ops::mul(total, fk, n, zero);
        if (reach * s > static_cast<double>(n)) break;
        w = series_ops::ratfunc_at_series(wf.transition, w, n, zero, to_t);
    }
    return total;
}

} // namespace detail

/// Return-probability coefficients p^(n)(o,o) of the origin Green function.
inline GreenSeries green_coefficients(const WalkFunctions& wf, size_t n, CoeffMode mode,
                                      mpfr_prec_t float_precision = 53) {
    GreenSeries out;
    out.bipartite = detail::parity_is_bipartite(wf);
    if (mode == CoeffMode::Exact) {
        out.exact = detail::coefficients_exact(wf, n);
        out.values.reserve(n + 1);
        for (const Rat& c : out.exact) out.values.push_back(mpq_get_d(c.get_mpq_t()));
        return out;
    }
    const long s = wf.transition.vanishing_order();
    double levels = 1;
    for (double reach = 2.0 * s; reach <= static_cast<double>(n); reach *= s) ++levels;
    if (float_precision <= 53) {
        auto vals = detail::coefficients_product<double>(wf, n, 0.0,
                                                         [](const Rat& r) { return mpq_get_d(r.get_mpq_t()); });
        out.values = std::move(vals);
        // probability-series convolutions keep l1 norms at 1, so each of the
        // O(levels * deg) multiplications contributes at most ~n ulps
        double ops_per_level = 2.0 * (wf.transition.num().degree() + wf.transition.den().degree() +
                                      wf.return_fn.num().degree() + wf.return_fn.den().degree() + 2);
        out.forward_error = std::ldexp(static_cast<double>(n + 1) * ops_per_level * levels, -52);
    } else {
        Real zero(0.0, float_precision);
        auto vals = detail::coefficients_product<Real>(
            wf, n, zero, [&](const Rat& r) { return Real(r, float_precision); });
        out.values.reserve(vals.size());
        for (const Real& v : vals) out.values.push_back(v.to_double());
        double ops_per_level = 2.0 * (wf.transition.num().degree() + wf.transition.den().degree() +
                                      wf.return_fn.num().degree() + wf.return_fn.den().degree() + 2);
        out.forward_error = std::ldexp(static_cast<double>(n + 1) * ops_per_level * levels,
                                       -static_cast<int>(float_precision) + 1);
    }
    if (out.forward_error > 1e-3)
        throw NumericError("float coefficient precision exhausted at this order");
    return out;
}

// ---------- Green function values through the infinite product ----------

struct GreenValue {
    Cplx value;
    double error_bound = 0.0;
    int factors = 0;
};

/// G(z) = prod_k f(d^k(z)) on the Fatou basin; the orbit must pass |w| < 1/2
/// within the step cap and stay clear of the poles of f.
inline GreenValue green_product(const WalkFunctions& wf, const Cplx& z, mpfr_prec_t prec,
                                int step_cap = 4096) {
    const mpfr_prec_t wp = prec + kEvalGuardBits;
    Cplx w(Real::with_prec(wp, z.re), Real::with_prec(wp, z.im));
    Cplx prod = Cplx::from_real(Real(1.0, wp));
    Real one(1.0, wp);
    Real half(0.5, wp);
    Real tol = pow2(-static_cast<long>(prec) - 2, wp);
    GreenValue out;
    bool contracted = false;
    // a partial product this large cannot arise in the validated range; the
    // point is on the singular set as far as the working precision can tell
    Real divergence_cap = pow2(100, wp);
    for (int k = 0; k < step_cap; ++k) {
        Cplx fw;
        try {
            fw = eval_complex(wf.return_fn, w, wp);
        } catch (const NumericError&) {
            throw NumericError("green function product passed near a pole of the return function");
        }
        prod = prod * fw;
        ++out.factors;
        if (abs(prod) > divergence_cap)
            throw NumericError("green function product diverges: the point is outside the "
                               "resolvable Fatou region");
        Real gap = abs(fw - Cplx::from_real(one));
        if (abs(w) < half && gap < tol) {
            // |f(d^j w) - 1| decays at least geometrically once |w| < 1/2
            out.value = prod;
            out.error_bound = 2.0 * gap.to_double() + std::ldexp(4.0 * out.factors,
                                                                 -static_cast<int>(prec));
            contracted = true;
            break;
        }
        w = eval_complex(wf.transition, w, wp);
    }
    if (!contracted)
        throw NumericError("orbit did not reach the contraction region: the point appears to "
                           "lie outside the Fatou basin or in the pole set");
    return out;
}

inline Real green_product_real(const WalkFunctions& wf, const Real& z, mpfr_prec_t prec,
                               int step_cap = 4096) {
    GreenValue gv = green_product(wf, Cplx::from_real(z), prec, step_cap);
    return gv.value.re;
}

// ---------- singular factor decomposition and omega samples ----------

struct SingularDecomposition {
    RatFunc q;                 // (1 - d(z)) / (1 - z), exact; q(1) = tau
    double alpha = 0.0;        // d_s/2 - 1
    double h_minus_radius = 0; // empirically validated inverse-orbit radius
    mpfr_prec_t precision = 128;
};

inline SingularDecomposition singular_decomposition(const WalkFunctions& wf,
                                                    const ScalingParams& sp,
                                                    mpfr_prec_t prec = 128) {
    SingularDecomposition sd;
    RatFunc one = RatFunc::constant(rat(1));
    RatFunc denom(Poly({rat(1), rat(-1)}), Poly::constant(rat(1)));
    sd.q = (one - wf.transition) / denom;
    if (sd.q.eval(rat(1)) != sp.tau)
        throw TheoremViolation("q(1) must equal the time scaling factor");
    sd.alpha = sp.alpha;
    sd.precision = prec;
    // largest dyadic radius at which the validated local inverse contracts
    double r = 0.5;
    for (; r > 1e-12; r /= 2) {
        try {
            Real z(1.0 - r, prec);
            local_inverse_near_one_real(wf.transition, z, prec);
            break;
        } catch (const NumericError&) {
        }
    }
    sd.h_minus_radius = r;
    return sd;
}

struct OmegaProfile {
    int samples = 0;       // M
    int shift = 0;         // T
    mpfr_prec_t precision = 256;
    std::vector<Real> omega;       // omega(-(T + j/M)), j = 0..M-1
    std::vector<double> omega_d;   // double view
    double sample_error = 0.0;     // empirical period-defect estimate
    double tau_d = 0.0;
    bool bipartite = false;
};

namespace detail {

/// H(z_t) = H^-(z_t) G(z_t) (1-z_t)^(-alpha) at z_t = 1 - tau^(-t);
/// H^- runs the inverse orbit back toward 1 until eps0 = 2^(-prec/2), then
/// applies the first-order geometric tail correction.
inline Real h_sample(const WalkFunctions& wf, const ScalingParams& sp, const RatFunc& q,
                     const Real& alpha, const Real& ln_tau, const Real& t, mpfr_prec_t prec,
                     const Real& tail_slope) {
    const mpfr_prec_t wp = prec + kEvalGuardBits;
    Real x = exp(-(t * ln_tau));
    Real z = Real(1.0, wp) - x;
    Real g = green_product_real(wf, z, prec);
    Real one(1.0, wp);
    Real eps0 = pow2(-static_cast<long>(prec) / 2, wp);
    Real hminus(1.0, wp);
    Real w = z;
    bool reached = false;
    for (int guard = 0; guard < 4 * static_cast<int>(prec) && !reached; ++guard) {
        w = local_inverse_near_one_real(wf.transition, w, prec);
        hminus = hminus * eval_real(wf.return_fn, w) * pow(eval_real(q, w), alpha);
        reached = abs(w - one) < eps0;
    }
    if (!reached) throw NumericError("inverse orbit did not reach the truncation cutoff");
    Real tau_r(sp.tau, wp);
    Real tail = tail_slope * (w - one) / (tau_r - one);
    hminus = hminus * exp(tail);
    return hminus * g * exp(alpha * t * ln_tau);
}

} // namespace detail

/// Omega samples over one period: omega(-(T + j/M)) = H(z_(T+j/M)) + O(tau^-T).
/// The error is estimated empirically from the defect against the next period.
/// Samples are independent; threading changes nothing but the wall clock.
inline OmegaProfile h_and_omega(const WalkFunctions& wf, const ScalingParams& sp, int samples,
                                int shift, mpfr_prec_t prec = 256, int threads = 1) {
    if (sp.beta != 1)
        throw StructureError("asymptotics require bounded geometry (branching number 1)");
    // the inverse-orbit truncation floor 2^(-prec/2) must resolve tau^(-T),
    // otherwise the requested shift is unreachable at this precision
    if (shift * std::log(mpq_get_d(sp.tau.get_mpq_t())) >=
        0.5 * static_cast<double>(prec) * std::log(2.0))
        throw NumericError("period shift too deep for the working precision");
    const mpfr_prec_t wp = prec + kEvalGuardBits;
    OmegaProfile prof;
    prof.samples = samples;
    prof.shift = shift;
    prof.precision = prec;
    prof.bipartite = detail::parity_is_bipartite(wf);
    prof.tau_d = mpq_get_d(sp.tau.get_mpq_t());

    SingularDecomposition sd = singular_decomposition(wf, sp, prec);
    Real ln_tau = log(Real(sp.tau, wp));
    Real ln_mu = log(Real(static_cast<long>(sp.mu), wp));
    Real alpha = ln_mu / ln_tau - Real(1.0, wp);
    // first-order log-slope of f(w) q(w)^alpha at w = 1
    Rat fp1 = wf.return_fn.derivative().eval(rat(1));
    Rat qp1 = sd.q.derivative().eval(rat(1));
    Real tail_slope = Real(fp1 / (Rat(sp.beta) * sp.rho), wp) +
                      alpha * Real(qp1 / sp.tau, wp);

    prof.omega.assign(samples, Real(wp));
    auto run_range = [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j) {
            Real t = Real(static_cast<long>(shift), wp) +
                     Real(static_cast<long>(j), wp) / Real(static_cast<long>(samples), wp);
            prof.omega[j] = detail::h_sample(wf, sp, sd.q, alpha, ln_tau, t, prec, tail_slope);
        }
    };
    if (threads <= 1) {
        run_range(0, samples);
    } else {
        std::vector<std::thread> pool;
        int chunk = (samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            int lo = t * chunk, hi = std::min(samples, lo + chunk);
            if (lo < hi) pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    prof.omega_d.reserve(samples);
    for (const Real& v : prof.omega) prof.omega_d.push_back(v.to_double());

    // period defect at a few probe phases measures the O(tau^-T) error
    double defect = 0.0;
    for (int j : {0, samples / 4, samples / 2, (3 * samples) / 4}) {
        Real t = Real(static_cast<long>(shift + 1), wp) +
                 Real(static_cast<long>(j), wp) / Real(static_cast<long>(samples), wp);
        Real next = detail::h_sample(wf, sp, sd.q, alpha, ln_tau, t, prec, tail_slope);
        defect = std::max(defect, std::abs((next - prof.omega[j]).to_double()));
    }
    double tau_d = prof.tau_d;
    prof.sample_error = defect * tau_d / (tau_d - 1.0) * 1.5 +
                        std::ldexp(1.0, -static_cast<int>(prec) / 2 + 4);
    return prof;
}

} // namespace selfsim
