#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "selfsim/rational.hpp"

namespace selfsim {

/// Univariate polynomial over the rationals, coefficients stored lowest degree
/// first. The zero polynomial has an empty coefficient vector; otherwise the
/// highest coefficient is nonzero.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
    static Poly constant(const Rat& a) { return Poly(std::vector<Rat>{a}); }
    static Poly identity() { return Poly({Rat(0), Rat(1)}); } // the monomial z
    static Poly monomial(const Rat& a, size_t k) {
        std::vector<Rat> c(k + 1, Rat(0));
        c[k] = a;
        return Poly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    // degree of the zero polynomial is -1 by convention
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    const std::vector<Rat>& coeffs() const { return c_; }
    Rat coeff(size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }

    // order of vanishing at z=0; -1 for the zero polynomial
    long valuation() const {
        for (size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != 0) return static_cast<long>(i);
        return -1;
    }

    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly operator-() const {
        std::vector<Rat> r(c_);
        for (auto& x : r) x = -x;
        return Poly(std::move(r));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Rat> r(std::max(a.c_.size(), b.c_.size()), Rat(0));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<Rat> r(a.c_.size() + b.c_.size() - 1, Rat(0));
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(r));
    }

    friend Poly operator*(const Rat& s, const Poly& a) {
        if (s == 0) return Poly();
        std::vector<Rat> r(a.c_);
        for (auto& x : r) x *= s;
        return Poly(std::move(r));
    }

    Rat eval(const Rat& z) const {
        Rat acc(0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<Rat> r(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = Rat(static_cast<long>(i)) * c_[i];
        return Poly(std::move(r));
    }

    // substitute b for z
    Poly compose(const Poly& b) const {
        Poly acc;
        for (size_t i = c_.size(); i-- > 0;) acc = acc * b + Poly::constant(c_[i]);
        return acc;
    }

    // Euclidean division; denominator leading coefficient must be nonzero.
    static std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw InternalError("polynomial division by zero");
        std::vector<Rat> rem(a.c_);
        long db = b.degree();
        const Rat lead = b.c_.back();
        std::vector<Rat> quo;
        long dr = static_cast<long>(rem.size()) - 1;
        if (dr >= db) quo.assign(dr - db + 1, Rat(0));
        while (dr >= db) {
            while (dr >= 0 && rem[dr] == 0) --dr;
            if (dr < db) break;
            Rat q = rem[dr] / lead;
            quo[dr - db] = q;
            for (long i = 0; i <= db; ++i) rem[dr - db + i] -= q * b.c_[i];
            --dr;
        }
        return {Poly(std::move(quo)), Poly(std::move(rem))};
    }

    /// Exact division, throws if the remainder is nonzero.
    static Poly div_exact(const Poly& a, const Poly& b) {
        auto [q, r] = divmod(a, b);
        if (!r.is_zero()) throw InternalError("inexact polynomial division");
        return q;
    }

    // First n+1 Taylor coefficients of the reciprocal; constant term must be nonzero.
    std::vector<Rat> series_inverse(size_t n) const {
        if (is_zero() || c_[0] == 0) throw NumericError("series inverse: pole at origin");
        std::vector<Rat> r(n + 1, Rat(0));
        r[0] = Rat(1) / c_[0];
        for (size_t k = 1; k <= n; ++k) {
            Rat acc(0);
            for (size_t j = 1; j <= k && j < c_.size(); ++j) acc += c_[j] * r[k - j];
            r[k] = -acc / c_[0];
        }
        return r;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rat> c_;
};

namespace detail {

// Integer polynomial helpers for the subresultant gcd.
using ZPoly = std::vector<BigInt>;

inline void ztrim(ZPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline BigInt zcontent(const ZPoly& p) {
    BigInt g = 0;
    for (const auto& a : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    return g;
}

inline ZPoly zscale(const ZPoly& p, const BigInt& s) {
    ZPoly r(p);
    for (auto& a : r) a *= s;
    return r;
}

inline ZPoly zdiv_exact(const ZPoly& p, const BigInt& s) {
    ZPoly r(p);
    for (auto& a : r) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), s.get_mpz_t());
    return r;
}

// pseudo-remainder: exactly lc(b)^(deg a - deg b + 1) * a mod b
inline ZPoly zprem(ZPoly a, const ZPoly& b) {
    long db = static_cast<long>(b.size()) - 1;
    const BigInt lb = b.back();
    long da = static_cast<long>(a.size()) - 1;
    if (da < db) return a;
    long scale_left = da - db + 1;
    while (true) {
        ztrim(a);
        da = static_cast<long>(a.size()) - 1;
        if (da < db) break;
        BigInt la = a.back();
        for (auto& x : a) x *= lb;
        for (long i = 0; i <= db; ++i) a[da - db + i] -= la * b[i];
        --scale_left;
    }
    while (scale_left-- > 0)
        for (auto& x : a) x *= lb;
    return a;
}

// Primitive integer image of a rational polynomial (content removed).
inline ZPoly primitive_part(const Poly& p) {
    BigInt lcm = 1;
    for (const auto& a : p.coeffs())
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a.get_den().get_mpz_t());
    ZPoly z;
    z.reserve(p.coeffs().size());
    for (const auto& a : p.coeffs()) z.push_back(BigInt(a.get_num() * (lcm / a.get_den())));
    ztrim(z);
    BigInt c = zcontent(z);
    if (c > 1) z = zdiv_exact(z, c);
    if (!z.empty() && z.back() < 0)
        for (auto& x : z) x = -x;
    return z;
}

} // namespace detail

/// Monic gcd via the subresultant pseudo-remainder sequence on primitive
/// integer images; keeps intermediate coefficients from exploding.
inline Poly poly_gcd(const Poly& pa, const Poly& pb) {
    using namespace detail;
    if (pa.is_zero() && pb.is_zero()) return Poly();
    if (pa.is_zero() || pb.is_zero()) {
        const Poly& nz = pa.is_zero() ? pb : pa;
        Rat lead = nz.coeffs().back();
        return (Rat(1) / lead) * nz;
    }
    ZPoly a = primitive_part(pa), b = primitive_part(pb);
    if (a.size() < b.size()) std::swap(a, b);
    auto zpow = [](const BigInt& x, long e) {
        BigInt r;
        mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(e));
        return r;
    };
    // subresultant PRS (Collins); g and h track the divisor chain
    BigInt g = 1, h = 1;
    while (true) {
        long delta = static_cast<long>(a.size()) - static_cast<long>(b.size());
        ZPoly r = zprem(a, b);
        if (r.empty()) break;
        if (r.size() == 1) {
            b = {BigInt(1)};
            break;
        }
        a = b;
        b = zdiv_exact(r, g * zpow(h, delta));
        g = a.back();
        if (delta >= 1) {
            // h <- g^delta / h^(delta-1), exact by the subresultant theory
            BigInt hd = zpow(h, delta - 1);
            h = zpow(g, delta);
            mpz_divexact(h.get_mpz_t(), h.get_mpz_t(), hd.get_mpz_t());
        }
    }
    BigInt c = zcontent(b);
    if (c > 1) b = zdiv_exact(b, c);
    std::vector<Rat> out;
    out.reserve(b.size());
    for (auto& x : b) out.emplace_back(x);
    Poly p(std::move(out));
    Rat lead = p.coeffs().back();
    return (Rat(1) / lead) * p;
}

} // namespace selfsim
