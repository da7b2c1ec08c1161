#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "selfsim/ratfunc.hpp"

namespace selfsim {

/// Thin RAII wrapper over mpfr_t. Every value carries its own precision;
/// binary operations round to the wider operand's precision.
class Real {
public:
    explicit Real(mpfr_prec_t prec = 128) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(double x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(const Rat& q, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
    Real(long n, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, n, MPFR_RNDN); }

    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    static Real with_prec(mpfr_prec_t prec, const Real& x) {
        Real r(prec);
        mpfr_set(r.v_, x.v_, MPFR_RNDN);
        return r;
    }

#define SELFSIM_REAL_BINOP(op, fn)                                       \
    friend Real operator op(const Real& a, const Real& b) {              \
        Real r(std::max(a.prec(), b.prec()));                            \
        fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                 \
        return r;                                                        \
    }
    SELFSIM_REAL_BINOP(+, mpfr_add)
    SELFSIM_REAL_BINOP(-, mpfr_sub)
    SELFSIM_REAL_BINOP(*, mpfr_mul)
    SELFSIM_REAL_BINOP(/, mpfr_div)
#undef SELFSIM_REAL_BINOP

    Real operator-() const {
        Real r(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }
    Real& operator+=(const Real& o) { return *this = *this + o; }
    Real& operator-=(const Real& o) { return *this = *this - o; }
    Real& operator*=(const Real& o) { return *this = *this * o; }
    Real& operator/=(const Real& o) { return *this = *this / o; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

    friend Real abs(const Real& a) {
        Real r(a.prec());
        mpfr_abs(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real sqrt(const Real& a) {
        Real r(a.prec());
        mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real exp(const Real& a) {
        Real r(a.prec());
        mpfr_exp(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real log(const Real& a) {
        Real r(a.prec());
        mpfr_log(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    /// a^x for a > 0
    friend Real pow(const Real& a, const Real& x) {
        Real r(std::max(a.prec(), x.prec()));
        mpfr_pow(r.v_, a.v_, x.v_, MPFR_RNDN);
        return r;
    }

    std::string to_string(int significant_digits = 17) const {
        char buf[128];
        mpfr_snprintf(buf, sizeof buf, "%.*Rg", significant_digits, v_);
        return std::string(buf);
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

private:
    mpfr_t v_;
};

/// 2^e at the given precision
inline Real pow2(long e, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_si_2exp(r.raw(), 1, e, MPFR_RNDN);
    return r;
}

struct Cplx {
    Real re, im;

    explicit Cplx(mpfr_prec_t prec = 128) : re(prec), im(prec) {}
    Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    static Cplx from_real(const Real& r) { return Cplx(r, Real(0.0, r.prec())); }

    mpfr_prec_t prec() const { return std::max(re.prec(), im.prec()); }

    friend Cplx operator+(const Cplx& a, const Cplx& b) { return {a.re + b.re, a.im + b.im}; }
    friend Cplx operator-(const Cplx& a, const Cplx& b) { return {a.re - b.re, a.im - b.im}; }
    friend Cplx operator*(const Cplx& a, const Cplx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Cplx operator/(const Cplx& a, const Cplx& b) {
        Real d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    Cplx conj() const { return {re, -im}; }
    friend Real abs(const Cplx& a) { return sqrt(a.re * a.re + a.im * a.im); }
};

/// Horner evaluation of a rational polynomial at a complex point.
inline Cplx poly_eval(const Poly& p, const Cplx& z, mpfr_prec_t prec) {
    Cplx acc(prec);
    for (size_t i = p.coeffs().size(); i-- > 0;) {
        acc = acc * z;
        acc.re = acc.re + Real(p.coeffs()[i], prec);
    }
    return acc;
}

inline Real poly_eval(const Poly& p, const Real& z) {
    Real acc(0.0, z.prec());
    for (size_t i = p.coeffs().size(); i-- > 0;) acc = acc * z + Real(p.coeffs()[i], z.prec());
    return acc;
}

// Guard bits used by extended-precision evaluation: Horner on clean data loses
// at most a few ulps per coefficient, so a fixed budget is plenty.
inline constexpr mpfr_prec_t kEvalGuardBits = 32;

/// Evaluate a rational function at a complex point with `precision` result
/// bits; works at precision + guard internally. Throws NumericError when the
/// denominator is too small to trust (pole proximity).
inline Cplx eval_complex(const RatFunc& f, const Cplx& z, mpfr_prec_t precision) {
    mpfr_prec_t wp = precision + kEvalGuardBits;
    Cplx zz(Real::with_prec(wp, z.re), Real::with_prec(wp, z.im));
    Cplx num = poly_eval(f.num(), zz, wp);
    Cplx den = poly_eval(f.den(), zz, wp);
    Real dmag = abs(den);
    // scale threshold by the denominator coefficient size at |z|
    Real zmag = abs(zz);
    Real scale(0.0, wp);
    Real zp(1.0, wp);
    Real one(1.0, wp);
    Real zm = (zmag > one) ? zmag : one;
    for (const auto& c : f.den().coeffs()) {
        scale += Real(rat_abs(c), wp) * zp;
        zp = zp * zm;
    }
    if (dmag.is_zero() || dmag < scale * pow2(-(precision + kEvalGuardBits / 2), wp))
        throw NumericError("rational function evaluation too close to a pole");
    return num / den;
}

inline Real eval_real(const RatFunc& f, const Real& z) {
    Real num = poly_eval(f.num(), z);
    Real den = poly_eval(f.den(), z);
    if (den.is_zero()) throw NumericError("rational function evaluation at a pole");
    return num / den;
}

} // namespace selfsim
