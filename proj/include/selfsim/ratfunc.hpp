#pragma once

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/polynomial.hpp"

namespace selfsim {

/// Reduced ratio of rational polynomials. Canonical form: gcd(num, den) = 1
/// and the lowest nonzero coefficient of the denominator is 1, so equality is
/// plain coefficient comparison and Taylor extraction at z=0 is direct.
class RatFunc {
public:
    RatFunc() : num_(), den_(Poly::constant(Rat(1))) {}
    RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw InternalError("rational function with zero denominator");
        normalize();
    }
    static RatFunc constant(const Rat& a) { return RatFunc(Poly::constant(a), Poly::constant(Rat(1))); }
    static RatFunc identity() { return RatFunc(Poly::identity(), Poly::constant(Rat(1))); }
    static RatFunc from_poly(Poly p) { return RatFunc(std::move(p), Poly::constant(Rat(1))); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    RatFunc operator-() const { return RatFunc((-Rat(1)) * num_, den_, no_normalize{}); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw NumericError("division by the zero function");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend RatFunc operator*(const Rat& s, const RatFunc& a) {
        return RatFunc(s * a.num_, a.den_);
    }

    /// Substitution a(b(z)); throws if the substituted denominator vanishes
    /// identically (can happen when b is constant at a pole of a).
    RatFunc compose(const RatFunc& b) const {
        long d = std::max(num_.degree(), den_.degree());
        if (d < 0) return RatFunc(); // zero function
        // powers of numerator and denominator of b up to d
        std::vector<Poly> np(static_cast<size_t>(d) + 1), dp(static_cast<size_t>(d) + 1);
        np[0] = Poly::constant(Rat(1));
        dp[0] = Poly::constant(Rat(1));
        for (long i = 1; i <= d; ++i) {
            np[i] = np[i - 1] * b.num_;
            dp[i] = dp[i - 1] * b.den_;
        }
        Poly top, bot;
        for (long i = 0; i <= d; ++i) {
            Rat cn = num_.coeff(static_cast<size_t>(i));
            Rat cd = den_.coeff(static_cast<size_t>(i));
            Poly mix = np[i] * dp[d - i];
            if (cn != 0) top = top + cn * mix;
            if (cd != 0) bot = bot + cd * mix;
        }
        if (bot.is_zero()) throw NumericError("composition has identically zero denominator");
        return RatFunc(std::move(top), std::move(bot));
    }

    RatFunc derivative() const {
        return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

    /// Exact value at a rational point; throws NumericError at poles.
    Rat eval(const Rat& z) const {
        Rat d = den_.eval(z);
        if (d == 0) throw NumericError("evaluation at a pole");
        return num_.eval(z) / d;
    }

    bool is_pole(const Rat& z) const { return den_.eval(z) == 0; }

    /// Value on the Riemann sphere: nullopt encodes the point at infinity,
    /// both as input and output. Exact.
    std::optional<Rat> eval_projective(const std::optional<Rat>& z) const {
        if (z.has_value()) {
            Rat dv = den_.eval(*z);
            if (dv == 0) return std::nullopt;
            return num_.eval(*z) / dv;
        }
        long dn = num_.degree(), dd = den_.degree();
        if (dn > dd) return std::nullopt;
        if (dn < dd) return Rat(0);
        return num_.coeffs().back() / den_.coeffs().back();
    }

    /// First n+1 Taylor coefficients at z=0; denominator must not vanish there.
    std::vector<Rat> series(size_t n) const {
        if (den_.coeff(0) == 0) throw NumericError("series expansion at a pole of the function");
        std::vector<Rat> inv = den_.series_inverse(n);
        std::vector<Rat> out(n + 1, Rat(0));
        for (size_t k = 0; k <= n; ++k) {
            Rat acc(0);
            for (size_t j = 0; j <= k; ++j) {
                Rat c = num_.coeff(j);
                if (c != 0) acc += c * inv[k - j];
            }
            out[k] = acc;
        }
        return out;
    }

    /// Order of vanishing at z=0 (0 if value nonzero; valuation of num minus
    /// valuation of den in general).
    long vanishing_order() const {
        if (num_.is_zero()) return -1;
        return num_.valuation() - den_.valuation();
    }

    std::string to_string() const;
    static RatFunc parse(const std::string& text);

private:
    struct no_normalize {};
    RatFunc(Poly num, Poly den, no_normalize) : num_(std::move(num)), den_(std::move(den)) {}

    void normalize() {
        if (num_.is_zero()) {
            den_ = Poly::constant(Rat(1));
            return;
        }
        Poly g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = Poly::div_exact(num_, g);
            den_ = Poly::div_exact(den_, g);
        }
        Rat low = den_.coeff(static_cast<size_t>(den_.valuation()));
        if (low != 1) {
            Rat inv = Rat(1) / low;
            num_ = inv * num_;
            den_ = inv * den_;
        }
    }

    Poly num_;
    Poly den_;
};

enum class RatOp { Add, Sub, Mul, Div, Compose };

inline RatFunc ratfunc_arith(const RatFunc& a, const RatFunc& b, RatOp op) {
    switch (op) {
        case RatOp::Add: return a + b;
        case RatOp::Sub: return a - b;
        case RatOp::Mul: return a * b;
        case RatOp::Div: return a / b;
        case RatOp::Compose: return a.compose(b);
    }
    throw InternalError("unreachable");
}

// ---- text grammar: ((c0 + c1*z + c2*z^2 + ...)/(d0 + d1*z + ...)) ----
// Printed coefficients are integer-normalized: num and den are scaled by the
// common factor that makes every coefficient an integer with overall content 1
// and the denominator's lowest nonzero coefficient positive.

namespace detail {

inline std::string zpoly_to_string(const std::vector<BigInt>& c) {
    std::ostringstream os;
    bool first = true;
    for (size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0) continue;
        BigInt a = c[k];
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        if (k == 0) {
            os << a.get_str();
        } else {
            if (a != 1) os << a.get_str() << "*";
            os << "z";
            if (k > 1) os << "^" << k;
        }
    }
    if (first) os << "0";
    return os.str();
}

struct PolyLexer {
    const std::string& s;
    size_t i = 0;
    explicit PolyLexer(const std::string& text) : s(text) {}
    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "' in rational function text");
    }
};

inline Poly parse_poly_sum(PolyLexer& lx) {
    std::vector<Rat> coeffs;
    auto add_term = [&](const Rat& c, size_t k) {
        if (coeffs.size() <= k) coeffs.resize(k + 1, Rat(0));
        coeffs[k] += c;
    };
    int pending_sign = 1;
    bool expect_term = true;
    while (true) {
        lx.skip_ws();
        if (lx.i >= lx.s.size()) break;
        char ch = lx.s[lx.i];
        if (ch == ')') break;
        if (ch == '+' || ch == '-') {
            if (expect_term && ch == '-') {
                pending_sign = -pending_sign;
                ++lx.i;
                continue;
            }
            pending_sign = (ch == '-') ? -1 : 1;
            ++lx.i;
            expect_term = true;
            continue;
        }
        // term: [rational][*][z[^k]]
        Rat c(1);
        bool have_coeff = false;
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            size_t j = lx.i;
            while (j < lx.s.size() &&
                   (std::isdigit(static_cast<unsigned char>(lx.s[j])) || lx.s[j] == '/'))
                ++j;
            c = rat_from_string(lx.s.substr(lx.i, j - lx.i));
            lx.i = j;
            have_coeff = true;
        }
        lx.skip_ws();
        if (lx.i < lx.s.size() && lx.s[lx.i] == '*') ++lx.i;
        lx.skip_ws();
        size_t k = 0;
        if (lx.i < lx.s.size() && lx.s[lx.i] == 'z') {
            ++lx.i;
            k = 1;
            if (lx.i < lx.s.size() && lx.s[lx.i] == '^') {
                ++lx.i;
                size_t j = lx.i;
                while (j < lx.s.size() && std::isdigit(static_cast<unsigned char>(lx.s[j]))) ++j;
                if (j == lx.i) throw ParseError("missing exponent after '^'");
                k = std::stoul(lx.s.substr(lx.i, j - lx.i));
                lx.i = j;
            }
        } else if (!have_coeff) {
            throw ParseError("malformed polynomial term");
        }
        add_term(Rat(pending_sign) * c, k);
        pending_sign = 1;
        expect_term = false;
    }
    return Poly(std::move(coeffs));
}

} // namespace detail

inline std::string RatFunc::to_string() const {
    // integer-normalize across numerator and denominator jointly
    BigInt lcm = 1;
    for (const Poly* p : {&num_, &den_})
        for (const auto& a : p->coeffs())
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a.get_den().get_mpz_t());
    auto to_int = [&](const Poly& p) {
        std::vector<BigInt> out;
        out.reserve(p.coeffs().size());
        for (const auto& a : p.coeffs()) out.push_back(BigInt(a.get_num() * (lcm / a.get_den())));
        return out;
    };
    std::vector<BigInt> ni = to_int(num_), di = to_int(den_);
    BigInt g = 0;
    for (const auto& a : ni) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    for (const auto& a : di) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    if (g > 1) {
        for (auto& a : ni) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
        for (auto& a : di) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    }
    for (const auto& a : di)
        if (a != 0) {
            if (a < 0) {
                for (auto& x : ni) x = -x;
                for (auto& x : di) x = -x;
            }
            break;
        }
    return "((" + detail::zpoly_to_string(ni) + ")/(" + detail::zpoly_to_string(di) + "))";
}

inline RatFunc RatFunc::parse(const std::string& text) {
    detail::PolyLexer lx(text);
    lx.expect('(');
    lx.expect('(');
    Poly num = detail::parse_poly_sum(lx);
    lx.expect(')');
    lx.expect('/');
    lx.expect('(');
    Poly den = detail::parse_poly_sum(lx);
    lx.expect(')');
    lx.expect(')');
    if (den.is_zero()) throw ParseError("zero denominator in rational function text");
    return RatFunc(std::move(num), std::move(den));
}

} // namespace selfsim
