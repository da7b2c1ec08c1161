#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "selfsim/errors.hpp"

namespace selfsim {

using BigInt = mpz_class;
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "a", "a/b" and plain decimal integers with sign.
inline Rat rat_from_string(const std::string& s) {
    try {
        Rat r(s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw ParseError("not a rational: '" + s + "'");
    }
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline int sign(const Rat& r) { return sgn(r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den().get_mpz_t(), e);
    out.canonicalize();
    return out;
}

// Total bit size of numerator plus denominator; used to cap exact orbits.
inline size_t rat_bits(const Rat& r) {
    return mpz_sizeinbase(r.get_num().get_mpz_t(), 2) +
           mpz_sizeinbase(r.get_den().get_mpz_t(), 2);
}

} // namespace selfsim
