#pragma once

#include <cmath>
#include <complex>

#include "selfsim/errors.hpp"

namespace selfsim {

/// Relative accuracy of complex_gamma on the region the transfer formula
/// needs (Re z in (0,2), moderate imaginary part); used in error budgets.
inline constexpr double kGammaRelError = 1e-13;

/// Lanczos approximation (g = 7, 9 terms) with the reflection formula for
/// Re z < 1/2. Poles at the nonpositive integers are reported.
inline std::complex<double> complex_gamma(std::complex<double> z) {
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw NumericError("gamma pole at a nonpositive integer");
    if (z.real() < 0.5) {
        // pi / (sin(pi z) Gamma(1 - z))
        std::complex<double> s = std::sin(M_PI * z);
        if (s == std::complex<double>(0.0, 0.0)) throw NumericError("gamma reflection at a pole");
        return M_PI / (s * complex_gamma(1.0 - z));
    }
    z -= 1.0;
    std::complex<double> a = c[0];
    for (int k = 1; k < 9; ++k) a += c[k] / (z + static_cast<double>(k));
    std::complex<double> t = z + g + 0.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

} // namespace selfsim
