#include "doctest.h"

#include <random>

#include "selfsim/polynomial.hpp"

using namespace selfsim;

namespace {

Poly random_poly(std::mt19937_64& rng, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<long> num(-6, 6);
    std::uniform_int_distribution<long> den(1, 4);
    int d = deg(rng);
    std::vector<Rat> c(d + 1);
    for (auto& x : c) x = rat(num(rng), den(rng));
    return Poly(std::move(c));
}

} // namespace

TEST_CASE("polynomial basics") {
    Poly p({rat(1), rat(0), rat(-2)}); // 1 - 2z^2
    CHECK(p.degree() == 2);
    CHECK(p.eval(rat(1, 2)) == rat(1, 2));
    CHECK(p.derivative() == Poly({rat(0), rat(-4)}));
    CHECK(Poly().is_zero());
    CHECK(Poly({rat(0)}).is_zero());
    CHECK(Poly::monomial(rat(3), 4).valuation() == 4);
}

TEST_CASE("divmod recovers factors") {
    Poly a({rat(-1), rat(0), rat(1)}); // z^2 - 1
    Poly b({rat(1), rat(1)});          // z + 1
    auto [q, r] = Poly::divmod(a, b);
    CHECK(r.is_zero());
    CHECK(q == Poly({rat(-1), rat(1)}));
    CHECK(Poly::div_exact(a, b) == q);
}

TEST_CASE("gcd of structured polynomials") {
    Poly f({rat(-1), rat(1)}); // z - 1
    Poly g({rat(2), rat(1)});  // z + 2
    Poly h({rat(0), rat(0), rat(3)}); // 3 z^2
    Poly left = f * g * h;
    Poly right = f * h;
    Poly d = poly_gcd(left, right);
    // gcd is monic and equals (z-1) * z^2
    CHECK(d == Poly({rat(0), rat(0), rat(-1), rat(1)}));
    CHECK(Poly::div_exact(left, d) * d == left);
}

TEST_CASE("gcd property on random inputs") {
    std::mt19937_64 rng(12345);
    for (int it = 0; it < 60; ++it) {
        Poly a = random_poly(rng, 5), b = random_poly(rng, 5), m = random_poly(rng, 3);
        if (m.is_zero()) continue;
        Poly g = poly_gcd(a * m, b * m);
        if (a.is_zero() && b.is_zero()) continue;
        // m divides the gcd
        auto [q, r] = Poly::divmod(g, m);
        (void)q;
        CHECK(r.is_zero());
        if (!a.is_zero()) {
            auto [qa, ra] = Poly::divmod(a * m, g);
            (void)qa;
            CHECK(ra.is_zero());
        }
    }
}

TEST_CASE("distributivity on random instances") {
    std::mt19937_64 rng(777);
    for (int it = 0; it < 40; ++it) {
        Poly a = random_poly(rng, 4), b = random_poly(rng, 4), c = random_poly(rng, 4);
        CHECK((a + b) * c == a * c + b * c);
        CHECK((a * b).derivative() == a.derivative() * b + a * b.derivative());
    }
}

TEST_CASE("series inverse") {
    Poly p({rat(1), rat(-1)}); // 1 - z
    auto inv = p.series_inverse(5);
    for (int i = 0; i <= 5; ++i) CHECK(inv[i] == 1);
    CHECK_THROWS_AS(Poly({rat(0), rat(1)}).series_inverse(3), NumericError);
}
