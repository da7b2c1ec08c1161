#include "doctest.h"

#include <random>

#include "selfsim/ratfunc.hpp"

using namespace selfsim;

namespace {

// d of the length-2 line cell: z^2 / (2 - z^2)
RatFunc d_line2() {
    return RatFunc(Poly({rat(0), rat(0), rat(1)}), Poly({rat(2), rat(0), rat(-1)}));
}

RatFunc random_ratfunc(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-4, 4);
    std::uniform_int_distribution<int> deg(0, 3);
    auto mk = [&](bool nonzero_const) {
        int d = deg(rng);
        std::vector<Rat> c(d + 1);
        for (auto& x : c) x = Rat(num(rng));
        if (nonzero_const && (c.empty() || c[0] == 0)) c.insert(c.begin(), Rat(1));
        Poly p(std::move(c));
        return p;
    };
    Poly n = mk(false);
    Poly d = mk(true);
    while (d.is_zero()) d = mk(true);
    return RatFunc(n, d);
}

} // namespace

TEST_CASE("canonical form and equality") {
    // (2z^2)/(4 - 2z^2) reduces to z^2/(2 - z^2)
    RatFunc a(Poly({rat(0), rat(0), rat(2)}), Poly({rat(4), rat(0), rat(-2)}));
    CHECK(a == d_line2());
    // canonicalization is idempotent
    RatFunc again(a.num(), a.den());
    CHECK(again == a);
    // denominator's lowest nonzero coefficient is 1
    CHECK(a.den().coeff(0) == 1);
}

TEST_CASE("arithmetic examples") {
    RatFunc d2 = d_line2();
    RatFunc sum = ratfunc_arith(d2, RatFunc::constant(rat(1)), RatOp::Add);
    CHECK(sum == RatFunc(Poly({rat(2)}), Poly({rat(2), rat(0), rat(-1)})));

    RatFunc inv = RatFunc(Poly({rat(0), rat(1)}), Poly({rat(0), rat(1)})); // z/z == 1
    CHECK(inv == RatFunc::constant(rat(1)));
    RatFunc oneoverz(Poly({rat(1)}), Poly({rat(0), rat(1)}));
    CHECK(ratfunc_arith(oneoverz, oneoverz, RatOp::Compose) == RatFunc::identity());

    CHECK(ratfunc_arith(d2, RatFunc(), RatOp::Mul).is_zero());
    CHECK_THROWS_AS(ratfunc_arith(d2, RatFunc(), RatOp::Div), NumericError);
}

TEST_CASE("field identities on random instances") {
    std::mt19937_64 rng(4242);
    int done = 0;
    while (done < 30) {
        RatFunc a = random_ratfunc(rng), b = random_ratfunc(rng), c = random_ratfunc(rng);
        CHECK((a + b) * c == a * c + b * c);
        if (!b.is_zero()) CHECK((a / b) * b == a);
        ++done;
    }
}

TEST_CASE("derivative") {
    RatFunc d2 = d_line2();
    RatFunc dd = d2.derivative();
    CHECK(dd.eval(rat(1)) == rat(4)); // tau of the line of length 2 is 4
    CHECK(RatFunc::constant(rat(7)).derivative().is_zero());
    // flake(3) transition function z^2/(6-6z+z^2): derivative at 1 is 6
    RatFunc df(Poly({rat(0), rat(0), rat(1)}), Poly({rat(6), rat(-6), rat(1)}));
    CHECK(df.derivative().eval(rat(1)) == rat(6));

    std::mt19937_64 rng(99);
    for (int it = 0; it < 20; ++it) {
        RatFunc a = random_ratfunc(rng), b = random_ratfunc(rng);
        CHECK((a * b).derivative() == a.derivative() * b + a * b.derivative());
        CHECK((a + b).derivative() == a.derivative() + b.derivative());
    }
}

TEST_CASE("series extraction") {
    auto s = d_line2().series(6);
    std::vector<Rat> expect = {rat(0), rat(0), rat(1, 2), rat(0), rat(1, 4), rat(0), rat(1, 8)};
    CHECK(s == expect);

    RatFunc geom(Poly({rat(1)}), Poly({rat(1), rat(-1)}));
    auto g = geom.series(3);
    CHECK(g == std::vector<Rat>{rat(1), rat(1), rat(1), rat(1)});

    // 2d Sierpinski transition function z^2/(4-3z)
    RatFunc ds(Poly({rat(0), rat(0), rat(1)}), Poly({rat(4), rat(-3)}));
    auto ss = ds.series(4);
    CHECK(ss == std::vector<Rat>{rat(0), rat(0), rat(1, 4), rat(3, 16), rat(9, 64)});

    CHECK_THROWS_AS(RatFunc(Poly({rat(1)}), Poly({rat(0), rat(1)})).series(2), NumericError);
}

TEST_CASE("series of product is the Cauchy product") {
    std::mt19937_64 rng(31337);
    for (int it = 0; it < 20; ++it) {
        RatFunc a = random_ratfunc(rng), b = random_ratfunc(rng);
        if (a.den().coeff(0) == 0 || b.den().coeff(0) == 0) continue;
        auto sa = a.series(8), sb = b.series(8), sp = (a * b).series(8);
        for (int n = 0; n <= 8; ++n) {
            Rat acc(0);
            for (int j = 0; j <= n; ++j) acc += sa[j] * sb[n - j];
            CHECK(acc == sp[n]);
        }
    }
}

TEST_CASE("projective evaluation") {
    RatFunc d2 = d_line2();
    CHECK(d2.eval(rat(1, 2)) == rat(1, 7));
    // flake(3) map sends 2 -> -2 and infinity -> 1
    RatFunc df(Poly({rat(0), rat(0), rat(1)}), Poly({rat(6), rat(-6), rat(1)}));
    CHECK(df.eval(rat(2)) == rat(-2));
    auto at_inf = df.eval_projective(std::nullopt);
    REQUIRE(at_inf.has_value());
    CHECK(*at_inf == rat(1));
    // pole goes to infinity
    RatFunc pole(Poly({rat(1)}), Poly({rat(-2), rat(1)}));
    CHECK(!pole.eval_projective(rat(2)).has_value());
    CHECK_THROWS_AS(RatFunc(Poly({rat(1)}), Poly({rat(0), rat(1)})).eval(rat(0)), NumericError);
}

TEST_CASE("text grammar round trip") {
    RatFunc d2 = d_line2();
    std::string s = d2.to_string();
    CHECK(s == "((z^2)/(2 - z^2))");
    CHECK(RatFunc::parse(s) == d2);

    RatFunc withfrac(Poly({rat(1, 3), rat(-2, 5)}), Poly({rat(1), rat(1, 7)}));
    CHECK(RatFunc::parse(withfrac.to_string()) == withfrac);

    CHECK(RatFunc::parse("((0)/(1))").is_zero());
    CHECK_THROWS_AS(RatFunc::parse("((1)/0)"), ParseError);

    std::mt19937_64 rng(5150);
    for (int it = 0; it < 25; ++it) {
        RatFunc a = random_ratfunc(rng);
        CHECK(RatFunc::parse(a.to_string()) == a);
    }
}
