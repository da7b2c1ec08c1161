#include "doctest.h"

#include <cmath>

#include "selfsim/bigfloat.hpp"

using namespace selfsim;

TEST_CASE("real arithmetic and precision") {
    Real a(1.0, 256), b(3.0, 256);
    Real third = a / b;
    CHECK(third.prec() == 256);
    CHECK(std::abs(third.to_double() - 1.0 / 3.0) < 1e-15);
    Real back = third * b;
    CHECK(abs(back - a).to_double() < 1e-70);

    Real e = exp(Real(1.0, 192));
    CHECK(std::abs(e.to_double() - std::exp(1.0)) < 1e-14);
    CHECK(std::abs(log(e).to_double() - 1.0) < 1e-15);
    CHECK(std::abs(pow(Real(2.0, 128), Real(0.5, 128)).to_double() - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("complex arithmetic") {
    Cplx i(Real(0.0, 128), Real(1.0, 128));
    Cplx sq = i * i;
    CHECK(sq.re.to_double() == doctest::Approx(-1.0));
    CHECK(sq.im.to_double() == doctest::Approx(0.0));
    Cplx z(Real(3.0, 128), Real(4.0, 128));
    CHECK(abs(z).to_double() == doctest::Approx(5.0));
    Cplx q = z / z;
    CHECK(q.re.to_double() == doctest::Approx(1.0));
    CHECK(q.im.to_double() == doctest::Approx(0.0));
}

TEST_CASE("extended precision rational function evaluation") {
    RatFunc d2(Poly({rat(0), rat(0), rat(1)}), Poly({rat(2), rat(0), rat(-1)}));
    Cplx z = Cplx::from_real(Real(0.5, 256));
    Cplx v = eval_complex(d2, z, 256);
    // exact value 1/7
    Real expect = Real(rat(1, 7), 256);
    CHECK(abs(v.re - expect).to_double() < 1e-70);
    CHECK(v.im.to_double() == 0.0);

    // flake(3) transition at z=2 is -2
    RatFunc df(Poly({rat(0), rat(0), rat(1)}), Poly({rat(6), rat(-6), rat(1)}));
    Cplx v2 = eval_complex(df, Cplx::from_real(Real(2.0, 128)), 128);
    CHECK(v2.re.to_double() == doctest::Approx(-2.0));

    // 1/z at the origin reports a pole
    RatFunc oneoverz(Poly({rat(1)}), Poly({rat(0), rat(1)}));
    CHECK_THROWS_AS(eval_complex(oneoverz, Cplx(128), 128), NumericError);
}

TEST_CASE("guard bits give requested relative error") {
    // compare 128-bit evaluation of a mildly ill-conditioned point to 512-bit truth
    RatFunc f(Poly({rat(1), rat(3), rat(-2), rat(5)}), Poly({rat(2), rat(-1), rat(7)}));
    Cplx z(Real(0.93, 512), Real(0.002, 512));
    Cplx lo = eval_complex(f, z, 128);
    Cplx hi = eval_complex(f, z, 512);
    Real err = abs(Cplx(lo.re - hi.re, lo.im - hi.im)) / abs(hi);
    CHECK(err < pow2(-120, 512));
}
