#include <catch2/catch_amalgamated.hpp>

#include "fbk/rational.hpp"

using fbk::Frac;
using fbk::GaussRational;

TEST_CASE("field operations are exact") {
    GaussRational a = GaussRational::fraction(1, 3) + GaussRational::fraction(1, 6) * GaussRational::i();
    GaussRational b = GaussRational::fraction(2, 5) - GaussRational::fraction(7, 2) * GaussRational::i();
    GaussRational p = a * b;
    // (1/3 + i/6)(2/5 - 7i/2) = 2/15 + 7/12 + i(1/15 - 7/6)
    CHECK(p.re() == mpq_class(2, 15) + mpq_class(7, 12));
    CHECK(p.im() == mpq_class(1, 15) - mpq_class(7, 6));

    GaussRational q = p / b;
    CHECK(q == a);

    CHECK((a - a).is_zero());
    CHECK(a + (-a) == GaussRational(0));
}

TEST_CASE("division by nonzero never rounds") {
    GaussRational x = GaussRational::fraction(22, 7);
    GaussRational y = GaussRational::fraction(355, 113) * GaussRational::i();
    GaussRational r = (x / y) * y;
    CHECK(r == x);
}

TEST_CASE("division by zero throws") {
    CHECK_THROWS_AS(GaussRational(1) / GaussRational(0), fbk::Error);
}

TEST_CASE("norm2 and conjugate") {
    GaussRational z = GaussRational(3) + GaussRational(4) * GaussRational::i();
    CHECK(z.norm2() == 25);
    CHECK((z * z.conj()).re() == 25);
    CHECK((z * z.conj()).im() == 0);
}

TEST_CASE("Frac normalization and comparisons") {
    CHECK(Frac(2, 4) == Frac(1, 2));
    CHECK(Frac(-2, -4) == Frac(1, 2));
    CHECK(Frac(1, -2).num == -1);
    CHECK(Frac(0, 7) == Frac(0));
    CHECK(Frac(1, 3) < Frac(1, 2));
    CHECK(Frac(1, 2).ceil_mul(3) == 2);
    CHECK(Frac(1, 2).ceil_mul(2) == 1);
    CHECK(Frac(1, 2).mul_is_integer(2));
    CHECK_FALSE(Frac(1, 2).mul_is_integer(3));
    CHECK(Frac(1, 2).to_string() == "1/2");
    CHECK(Frac(3).to_string() == "3");
}
