#include <catch2/catch_amalgamated.hpp>

#include "fbk/exact_linalg.hpp"

using namespace fbk;

namespace {
GaussRational q(long n) { return GaussRational(n); }
}

TEST_CASE("rref rank") {
    QMat a = {{q(1), q(2), q(3)}, {q(2), q(4), q(6)}, {q(0), q(1), q(1)}};
    CHECK(rank(a) == 2);
}

TEST_CASE("kernel basis is canonical and correct") {
    // x + 2y + 3z = 0, y + z = 0  =>  kernel = span{(-1, -1, 1)}
    QMat a = {{q(1), q(2), q(3)}, {q(0), q(1), q(1)}};
    auto ker = kernel_basis(a, 3);
    REQUIRE(ker.size() == 1);
    CHECK(ker[0][0] == q(-1));
    CHECK(ker[0][1] == q(-1));
    CHECK(ker[0][2] == q(1));
}

TEST_CASE("kernel of empty constraint set is full space") {
    auto ker = kernel_basis(QMat{}, 4);
    CHECK(ker.size() == 4);
}

TEST_CASE("span tracker greedy extension") {
    SpanTracker span(3);
    CHECK(span.add({q(1), q(1), q(0)}));
    CHECK_FALSE(span.add({q(2), q(2), q(0)}));
    CHECK(span.add({q(0), q(1), q(1)}));
    CHECK(span.rank() == 2);
    CHECK(span.contains({q(1), q(0), q(-1)}));
    CHECK_FALSE(span.contains({q(0), q(0), q(1)}));
}

TEST_CASE("solvable detects consistency") {
    QMat a = {{q(1), q(0)}, {q(0), q(1)}, {q(1), q(1)}};
    CHECK(solvable(a, {q(1), q(2), q(3)}));
    CHECK_FALSE(solvable(a, {q(1), q(2), q(4)}));
}

TEST_CASE("complex entries eliminate exactly") {
    GaussRational i = GaussRational::i();
    // (1+i) x + 2 y = 0 has kernel dim 1 over Q(i)
    QMat a = {{GaussRational(1) + i, q(2)}};
    auto ker = kernel_basis(a, 2);
    REQUIRE(ker.size() == 1);
    GaussRational x = ker[0][0], y = ker[0][1];
    CHECK(((GaussRational(1) + i) * x + q(2) * y).is_zero());
}
