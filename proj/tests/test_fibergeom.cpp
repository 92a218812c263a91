#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fbk/fibergeom.hpp"

using namespace fbk;

namespace {
Family conic() { return Family::load_file(std::string(FBK_SOURCE_DIR) + "/families/conic.json"); }
Family cubic() { return Family::load_file(std::string(FBK_SOURCE_DIR) + "/families/cubic.json"); }

P3 pt(double a, double b, double c) { return {a, b, c}; }
}  // namespace

TEST_CASE("tracking the conic over [1:0:1]") {
    Family fam = conic();
    auto pts = track_points(fam, pt(1, 0, 1), 1e-4);
    REQUIRE(pts.size() == 2);
    // preimages are [1 : +-sqrt(t) : 1] up to normalization
    for (const auto& p : pts) {
        P3 q = {p[0] / p[2], p[1] / p[2], p[2] / p[2]};
        CHECK(std::abs(q[0] - 1.0) < 1e-8);
        CHECK(std::abs(std::abs(q[1]) - 1e-2) < 1e-8);
    }
    // residual on the fiber after normalization
    FlatPoly f = FlatPoly::from(fam.fiber_poly(1e-4));
    for (const auto& p : pts) CHECK(std::abs(f.eval(p)) <= 1e-9);
}

TEST_CASE("tracked points approach the base point like sqrt(t)") {
    Family fam = conic();
    P3 x0 = normalized(pt(1, 0, 1));
    auto pts = track_points(fam, x0, 1e-6);
    for (const auto& p : pts) {
        double dist = 0.0;
        for (int i = 0; i < 3; ++i) dist += std::norm(p[i] - x0[i]);
        CHECK(std::sqrt(dist) < 1e-3);
    }
}

TEST_CASE("preimage count equals the multiplicity") {
    Family fam = cubic();
    // on component X (mult 1): one preimage; on Y (mult 2): two
    auto on_x = track_points(fam, pt(0, 1, 1), 1e-4);
    CHECK(on_x.size() == 1);
    auto on_y = track_points(fam, pt(1, 0, 1), 1e-4);
    CHECK(on_y.size() == 2);
}

TEST_CASE("base-point preconditions") {
    Family fam = conic();
    // F1 = -XZ vanishes at [1:0:0]
    CHECK_THROWS_MATCHES(track_points(fam, pt(1, 0, 0), 1e-4), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("BadBasePoint")));
    // not on the central fiber at all
    CHECK_THROWS_AS(track_points(fam, pt(1, 1, 1), 1e-4), Error);
    // cubic: [0:0:1] sits on both components
    CHECK_THROWS_AS(track_points(cubic(), pt(0, 0, 1), 1e-4), Error);
}

TEST_CASE("tracking fails politely when |t| is too large") {
    Family fam = conic();
    CHECK_THROWS_MATCHES(track_points(fam, pt(1, 0, 1), 30.0), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("TrackingFailed")));
}

TEST_CASE("h0_eval of Y on the conic") {
    Family fam = conic();
    QPoly y = parse_poly("Y");
    // h0(Y)([1:0:c]) = |c| / (1 + |c|^2)
    for (double c : {1.0, 0.5, 2.0}) {
        double got = h0_eval(fam, y, Frac(1, 2), 0, pt(1, 0, c));
        CHECK(got == Catch::Approx(c / (1.0 + c * c)).epsilon(1e-10));
    }
    CHECK(h0_eval(fam, y, Frac(1, 2), 0, pt(1, 0, 1)) == Catch::Approx(0.5));
}

TEST_CASE("h0_eval at alpha = 0 is the plain FS norm") {
    Family fam = conic();
    QPoly x = parse_poly("X");
    CHECK(h0_eval(fam, x, Frac(0), 0, pt(1, 0, 1)) == Catch::Approx(0.5));
}

TEST_CASE("h0_eval vanishing and divergence rules") {
    Family fam = conic();
    // ord(Y) = 1 > 0 = alpha * m_j: vanishes identically on the reduction
    CHECK(h0_eval(fam, parse_poly("Y"), Frac(0), 0, pt(1, 0, 1)) == 0.0);
    // ord(X) = 0 < 1 = alpha * m_j: the rescaled limit diverges
    CHECK_THROWS_MATCHES(h0_eval(fam, parse_poly("X"), Frac(1, 2), 0, pt(1, 0, 1)), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("OrderMismatch")));
}

TEST_CASE("h0_eval with non-integer alpha * m_j vanishes") {
    Family fam = cubic();
    // component X has m = 1; alpha = 1/2 gives non-integer a, so sections of
    // F^{1/2} restrict to zero there
    QPoly s = parse_poly("X*Y");  // ord_X = inf (capped), ord_Y = 1
    CHECK(h0_eval(fam, s, Frac(1, 2), 0, pt(0, 1, 1)) == 0.0);
}

TEST_CASE("pair_h0_eval polarization matches the product form") {
    Family fam = conic();
    QPoly xy = parse_poly("X*Y"), yz = parse_poly("Y*Z");
    P3 x0 = normalized(pt(1, 0, 2));
    Complex got = pair_h0_eval(fam, xy, yz, Frac(1, 2), 0, x0);
    // |v|^{-1} q_xy conj(q_yz) with q = s / Y
    double unit = h0_unit_factor(fam, 0, x0, Frac(1, 2));
    Complex expect = unit * eval(parse_poly("X"), x0) * std::conj(eval(parse_poly("Z"), x0));
    CHECK(std::abs(got - expect) < 1e-12);
    // Hermitian symmetry
    Complex rev = pair_h0_eval(fam, yz, xy, Frac(1, 2), 0, x0);
    CHECK(std::abs(got - std::conj(rev)) < 1e-12);
    // diagonal agrees with h0_eval
    CHECK(pair_h0_eval(fam, xy, xy, Frac(1, 2), 0, x0).real() ==
          Catch::Approx(h0_eval(fam, xy, Frac(1, 2), 0, x0)));
}

TEST_CASE("h0_eval direct formula matches the tracked limit") {
    Family fam = conic();
    QPoly y = parse_poly("Y");
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double t = 1e-6;
    int tested = 0;
    while (tested < 20) {
        P3 x0 = {Complex(u(rng), u(rng)), 0.0, Complex(u(rng), u(rng))};
        try {
            x0 = validate_base_point(fam, x0, 0);
        } catch (const Error&) {
            continue;
        }
        double direct = h0_eval(fam, y, Frac(1, 2), 0, x0);
        auto pts = track_points(fam, x0, t);
        double tracked = 0.0;
        for (const auto& p : pts) tracked += fs_norm(y, p, 1) / t;
        tracked /= static_cast<double>(pts.size());
        CHECK(std::abs(tracked - direct) <= 1e-4 * std::max(direct, 1e-12));
        ++tested;
    }
}

TEST_CASE("cubic h0 tracked-limit cross-check on the double component") {
    Family fam = cubic();
    // s = X*Y has ord_Y = 1, alpha = 1/2 attained on Y (m = 2)
    QPoly s = parse_poly("X*Y");
    P3 x0 = normalized(pt(1, 0, 0.7));
    double direct = h0_eval(fam, s, Frac(1, 2), 1, x0);
    const double t = 1e-6;
    auto pts = track_points(fam, x0, t);
    REQUIRE(pts.size() == 2);
    double tracked = 0.0;
    for (const auto& p : pts) tracked += fs_norm(s, p, 2) / t;
    tracked /= 2.0;
    CHECK(std::abs(tracked - direct) <= 1e-4 * std::max(direct, 1e-12));
}

TEST_CASE("fiber polynomial residual at tracked points") {
    Family fam = cubic();
    for (double t : {1e-3, 1e-5}) {
        FlatPoly f = FlatPoly::from(fam.fiber_poly(t));
        for (const auto& p : track_points(fam, pt(1, 0, 1), t)) CHECK(std::abs(f.eval(p)) <= 1e-9);
    }
}
