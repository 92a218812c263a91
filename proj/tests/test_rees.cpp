#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fbk/rees.hpp"

using namespace fbk;

namespace {
Family conic() { return Family::load_file(std::string(FBK_SOURCE_DIR) + "/families/conic.json"); }
Family cubic() { return Family::load_file(std::string(FBK_SOURCE_DIR) + "/families/cubic.json"); }

// independent oracle: feasibility at level lambda is the divisibility chain
// H_0 = P/F0, H_k = -H_{k-1} F1 / F0, so lambda_max = max level with
// F0^{k+1} | P (-F1)^k for all k < lambda
int lambda_max_chain(const Family& fam, const QPoly& p) {
    if (p.is_zero()) return detail::rees_t_bound(fam, p.degree());
    int lambda = 0;
    QPoly h = p;
    while (true) {
        auto q = divide_exact(h, fam.f0());
        if (!q) return lambda;
        ++lambda;
        h = -(*q * fam.f1());
    }
}
}  // namespace

TEST_CASE("lambda_max examples on the conic") {
    Family fam = conic();
    CHECK(lambda_max(fam, parse_poly("X")) == 0);
    CHECK(lambda_max(fam, parse_poly("Y")) == 0);
    CHECK(lambda_max(fam, parse_poly("Z")) == 0);
    // the coset of xz has representative Y^2 (X*Z is the excluded leading
    // monomial of the fiber polynomial at t = 1); witness Y^2 = t*XZ + F
    CHECK(lambda_max(fam, parse_poly("Y^2")) == 1);
    CHECK(lambda_max(fam, parse_poly("X^2")) == 0);
    CHECK(lambda_max(fam, parse_poly("Y^4")) == 2);
}

TEST_CASE("lambda_max requires weights") {
    Family fam = Family::load_file(std::string(FBK_SOURCE_DIR) + "/families/line.json");
    CHECK_THROWS_MATCHES(lambda_max(fam, parse_poly("X")), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("NonEquivariant")));
}

TEST_CASE("lambda_max agrees with the divisibility-chain oracle") {
    std::mt19937 rng(515151);
    std::uniform_int_distribution<int> coeff(-3, 3);
    for (auto make : {conic, cubic}) {
        Family fam = make();
        for (int m : {2, 3, 4}) {
            SectionSpace space = section_basis(fam, m, FiberId::at(1.0));
            for (const auto& rep : space.reps)
                CHECK(lambda_max(fam, rep) == lambda_max_chain(fam, rep));
            for (int trial = 0; trial < 5; ++trial) {
                QVec v(space.dim(), GaussRational(0));
                for (auto& c : v) c = GaussRational(coeff(rng));
                QPoly comb = space.combine(v);
                if (comb.is_zero()) continue;
                CHECK(lambda_max(fam, comb) == lambda_max_chain(fam, comb));
            }
        }
    }
}

TEST_CASE("lambda_max is invariant under shifts by multiples of F(Z, t)") {
    // shifting the presentation P by G(Z, t) F(Z, t) lands in the H block of
    // the feasibility system, so the level cannot move; check the t-free
    // shift G * F0 + (the t-part absorbed) explicitly via the chain oracle
    Family fam = conic();
    QPoly p = parse_poly("Y^2");
    int base = lambda_max(fam, p);
    // P' = P + G*(F0 + t F1) restricted to its t^0 part is P + G*F0; the
    // full shifted system is feasible at the same levels
    for (const char* g : {"1", "2", "-3"}) {
        QPoly shifted = p + fam.f0() * parse_poly(g);
        // the shifted polynomial presents t^0(P + G F0) + t^1(G F1) - G F;
        // lambda_max of the t-free part alone can only grow
        CHECK(lambda_max(fam, shifted) >= base);
    }
}

TEST_CASE("rees graded dims for the conic") {
    Family fam = conic();
    ReesFiltration r1 = rees_gr_dims(fam, 1);
    REQUIRE(r1.gr_dims.size() >= 1);
    CHECK(r1.gr_dims[0] == 3);
    CHECK(r1.graded_total() == 3);
    CHECK(r1.central_h0 == 3);

    ReesFiltration r2 = rees_gr_dims(fam, 2);
    REQUIRE(r2.gr_dims.size() == 2);
    CHECK(r2.gr_dims[0] == 4);
    CHECK(r2.gr_dims[1] == 1);
    CHECK(r2.graded_total() == 5);
    CHECK(r2.central_h0 == 5);
}

TEST_CASE("rees/central dimension identity for m = 1..5") {
    for (auto make : {conic, cubic}) {
        Family fam = make();
        for (int m = 1; m <= 5; ++m) {
            ReesFiltration r = rees_gr_dims(fam, m);
            CHECK(r.graded_total() == r.central_h0);
            // descending
            for (std::size_t i = 1; i < r.filt_dims.size(); ++i)
                CHECK(r.filt_dims[i] <= r.filt_dims[i - 1]);
            // linearly bounded: F^0 is everything, the scan exhausted at the ceiling
            CHECK(r.filt_dims[0] == r.graded_total());
        }
    }
}

TEST_CASE("multiplicable spot checks on products of basis sections") {
    Family fam = conic();
    SectionSpace s2 = section_basis(fam, 2, FiberId::at(1.0));
    SectionSpace s4 = section_basis(fam, 4, FiberId::at(1.0));
    Exponent lm4 = *s4.excluded_lm;
    (void)lm4;
    QPoly f = fam.f0() + fam.f1();
    for (const auto& a : s2.reps) {
        for (const auto& b : s2.reps) {
            QPoly prod = normal_form(a * b, f);
            if (prod.is_zero()) continue;
            CHECK(lambda_max(fam, prod) >= lambda_max(fam, a) + lambda_max(fam, b));
        }
    }
}

TEST_CASE("doubling the t-degree bound never changes lambda_max") {
    Family fam = conic();
    for (int m : {2, 3}) {
        SectionSpace space = section_basis(fam, m, FiberId::at(1.0));
        int bound = detail::rees_t_bound(fam, m);
        for (const auto& rep : space.reps) {
            int base = lambda_max(fam, rep);
            // rebuild at a doubled bound via the level subspaces
            int via_levels = 0;
            for (int lambda = 1; lambda <= 2 * bound; ++lambda) {
                auto sys = detail::build_rees_system(fam, m, lambda, 2 * bound);
                if (!solvable(sys.matrix, detail::rees_rhs(sys, rep))) break;
                via_levels = lambda;
            }
            CHECK(via_levels == base);
        }
    }
}

TEST_CASE("cubic family with weights (0,1,0,2) has consistent tables") {
    Family fam = cubic();
    ReesFiltration r1 = rees_gr_dims(fam, 1);
    CHECK(r1.graded_total() == 3);
    CHECK(r1.gr_dims[0] == 3);  // all of X, Y, Z at lambda = 0
    ReesFiltration r3 = rees_gr_dims(fam, 3);
    CHECK(r3.graded_total() == r3.central_h0);
}
