#include <catch2/catch_amalgamated.hpp>

#include "fbk/family.hpp"

using namespace fbk;
using nlohmann::json;

namespace {
json conic_config() {
    return json{{"F0", "Y^2"}, {"F1", "-X*Z"}, {"components", json::array({json::array({"Y", 2})})}};
}
}  // namespace

TEST_CASE("conic family loads") {
    Family fam = Family::load(conic_config());
    CHECK(fam.degree() == 2);
    CHECK(fam.component_count() == 1);
    CHECK(fam.components()[0].mult == 2);
}

TEST_CASE("cubic family loads with exact product check") {
    json cfg{{"F0", "X*Y^2"}, {"F1", "-Z^3"},
             {"components", json::array({json::array({"X", 1}), json::array({"Y", 2})})}};
    Family fam = Family::load(cfg);
    CHECK(fam.degree() == 3);
    CHECK(fam.component_count() == 2);
}

TEST_CASE("factorization mismatch is rejected") {
    json cfg{{"F0", "Y^2"}, {"F1", "-X*Z"}, {"components", json::array({json::array({"Y", 1})})}};
    CHECK_THROWS_MATCHES(Family::load(cfg), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("FactorizationMismatch")));
}

TEST_CASE("component dividing F1 is rejected") {
    json cfg{{"F0", "Y^2"}, {"F1", "Y*Z"}, {"components", json::array({json::array({"Y", 2})})}};
    CHECK_THROWS_MATCHES(Family::load(cfg), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("ComponentDividesF1")));
}

TEST_CASE("degenerate conic component fails the irreducibility spot check") {
    // X*Z is a rank-2 quadric (two lines), so it cannot be a single component
    json cfg{{"F0", "X^2*Z^2"}, {"F1", "Y^4"}, {"components", json::array({json::array({"X*Z", 2})})}};
    CHECK_THROWS_AS(Family::load(cfg), Error);
    // while the smooth conic passes
    json ok{{"F0", "Y^2-X*Z"}, {"F1", "X^2"}, {"components", json::array({json::array({"Y^2-X*Z", 1})})}};
    CHECK_NOTHROW(Family::load(ok));
}

TEST_CASE("fiber polynomial") {
    Family fam = Family::load(conic_config());
    CHECK(fam.fiber_poly(1.0) == to_numeric(parse_poly("Y^2 - X*Z")));
    CHECK(fam.fiber_poly(-1.0) == to_numeric(parse_poly("Y^2 + X*Z")));
    CHECK_THROWS_MATCHES(fam.fiber_poly(0.0), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("CentralFiberRequested")));
    CHECK(fam.fiber_poly_exact(GaussRational(1)) == parse_poly("Y^2 - X*Z"));
}

TEST_CASE("FiberId identities") {
    CHECK(FiberId::central().is_central);
    CHECK(FiberId::at(0.5).t == std::complex<double>(0.5, 0.0));
    CHECK_THROWS_AS(FiberId::at(0.0), Error);
    CHECK(FiberId::central().label() == "central");
}

TEST_CASE("cstar weight check on the conic") {
    json cfg = conic_config();
    cfg["weights"] = {0, 1, 1, 1};
    Family fam = Family::load(cfg);
    auto [c, wt] = fam.cstar_weight_check();
    CHECK(c == 2);
    CHECK(wt == 1);
}

TEST_CASE("fiber-preserving action is flagged") {
    json cfg = conic_config();
    cfg["weights"] = {0, 1, 2, 0};  // Y^2 - t X Z maps to lambda^2 (Y^2 - t X Z)
    Family fam = Family::load(cfg);
    CHECK_THROWS_MATCHES(fam.cstar_weight_check(), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("BaseActionTrivial")));
}

TEST_CASE("non-equivariant weights are rejected at load") {
    json cfg = conic_config();
    cfg["weights"] = {1, 1, 1, 1};  // tXZ picks lambda^3, Y^2 picks lambda^2
    CHECK_THROWS_MATCHES(Family::load(cfg), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("NonEquivariant")));
}

TEST_CASE("weight check requires declared weights") {
    Family fam = Family::load(conic_config());
    CHECK_THROWS_MATCHES(fam.cstar_weight_check(), Error,
                         Catch::Matchers::MessageMatches(Catch::Matchers::StartsWith("NonEquivariant")));
}

TEST_CASE("component valuations match multiplicities") {
    Family fam = Family::load_file(std::string(FBK_SOURCE_DIR) + "/families/cubic.json");
    for (const auto& comp : fam.components()) {
        CHECK(valuation(fam.f0(), comp.g) == comp.mult);
        CHECK(valuation(fam.f1(), comp.g) == 0);
    }
}

TEST_CASE("shipped family files load") {
    for (const char* name : {"conic", "cubic", "line", "reduced"}) {
        Family fam = Family::load_file(std::string(FBK_SOURCE_DIR) + "/families/" + name + ".json");
        CHECK(!fam.label().empty());
    }
}
