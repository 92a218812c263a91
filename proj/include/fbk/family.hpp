#pragma once

#include <complex>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbk/errors.hpp"
#include "fbk/poly.hpp"

namespace fbk {

struct Component {
    QPoly g;
    int mult = 1;
};

struct Weights {
    int wx = 0, wy = 0, wz = 0, wt = 0;

    int monomial_weight(const Exponent& e) const { return wx * e[0] + wy * e[1] + wz * e[2]; }
    int max_abs_coordinate() const {
        int m = 0;
        for (int w : {wx, wy, wz, wt}) m = std::max(m, w < 0 ? -w : w);
        return m;
    }
};

// Identifies a fiber of the family: either the scheme-theoretic central fiber
// (which triggers the graded machinery) or a numeric t != 0. A numeric zero is
// rejected; CENTRAL is a distinct identity.
struct FiberId {
    bool is_central = true;
    std::complex<double> t = 0.0;

    static FiberId central() { return FiberId{}; }
    static FiberId at(std::complex<double> t) {
        require(t != std::complex<double>(0.0, 0.0), errc::central_fiber_requested,
                "numeric t = 0 is rejected; use the CENTRAL fiber identity");
        return FiberId{false, t};
    }

    std::string label() const {
        if (is_central) return "central";
        char buf[64];
        if (t.imag() == 0.0)
            std::snprintf(buf, sizeof buf, "%.17g", t.real());
        else
            std::snprintf(buf, sizeof buf, "%.17g%+.17gi", t.real(), t.imag());
        return buf;
    }

    bool operator==(const FiberId& o) const {
        return is_central == o.is_central && (is_central || t == o.t);
    }
};

// One-parameter hypersurface family F0(Z) + t*F1(Z) in P^2 x C with verified
// central-fiber decomposition F0 = prod g_j^{m_j} and an optional C*-action.
class Family {
public:
    Family(QPoly f0, QPoly f1, std::vector<Component> components,
           std::optional<Weights> weights = std::nullopt, std::string label = "")
        : f0_(std::move(f0)),
          f1_(std::move(f1)),
          components_(std::move(components)),
          weights_(weights),
          label_(std::move(label)) {
        validate();
    }

    static Family load(const nlohmann::json& config);
    static Family load_file(const std::string& path);

    const QPoly& f0() const { return f0_; }
    const QPoly& f1() const { return f1_; }
    const std::vector<Component>& components() const { return components_; }
    int component_count() const { return static_cast<int>(components_.size()); }
    const std::optional<Weights>& weights() const { return weights_; }
    const std::string& label() const { return label_; }
    int degree() const { return f0_.degree(); }

    // F0 + t*F1 with complex-double coefficients; t = 0 is rejected.
    CPoly fiber_poly(std::complex<double> t) const {
        require(t != std::complex<double>(0.0, 0.0), errc::central_fiber_requested,
                "numeric t = 0 requested; the central fiber needs the graded machinery");
        CPoly r = to_numeric(f0_);
        for (const auto& [e, c] : f1_.terms()) r.add_term(e, c.to_complex() * t);
        return r;
    }

    // exact variant with rational t
    QPoly fiber_poly_exact(const GaussRational& t) const {
        require(!t.is_zero(), errc::central_fiber_requested, "numeric t = 0 requested");
        return f0_ + f1_ * t;
    }

    // homogeneity constant c of the declared action; requires w_t > 0 so the
    // action covers the standard action on the base
    std::pair<int, int> cstar_weight_check() const {
        require(weights_.has_value(), errc::non_equivariant, "family has no declared weights");
        int c = equivariance_constant(*weights_);
        require(weights_->wt != 0, errc::base_action_trivial,
                "w_t = 0 preserves fibers; not a test configuration");
        require(weights_->wt > 0, errc::non_equivariant, "w_t must be positive");
        return {c, weights_->wt};
    }

private:
    void validate() {
        require(!f1_.is_zero(), errc::component_divides_f1, "F1 must be nonzero");
        require(f1_.degree() == f0_.degree(), errc::not_homogeneous,
                "F0 and F1 must have equal degree");
        require(!components_.empty(), errc::factorization_mismatch, "no components given");

        QPoly prod = QPoly::one();
        for (const auto& comp : components_) {
            require(comp.mult >= 1, errc::factorization_mismatch, "multiplicity must be >= 1");
            require(!comp.g.is_zero() && comp.g.degree() >= 1, errc::factorization_mismatch,
                    "component must be nonconstant");
            prod = prod * poly_pow(comp.g, comp.mult);
        }
        require(prod == f0_, errc::factorization_mismatch,
                "F0 != product of g_j^{m_j}: product is " + prod.to_string());

        for (const auto& comp : components_) {
            require(!divide_exact(f1_, comp.g).has_value(), errc::component_divides_f1,
                    "F1 divisible by component " + comp.g.to_string());
            spot_check_irreducible(comp.g);
        }

        if (weights_) equivariance_constant(*weights_);
    }

    // deg <= 2 components admit a complete check: a conic is irreducible over
    // C iff its symmetric matrix has full rank (exact determinant)
    static void spot_check_irreducible(const QPoly& g) {
        if (g.degree() != 2) return;
        GaussRational two(2);
        GaussRational q[3][3];
        q[0][0] = g.coeff({2, 0, 0});
        q[1][1] = g.coeff({0, 2, 0});
        q[2][2] = g.coeff({0, 0, 2});
        q[0][1] = q[1][0] = g.coeff({1, 1, 0}) / two;
        q[0][2] = q[2][0] = g.coeff({1, 0, 1}) / two;
        q[1][2] = q[2][1] = g.coeff({0, 1, 1}) / two;
        GaussRational det = q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) -
                            q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0]) +
                            q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
        require(!det.is_zero(), errc::factorization_mismatch,
                "component " + g.to_string() + " is a degenerate (reducible) conic");
    }

    // F(lambda^w Z; lambda^{w_t} t) = lambda^c F(Z; t) as an exact polynomial
    // identity: every F0 term has weight c and every F1 term has weight c - w_t.
    int equivariance_constant(const Weights& w) const {
        std::optional<int> c;
        for (const auto& [e, coeff] : f0_.terms()) {
            (void)coeff;
            int we = w.monomial_weight(e);
            if (!c) c = we;
            require(*c == we, errc::non_equivariant,
                    "F0 monomial " + monomial_to_string(e) + " has weight " + std::to_string(we) +
                        ", expected " + std::to_string(*c));
        }
        for (const auto& [e, coeff] : f1_.terms()) {
            (void)coeff;
            int we = w.monomial_weight(e) + w.wt;
            require(c.has_value() && *c == we, errc::non_equivariant,
                    "t-term monomial " + monomial_to_string(e) + " has weight " +
                        std::to_string(we) + ", expected " + std::to_string(c.value_or(0)));
        }
        return *c;
    }

    QPoly f0_, f1_;
    std::vector<Component> components_;
    std::optional<Weights> weights_;
    std::string label_;
};

inline Family Family::load(const nlohmann::json& config) {
    require(config.contains("F0") && config.contains("F1") && config.contains("components"),
            errc::parse_error, "family config needs F0, F1, components");
    QPoly f0 = parse_poly(config.at("F0").get<std::string>());
    QPoly f1 = parse_poly(config.at("F1").get<std::string>(), f0.degree());
    std::vector<Component> comps;
    for (const auto& item : config.at("components")) {
        require(item.is_array() && item.size() == 2, errc::parse_error,
                "component entries are [poly-text, multiplicity]");
        comps.push_back({parse_poly(item.at(0).get<std::string>()), item.at(1).get<int>()});
    }
    std::optional<Weights> w;
    if (config.contains("weights") && !config.at("weights").is_null()) {
        const auto& arr = config.at("weights");
        require(arr.is_array() && arr.size() == 4, errc::parse_error,
                "weights must be a 4-array [w_X, w_Y, w_Z, w_t]");
        w = Weights{arr.at(0).get<int>(), arr.at(1).get<int>(), arr.at(2).get<int>(),
                    arr.at(3).get<int>()};
    }
    std::string label = config.value("label", std::string{});
    return Family(std::move(f0), std::move(f1), std::move(comps), w, std::move(label));
}

inline Family Family::load_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::parse_error, "cannot open family file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("bad family JSON: ") + e.what());
    }
    return load(j);
}

}  // namespace fbk
