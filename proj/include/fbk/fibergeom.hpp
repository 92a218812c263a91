#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "fbk/family.hpp"
#include "fbk/quadrature.hpp"
#include "fbk/sections.hpp"

namespace fbk {

namespace detail {

// chart of largest |coordinate|
inline int largest_axis(const P3& p) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(p[i]) > std::abs(p[best])) best = i;
    return best;
}

}  // namespace detail

// Validates a base point for tracking / h0 evaluation: on Y_j at unit norm,
// away from the other components and from the base locus of F1. Returns the
// normalized point.
inline P3 validate_base_point(const Family& fam, const P3& x0_in, int j) {
    require(j >= 0 && j < fam.component_count(), errc::bad_base_point, "no such component");
    P3 x0 = normalized(x0_in);
    const auto& comps = fam.components();
    double gj = std::abs(eval(comps[j].g, x0));
    require(gj <= 1e-9, errc::bad_base_point,
            "point does not lie on component " + comps[j].g.to_string());
    for (int k = 0; k < fam.component_count(); ++k) {
        if (k == j) continue;
        require(std::abs(eval(comps[k].g, x0)) > 1e-6, errc::bad_base_point,
                "point too close to component " + comps[k].g.to_string());
    }
    require(std::abs(eval(fam.f1(), x0)) > 1e-6, errc::bad_base_point,
            "point lies on the base locus of F1");
    return x0;
}

// Component index of a central point, or BadBasePoint when off every
// component's regular sampling region.
inline int component_of(const Family& fam, const P3& x0_in) {
    P3 x0 = normalized(x0_in);
    int best = -1;
    double bestval = 1.0;
    for (int j = 0; j < fam.component_count(); ++j) {
        double v = std::abs(eval(fam.components()[j].g, x0));
        if (v < bestval) {
            bestval = v;
            best = j;
        }
    }
    require(best >= 0 && bestval <= 1e-9, errc::bad_base_point, "point is not on the central fiber");
    return best;
}

struct TrackedFiber {
    std::complex<double> t;
    std::vector<P3> points;  // the m_j preimages on X_t
};

struct TrackedPath {
    P3 base;
    int component = 0;
    std::vector<TrackedFiber> fibers;
};

// The m_j points of X_t over a central base point x0 in Y_j: solves
// F(x0 + zeta * nu, t) = 0 along the unit conjugate-gradient normal nu of g_j
// at x0, keeps the m_j smallest roots, and Newton-polishes each.
inline std::vector<P3> track_points(const Family& fam, const P3& x0_in, std::complex<double> t) {
    int j = component_of(fam, x0_in);
    P3 x0 = validate_base_point(fam, x0_in, j);
    const int mj = fam.components()[j].mult;

    // normal direction: conjugate gradient of g_j in the affine chart of the
    // largest coordinate (that coordinate stays fixed)
    int chart = detail::largest_axis(x0);
    CPoly g = to_numeric(fam.components()[j].g);
    P3 nu{0.0, 0.0, 0.0};
    double glen = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        if (axis == chart) continue;
        Complex d = eval(derivative(g, axis), x0);
        nu[axis] = std::conj(d);
        glen += std::norm(d);
    }
    require(glen > 1e-12, errc::bad_base_point, "component gradient vanishes (singular point)");
    glen = std::sqrt(glen);
    for (auto& c : nu) c /= glen;

    // univariate in zeta by interpolation at scaled roots of unity (a DFT, so
    // perfectly conditioned)
    CPoly f = fam.fiber_poly(t);
    FlatPoly ff = FlatPoly::from(f);
    const int d = f.degree();
    const int n = d + 1;
    const double rs = 0.5;
    std::vector<Complex> samples(n);
    for (int k = 0; k < n; ++k) {
        Complex zeta = std::polar(rs, 2.0 * std::numbers::pi * k / n);
        P3 p{x0[0] + zeta * nu[0], x0[1] + zeta * nu[1], x0[2] + zeta * nu[2]};
        samples[k] = ff.eval(p);
    }
    std::vector<Complex> coeffs(n, 0.0);
    for (int c = 0; c < n; ++c) {
        Complex acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += samples[k] * std::polar(1.0, -2.0 * std::numbers::pi * c * k / n);
        coeffs[c] = acc / (static_cast<double>(n) * std::pow(rs, c));
    }

    auto roots = detail::poly_roots(coeffs);
    require(static_cast<int>(roots.size()) >= mj, errc::tracking_failed,
            "expected at least " + std::to_string(mj) + " roots near the base point");
    std::sort(roots.begin(), roots.end(),
              [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
    require(std::abs(roots[mj - 1]) < 0.5, errc::tracking_failed,
            "|t| too large: nearest preimages escaped the tracking radius");
    if (static_cast<int>(roots.size()) > mj)
        require(std::abs(roots[mj]) > 2.0 * std::abs(roots[mj - 1]), errc::tracking_failed,
                "preimage cluster not separated from the far roots");

    std::vector<P3> out;
    for (int k = 0; k < mj; ++k) {
        Complex zeta = roots[k];
        // Newton polish on zeta -> F(x0 + zeta nu, t)
        for (int it = 0; it < 6; ++it) {
            P3 p{x0[0] + zeta * nu[0], x0[1] + zeta * nu[1], x0[2] + zeta * nu[2]};
            Complex val = ff.eval(p);
            Complex der = 0.0;
            for (int axis = 0; axis < 3; ++axis)
                der += eval(derivative(f, axis), p) * nu[axis];
            if (std::abs(der) < 1e-300) break;
            Complex step = val / der;
            zeta -= step;
            if (std::abs(step) < 1e-15) break;
        }
        P3 p = normalized({x0[0] + zeta * nu[0], x0[1] + zeta * nu[1], x0[2] + zeta * nu[2]});
        double scale = 0.0;
        for (const auto& [e, c] : f.terms()) scale = std::max(scale, std::abs(c));
        require(std::abs(ff.eval(p)) <= 1e-12 * std::max(scale, 1.0), errc::tracking_failed,
                "tracked point failed to polish onto the fiber");
        out.push_back(p);
    }
    // deterministic order
    std::sort(out.begin(), out.end(), [](const P3& a, const P3& b) {
        for (int i = 0; i < 3; ++i) {
            if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
            if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
        }
        return false;
    });
    return out;
}

inline TrackedPath track_path(const Family& fam, const P3& x0,
                              const std::vector<std::complex<double>>& ts) {
    TrackedPath path;
    path.component = component_of(fam, x0);
    path.base = validate_base_point(fam, x0, path.component);
    for (auto t : ts) path.fibers.push_back({t, track_points(fam, path.base, t)});
    return path;
}

// --- the limit pairing h_{0,alpha} ----------------------------------------
//
// On X : F0 + t F1 = 0 the base parameter is t = -F0/F1, so near a point of
// Y_j the unit in t = g_j^{m_j} v is v = -(prod_{k != j} g_k^{m_k}) / F1.
// For a section with representative s = g_j^a q (exact division, a =
// alpha * m_j) the rescaled limit |t|^{-2 alpha} ||s||^2_{FS} restricted to
// Y_j equals |v|^{-2 alpha} |q|^2 at the unit-norm point.

// |v_j(x)|^{-2 alpha} at a unit-norm x
inline double h0_unit_factor(const Family& fam, int j, const P3& x_unit, const Frac& alpha) {
    CPoly numer = CPoly::one();
    for (int k = 0; k < fam.component_count(); ++k) {
        if (k == j) continue;
        numer = numer * to_numeric(poly_pow(fam.components()[k].g, fam.components()[k].mult));
    }
    double vn = std::abs(eval(numer, x_unit));
    double f1 = std::abs(eval(fam.f1(), x_unit));
    if (alpha.num == 0) return 1.0;
    return std::pow(f1 / vn, 2.0 * alpha.to_double());
}

// h_{0,alpha}(s)(x0) for x0 on Y_j. Zero when ord_{Y_j}(s) exceeds alpha*m_j
// (or alpha*m_j is not an integer); OrderMismatch when the order falls short
// (the rescaled limit diverges there).
inline double h0_eval(const Family& fam, const QPoly& s, const Frac& alpha, int j, const P3& x0_in) {
    P3 x0 = validate_base_point(fam, x0_in, j);
    const auto& comp = fam.components()[j];
    int a_act = valuation(s, comp.g);
    if (!alpha.mul_is_integer(comp.mult)) {
        require(a_act == kValInfinity || Frac(a_act, comp.mult) > alpha, errc::order_mismatch,
                "section order below alpha on this component");
        return 0.0;
    }
    int a_req = static_cast<int>(alpha.ceil_mul(comp.mult));
    require(a_act >= a_req, errc::order_mismatch,
            "section has ord " + std::to_string(a_act) + " < alpha*m_j = " + std::to_string(a_req) +
                " on this component; the rescaled limit diverges");
    if (a_act > a_req) return 0.0;
    QPoly q = *divide_exact(s, poly_pow(comp.g, a_req));
    return h0_unit_factor(fam, j, x0, alpha) * std::norm(eval(q, x0));
}

// Hermitian pairing by the polarization identity
//   2 h(s,s') = h(s+s') - h(s) - h(s') + i (h(s+is') - h(s) - h(s')).
inline Complex pair_h0_eval(const Family& fam, const QPoly& s, const QPoly& sp, const Frac& alpha,
                            int j, const P3& x0_in) {
    P3 x0 = validate_base_point(fam, x0_in, j);
    const auto& comp = fam.components()[j];
    if (!alpha.mul_is_integer(comp.mult)) return 0.0;
    int a_req = static_cast<int>(alpha.ceil_mul(comp.mult));
    QPoly ga = poly_pow(comp.g, a_req);
    require(valuation(s, comp.g) >= a_req && valuation(sp, comp.g) >= a_req, errc::order_mismatch,
            "pair_h0_eval needs both sections in F^alpha");
    QPoly q = *divide_exact(s, ga);
    QPoly qp = *divide_exact(sp, ga);
    double unit = h0_unit_factor(fam, j, x0, alpha);
    Complex z = eval(q, x0), zp = eval(qp, x0);
    double hs = std::norm(z), hsp = std::norm(zp);
    double h_sum = std::norm(z + zp);
    double h_isum = std::norm(z + Complex(0.0, 1.0) * zp);
    Complex two_h(h_sum - hs - hsp, h_isum - hs - hsp);
    return unit * two_h / 2.0;
}

}  // namespace fbk
