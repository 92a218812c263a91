#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "fbk/family.hpp"
#include "fbk/parallel.hpp"
#include "fbk/poly.hpp"

namespace fbk {

using Complex = std::complex<double>;

inline double norm2(const P3& p) {
    return std::norm(p[0]) + std::norm(p[1]) + std::norm(p[2]);
}

inline P3 normalized(const P3& p) {
    double n = std::sqrt(norm2(p));
    require(n > 0, errc::bad_base_point, "zero vector is not a projective point");
    return {p[0] / n, p[1] / n, p[2] / n};
}

// Compensated (Kahan) accumulation; summation order is part of the contract.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

struct KahanComplex {
    KahanSum re, im;
    void add(Complex z) {
        re.add(z.real());
        im.add(z.imag());
    }
    Complex value() const { return {re.value(), im.value()}; }
};

// ‖s(p)‖²_{FS,m} = |s(p)|² at the unit-normalized representative.
template <class K>
double fs_norm(const HomogPoly<K>& s, const P3& point, int m) {
    require(s.degree() == m, errc::degree_mismatch,
            "section degree " + std::to_string(s.degree()) + " != twist " + std::to_string(m));
    return std::norm(eval(s, normalized(point)));
}

// Flattened polynomial for allocation-free repeated evaluation.
struct FlatPoly {
    int degree = 0;
    int amax = 0, bmax = 0, cmax = 0;
    struct Term {
        int a, b, c;
        Complex coeff;
    };
    std::vector<Term> terms;

    static FlatPoly from(const CPoly& p) {
        FlatPoly f;
        f.degree = p.degree();
        for (const auto& [e, c] : p.terms()) {
            f.terms.push_back({e[0], e[1], e[2], c});
            f.amax = std::max(f.amax, e[0]);
            f.bmax = std::max(f.bmax, e[1]);
            f.cmax = std::max(f.cmax, e[2]);
        }
        return f;
    }

    Complex eval(const P3& p) const {
        Complex px[33], py[33], pz[33];
        px[0] = py[0] = pz[0] = 1.0;
        for (int i = 1; i <= amax; ++i) px[i] = px[i - 1] * p[0];
        for (int i = 1; i <= bmax; ++i) py[i] = py[i - 1] * p[1];
        for (int i = 1; i <= cmax; ++i) pz[i] = pz[i - 1] * p[2];
        Complex acc = 0.0;
        for (const auto& t : terms) acc += t.coeff * px[t.a] * py[t.b] * pz[t.c];
        return acc;
    }
};

namespace detail {

// Roots of a univariate complex polynomial (coefficient k = coefficient of
// y^k) via the companion matrix, one Newton polish per root, sorted by
// (re, im) for determinism.
inline std::vector<Complex> poly_roots(std::vector<Complex> coeffs) {
    double maxabs = 0.0;
    for (const auto& c : coeffs) maxabs = std::max(maxabs, std::abs(c));
    if (maxabs == 0.0) return {};
    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-13 * maxabs) coeffs.pop_back();
    int d = static_cast<int>(coeffs.size()) - 1;
    if (d <= 0) return {};

    std::vector<Complex> roots;
    if (d == 1) {
        roots.push_back(-coeffs[0] / coeffs[1]);
    } else {
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) comp(i, d - 1) = -coeffs[i] / coeffs[d];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        for (int i = 0; i < d; ++i) roots.push_back(es.eigenvalues()(i));
    }
    auto value = [&](Complex y) {
        Complex v = 0.0;
        for (int k = d; k >= 0; --k) v = v * y + coeffs[k];
        return v;
    };
    auto deriv = [&](Complex y) {
        Complex v = 0.0;
        for (int k = d; k >= 1; --k) v = v * y + coeffs[k] * static_cast<double>(k);
        return v;
    };
    for (auto& y : roots) {
        for (int it = 0; it < 2; ++it) {
            Complex dv = deriv(y);
            if (std::abs(dv) < 1e-300) break;
            y -= value(y) / dv;
        }
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

}  // namespace detail

struct QuadNode {
    P3 p;             // unit-norm point on the curve
    Complex coord;    // chart coordinate of the base sample
    Complex root;     // solved value of the forgotten coordinate (affine)
    double cell_area; // polar cell area in the chart coordinate
    double weight;    // FS area weight: (lambda / pi) * cell_area
    int chart;        // 0 or 1
    int branch;       // index into the sorted root list at this base sample
};

// Branched-projection quadrature over a plane curve. The chosen coordinate
// projection forgets one axis; the base P^1 is covered by two polar-grid
// charts (composite 2-point Gauss radial x uniform angular), and at each base
// sample the curve equation is solved for the forgotten coordinate.
class QuadratureGrid {
public:
    CPoly curve;      // max-coefficient-normalized
    CPoly partials[3];
    int resolution = 0;
    int forget_axis = 1;
    double split = 1.0;
    std::vector<QuadNode> nodes;

    double volume() const {
        KahanSum v;
        for (const auto& n : nodes) v.add(n.weight);
        return v.value();
    }

    // kept axes in increasing order; chart 0 fixes axes_kept.first = 1,
    // chart 1 fixes axes_kept.second = 1
    std::pair<int, int> kept_axes() const {
        int u = forget_axis == 0 ? 1 : 0;
        int v = forget_axis == 2 ? 1 : 2;
        return {u, v};
    }

    P3 assemble_point(int chart, Complex c, Complex y) const {
        auto [u, v] = kept_axes();
        P3 p{0.0, 0.0, 0.0};
        p[forget_axis] = y;
        if (chart == 0) {
            p[u] = 1.0;
            p[v] = c;
        } else {
            p[v] = 1.0;
            p[u] = c;
        }
        return p;
    }

    // univariate in the forgotten coordinate over base sample (chart, c)
    std::vector<Complex> fiber_coeffs(int chart, Complex c) const {
        auto [u, v] = kept_axes();
        int du = curve.degree();
        std::vector<Complex> coeffs(du + 1, Complex(0.0));
        Complex cu = (chart == 0) ? Complex(1.0) : c;
        Complex cv = (chart == 0) ? c : Complex(1.0);
        Complex pu[33], pv[33];
        pu[0] = pv[0] = 1.0;
        for (int i = 1; i <= du; ++i) pu[i] = pu[i - 1] * cu;
        for (int i = 1; i <= du; ++i) pv[i] = pv[i - 1] * cv;
        for (const auto& [e, coeff] : curve.terms())
            coeffs[e[forget_axis]] += coeff * pu[e[u]] * pv[e[v]];
        return coeffs;
    }

    // root of the fiber equation nearest to hint; used by finite-difference
    // stencils that follow a branch
    std::optional<std::pair<P3, Complex>> branch_point_near(int chart, Complex c,
                                                            Complex hint) const {
        auto roots = detail::poly_roots(fiber_coeffs(chart, c));
        if (roots.empty()) return std::nullopt;
        Complex best = roots[0];
        double bestd = std::abs(best - hint);
        for (const auto& r : roots) {
            double d = std::abs(r - hint);
            if (d < bestd) {
                bestd = d;
                best = r;
            }
        }
        return std::make_pair(normalized(assemble_point(chart, c, best)), best);
    }
};

namespace detail {

inline int pure_power_axis(const CPoly& curve) {
    int d = curve.degree();
    for (int axis : {1, 2, 0}) {
        Exponent e{0, 0, 0};
        e[axis] = d;
        if (std::abs(curve.coeff(e)) > 1e-9) return axis;
    }
    return -1;
}

inline int max_degree_axis(const CPoly& curve) {
    int best_axis = 1, best_deg = -1;
    for (int axis : {1, 2, 0}) {
        int deg = 0;
        for (const auto& [e, c] : curve.terms()) deg = std::max(deg, e[axis]);
        if (deg > best_deg) {
            best_deg = deg;
            best_axis = axis;
        }
    }
    require(best_deg >= 1, errc::curve_degenerate, "curve does not involve any variable");
    return best_axis;
}

}  // namespace detail

inline QuadratureGrid build_quadrature(const CPoly& curve_in, int resolution, double split = 1.0) {
    require(resolution >= 8, errc::resolution_too_low, "resolution must be at least 8");
    require(!curve_in.is_zero() && curve_in.degree() >= 1, errc::curve_degenerate,
            "curve must be a nonconstant polynomial");
    require(split > 0.05 && split < 20.0, errc::grid_spec_error, "chart split out of range");

    QuadratureGrid grid;
    double maxc = 0.0;
    for (const auto& [e, c] : curve_in.terms()) maxc = std::max(maxc, std::abs(c));
    grid.curve = curve_in * Complex(1.0 / maxc);
    for (int axis = 0; axis < 3; ++axis) grid.partials[axis] = derivative(grid.curve, axis);
    grid.resolution = resolution;
    grid.split = split;

    int axis = detail::pure_power_axis(grid.curve);
    grid.forget_axis = (axis >= 0) ? axis : detail::max_degree_axis(grid.curve);

    auto [u, v] = grid.kept_axes();
    FlatPoly dfy = FlatPoly::from(grid.partials[grid.forget_axis]);
    FlatPoly dfu = FlatPoly::from(grid.partials[u]);
    FlatPoly dfv = FlatPoly::from(grid.partials[v]);

    const int nr = resolution;
    const int ntheta = 2 * resolution;
    const double dtheta = 2.0 * std::numbers::pi / ntheta;
    // composite 2-point Gauss-Legendre in the radial parameter
    const double gauss_off = 0.5 / std::sqrt(3.0);

    std::size_t samples = 0, skipped = 0;
    for (int chart = 0; chart < 2; ++chart) {
        double radius = (chart == 0) ? split : 1.0 / split;
        double drho = 1.0 / nr;
        for (int ir = 0; ir < nr; ++ir) {
            for (int ig = 0; ig < 2; ++ig) {
                // cubically graded radius r = R * rho^3: branch points at the
                // chart center (ramification up to 3) pull back to smooth
                // radial integrands
                double rho = (ir + 0.5 + (ig == 0 ? -gauss_off : gauss_off)) * drho;
                double r = radius * rho * rho * rho;
                double jac_r = 3.0 * radius * rho * rho;
                double wr = drho / 2.0;
                for (int it = 0; it < ntheta; ++it) {
                    double theta = (it + 0.5) * dtheta;
                    Complex c = std::polar(r, theta);
                    double cell_area = r * jac_r * wr * dtheta;
                    ++samples;
                    auto roots = detail::poly_roots(grid.fiber_coeffs(chart, c));
                    if (roots.empty()) {
                        ++skipped;
                        continue;
                    }
                    bool sample_ok = false;
                    for (std::size_t b = 0; b < roots.size(); ++b) {
                        P3 affine = grid.assemble_point(chart, c, roots[b]);
                        Complex fy = dfy.eval(affine);
                        if (std::abs(fy) < 1e-8) continue;  // discriminant locus
                        Complex fc = (chart == 0) ? dfv.eval(affine) : dfu.eval(affine);
                        Complex yprime = -fc / fy;
                        double w2 = 1.0 + std::norm(c) + std::norm(roots[b]);
                        Complex wc = std::conj(c) + yprime * std::conj(roots[b]);
                        double lambda = (1.0 + std::norm(yprime)) / w2 - std::norm(wc) / (w2 * w2);
                        if (lambda < 0.0) lambda = 0.0;
                        QuadNode node;
                        node.p = normalized(affine);
                        node.coord = c;
                        node.root = roots[b];
                        node.cell_area = cell_area;
                        node.weight = lambda / std::numbers::pi * cell_area;
                        node.chart = chart;
                        node.branch = static_cast<int>(b);
                        grid.nodes.push_back(node);
                        sample_ok = true;
                    }
                    if (!sample_ok) ++skipped;
                }
            }
        }
    }
    // root clusters pinned to the discriminant at a large fraction of base
    // samples mean a repeated factor
    require(skipped < samples / 10, errc::curve_degenerate,
            "curve looks non-reduced: " + std::to_string(skipped) + " of " +
                std::to_string(samples) + " base samples sit on the discriminant locus");
    return grid;
}

inline QuadratureGrid fiber_grid(const Family& fam, std::complex<double> t, int resolution,
                                 double split = 1.0) {
    return build_quadrature(fam.fiber_poly(t), resolution, split);
}

// One grid per central component g_j, aligned with fam.components().
inline std::vector<QuadratureGrid> central_grids(const Family& fam, int resolution,
                                                 double split = 1.0) {
    std::vector<QuadratureGrid> grids;
    for (const auto& comp : fam.components())
        grids.push_back(build_quadrature(to_numeric(comp.g), resolution, split));
    return grids;
}

// Section values at every node (parallel over slots; order-independent).
inline std::vector<Complex> eval_on_nodes(const CPoly& s, const QuadratureGrid& grid) {
    FlatPoly f = FlatPoly::from(s);
    std::vector<Complex> out(grid.nodes.size());
    parallel_for(grid.nodes.size(), [&](std::size_t i) { out[i] = f.eval(grid.nodes[i].p); });
    return out;
}

inline Complex integrate_pair_values(const std::vector<Complex>& a, const std::vector<Complex>& b,
                                     const QuadratureGrid& grid) {
    KahanComplex acc;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        acc.add(grid.nodes[i].weight * a[i] * std::conj(b[i]));
    return acc.value();
}

// L2 pairing <s, s'> over the fiber carried by the grid.
template <class K>
Complex integrate_pair(const HomogPoly<K>& s, const HomogPoly<K>& sp, const QuadratureGrid& grid,
                       int m) {
    require(s.degree() == m && sp.degree() == m, errc::degree_mismatch,
            "integrate_pair needs both sections of degree m");
    CPoly sn, spn;
    if constexpr (std::is_same_v<K, GaussRational>) {
        sn = to_numeric(s);
        spn = to_numeric(sp);
    } else {
        sn = s;
        spn = sp;
    }
    return integrate_pair_values(eval_on_nodes(sn, grid), eval_on_nodes(spn, grid), grid);
}

// Integration with multiplicity over the central fiber: sum_j m_j int_{Y_j}.
inline double integrate_central(const Family& fam,
                                const std::function<double(const QuadNode&)>& integrand,
                                const std::vector<QuadratureGrid>& grids) {
    require(grids.size() == fam.components().size(), errc::grid_component_mismatch,
            "need one grid per central component");
    double total = 0.0;
    for (std::size_t j = 0; j < grids.size(); ++j) {
        KahanSum acc;
        for (const auto& node : grids[j].nodes) acc.add(node.weight * integrand(node));
        total += fam.components()[j].mult * acc.value();
    }
    return total;
}

}  // namespace fbk
