#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fbk/fibergeom.hpp"
#include "fbk/quadrature.hpp"
#include "fbk/sections.hpp"

namespace fbk {

// Graded central-fiber data bound together for evaluation: the coset space,
// order table, filtration, and per-(basis element, component) exact quotients
// s / g_j^{lambda m_j} feeding the h_0 machinery.
class CentralSystem {
public:
    CentralSystem(Family fam, int m) : CentralSystem(std::move(fam), m, std::nullopt) {}

    CentralSystem(Family fam, int m, std::optional<Filtration> filt_override)
        : family_(std::move(fam)), m_(m) {
        space_ = section_basis(family_, m_, FiberId::central());
        table_ = order_table(family_, space_);
        filt_ = filt_override ? std::move(*filt_override) : filtration(family_, table_, space_);
        const int q = family_.component_count();
        for (std::size_t b = 0; b < filt_.blocks.size(); ++b) {
            const auto& block = filt_.blocks[b];
            int begin = static_cast<int>(entries_.size());
            for (const auto& rep : block.reps) {
                Entry ent;
                ent.rep = rep;
                ent.rep_num = FlatPoly::from(to_numeric(rep));
                ent.quot.resize(q);
                for (int j = 0; j < q; ++j) {
                    const auto& comp = family_.components()[j];
                    if (!block.lambda.mul_is_integer(comp.mult)) continue;
                    int a = static_cast<int>(block.lambda.ceil_mul(comp.mult));
                    auto quotient = divide_exact(rep, poly_pow(comp.g, a));
                    require(quotient.has_value(), errc::order_mismatch,
                            "graded representative not divisible by g^{lambda m}");
                    ent.quot[j] = FlatPoly::from(to_numeric(*quotient));
                }
                entries_.push_back(std::move(ent));
            }
            block_ranges_.emplace_back(begin, static_cast<int>(entries_.size()));
            block_lambdas_.push_back(block.lambda);
        }
    }

    struct Entry {
        QPoly rep;
        FlatPoly rep_num;
        std::vector<std::optional<FlatPoly>> quot;  // per component; empty when lambda*m_j not integral
    };

    const Family& family() const { return family_; }
    int m() const { return m_; }
    int dim() const { return static_cast<int>(entries_.size()); }
    const SectionSpace& space() const { return space_; }
    const OrderTable& table() const { return table_; }
    const Filtration& filt() const { return filt_; }
    const std::vector<Entry>& entries() const { return entries_; }
    const std::vector<std::pair<int, int>>& block_ranges() const { return block_ranges_; }
    const std::vector<Frac>& block_lambdas() const { return block_lambdas_; }

private:
    Family family_;
    int m_;
    SectionSpace space_;
    OrderTable table_;
    Filtration filt_;
    std::vector<Entry> entries_;
    std::vector<std::pair<int, int>> block_ranges_;
    std::vector<Frac> block_lambdas_;
};

// Evaluation context shared by a Gram matrix and the bases derived from it.
struct SectionContext {
    explicit SectionContext(Family fam) : family(std::move(fam)) {}

    Family family;
    int m = 0;
    FiberId fiber;
    std::vector<QPoly> reps;
    std::vector<FlatPoly> reps_num;
    std::vector<Frac> exponents;  // per-row rescaling exponents (central ord0), zero when unrescaled
    std::shared_ptr<const CentralSystem> central;  // set on the central fiber
    CPoly fiber_curve;                             // normalized, off-center only

    int dim() const { return static_cast<int>(reps.size()); }
};

using SectionContextPtr = std::shared_ptr<const SectionContext>;

inline SectionContextPtr make_fiber_context(const Family& fam, std::vector<QPoly> reps,
                                            std::vector<Frac> exponents, std::complex<double> t,
                                            int m) {
    auto ctx = std::make_shared<SectionContext>(fam);
    ctx->m = m;
    ctx->fiber = FiberId::at(t);
    ctx->reps = std::move(reps);
    for (const auto& r : ctx->reps) {
        require(r.degree() == m, errc::degree_mismatch, "context representative of wrong degree");
        ctx->reps_num.push_back(FlatPoly::from(to_numeric(r)));
    }
    if (exponents.empty()) exponents.assign(ctx->reps.size(), Frac(0));
    require(exponents.size() == ctx->reps.size(), errc::degree_mismatch,
            "one rescaling exponent per representative");
    ctx->exponents = std::move(exponents);
    CPoly f = fam.fiber_poly(t);
    double maxc = 0.0;
    for (const auto& [e, c] : f.terms()) maxc = std::max(maxc, std::abs(c));
    ctx->fiber_curve = f * Complex(1.0 / maxc);
    return ctx;
}

inline SectionContextPtr make_fiber_context(const Family& fam, const SectionSpace& space,
                                            std::complex<double> t,
                                            const OrderTable* rescale = nullptr) {
    std::vector<Frac> exps;
    if (rescale) exps = rescale->ord0;
    return make_fiber_context(fam, space.reps, std::move(exps), t, space.m);
}

inline SectionContextPtr make_central_context(const Family& fam, int m,
                                              std::optional<Filtration> filt_override = std::nullopt) {
    auto ctx = std::make_shared<SectionContext>(fam);
    ctx->m = m;
    ctx->fiber = FiberId::central();
    auto sys = std::make_shared<CentralSystem>(fam, m, std::move(filt_override));
    for (std::size_t i = 0; i < sys->entries().size(); ++i) {
        ctx->reps.push_back(sys->entries()[i].rep);
        ctx->reps_num.push_back(sys->entries()[i].rep_num);
    }
    for (std::size_t b = 0; b < sys->block_ranges().size(); ++b) {
        auto [lo, hi] = sys->block_ranges()[b];
        for (int i = lo; i < hi; ++i) ctx->exponents.push_back(sys->block_lambdas()[b]);
    }
    ctx->central = std::move(sys);
    return ctx;
}

struct GramMatrix {
    SectionContextPtr ctx;
    Eigen::MatrixXcd entries;

    int dim() const { return static_cast<int>(entries.rows()); }
    const FiberId& fiber() const { return ctx->fiber; }

    // block structure: contiguous lambda-blocks at the center, one block off-center
    std::vector<std::pair<int, int>> blocks() const {
        if (ctx->central) return ctx->central->block_ranges();
        return {{0, dim()}};
    }

    double hermitian_defect() const {
        return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    }
};

// a_ik(t) = |t|^{-ord0(s_i) - ord0(s_k)} <s_i, s_k>_{L2, X_t}
inline GramMatrix gram_fiber(const SectionContextPtr& ctx, const QuadratureGrid& grid) {
    require(!ctx->fiber.is_central, errc::grid_component_mismatch,
            "fiber Gram needs an off-center context");
    const int n = ctx->dim();
    std::vector<std::vector<Complex>> values(n);
    for (int k = 0; k < n; ++k) {
        values[k].resize(grid.nodes.size());
        const FlatPoly& f = ctx->reps_num[k];
        auto& slot = values[k];
        parallel_for(grid.nodes.size(), [&](std::size_t i) { slot[i] = f.eval(grid.nodes[i].p); });
    }
    GramMatrix g;
    g.ctx = ctx;
    g.entries.resize(n, n);
    double abst = std::abs(ctx->fiber.t);
    for (int i = 0; i < n; ++i) {
        for (int k = i; k < n; ++k) {
            Complex v = integrate_pair_values(values[i], values[k], grid);
            double rescale = std::pow(abst, -(ctx->exponents[i].to_double() +
                                              ctx->exponents[k].to_double()));
            g.entries(i, k) = v * rescale;
            if (k != i) g.entries(k, i) = std::conj(g.entries(i, k));
        }
    }
    return g;
}

// Central Gram: lambda-block entries are the pairings h_{0,lambda}(s_i, s_k)
// integrated with multiplicity; cross-block entries are exactly zero (the
// graded decomposition is orthogonal).
inline GramMatrix gram_central(const SectionContextPtr& ctx,
                               const std::vector<QuadratureGrid>& grids) {
    require(ctx->central != nullptr, errc::grid_component_mismatch,
            "central Gram needs a central context");
    const CentralSystem& sys = *ctx->central;
    const Family& fam = sys.family();
    require(grids.size() == fam.components().size(), errc::grid_component_mismatch,
            "need one grid per central component");
    const int n = sys.dim();
    GramMatrix g;
    g.ctx = ctx;
    g.entries = Eigen::MatrixXcd::Zero(n, n);

    for (std::size_t b = 0; b < sys.block_ranges().size(); ++b) {
        auto [lo, hi] = sys.block_ranges()[b];
        Frac lambda = sys.block_lambdas()[b];
        for (std::size_t j = 0; j < grids.size(); ++j) {
            const auto& comp = fam.components()[j];
            if (!lambda.mul_is_integer(comp.mult)) continue;  // h_{0,lambda} = 0 on Y_j
            const auto& grid = grids[j];
            // |v_j|^{-2 lambda} at every node
            std::vector<double> unit(grid.nodes.size());
            parallel_for(grid.nodes.size(), [&](std::size_t i) {
                unit[i] = h0_unit_factor(fam, static_cast<int>(j), grid.nodes[i].p, lambda);
            });
            std::vector<std::vector<Complex>> qv(hi - lo);
            for (int k = lo; k < hi; ++k) {
                const FlatPoly& f = *sys.entries()[k].quot[j];
                auto& slot = qv[k - lo];
                slot.resize(grid.nodes.size());
                parallel_for(grid.nodes.size(),
                             [&](std::size_t i) { slot[i] = f.eval(grid.nodes[i].p); });
            }
            for (int i = lo; i < hi; ++i) {
                for (int k = i; k < hi; ++k) {
                    KahanComplex acc;
                    const auto& a = qv[i - lo];
                    const auto& bb = qv[k - lo];
                    for (std::size_t nidx = 0; nidx < grid.nodes.size(); ++nidx)
                        acc.add(grid.nodes[nidx].weight * unit[nidx] * a[nidx] *
                                std::conj(bb[nidx]));
                    g.entries(i, k) += static_cast<double>(comp.mult) * acc.value();
                    if (k != i) g.entries(k, i) = std::conj(g.entries(i, k));
                }
            }
        }
    }
    return g;
}

enum class OrthoMethod { eigen, triangular };

inline OrthoMethod ortho_method_from_string(const std::string& s) {
    if (s == "eigen") return OrthoMethod::eigen;
    if (s == "triangular") return OrthoMethod::triangular;
    raise(errc::grid_spec_error, "unknown orthonormalization method " + s);
}

// L2-orthonormal basis: coefficient matrix B with B G B^* = I; rows are the
// orthonormal sections over the context representatives (with any off-center
// rescaling folded in, so evaluation needs no further t-powers).
struct BergmanBasis {
    SectionContextPtr ctx;
    Eigen::MatrixXcd coeff;

    int dim() const { return static_cast<int>(coeff.rows()); }
};

inline BergmanBasis orthonormalize(const GramMatrix& g, OrthoMethod method = OrthoMethod::eigen) {
    const int n = g.dim();
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
    for (auto [lo, hi] : g.blocks()) {
        int nb = hi - lo;
        Eigen::MatrixXcd gb = g.entries.block(lo, lo, nb, nb);
        gb = (gb + gb.adjoint().eval()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gb);
        double emin = es.eigenvalues().minCoeff();
        double emax = es.eigenvalues().maxCoeff();
        require(emax > 0 && emin > 1e-10 * emax, errc::not_positive_definite,
                "Gram block spectrum [" + std::to_string(emin) + ", " + std::to_string(emax) +
                    "] is not safely positive");
        if (method == OrthoMethod::eigen) {
            b.block(lo, lo, nb, nb) =
                es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                es.eigenvectors().adjoint();
        } else {
            Eigen::LLT<Eigen::MatrixXcd> llt(gb);
            require(llt.info() == Eigen::Success, errc::not_positive_definite,
                    "Cholesky factorization failed");
            b.block(lo, lo, nb, nb) = llt.matrixL()
                                          .solve(Eigen::MatrixXcd::Identity(nb, nb));
        }
    }
    BergmanBasis basis;
    basis.ctx = g.ctx;
    if (!g.ctx->central && !g.ctx->exponents.empty()) {
        Eigen::VectorXcd d(n);
        double abst = std::abs(g.ctx->fiber.t);
        for (int i = 0; i < n; ++i) d(i) = std::pow(abst, -g.ctx->exponents[i].to_double());
        basis.coeff = b * d.asDiagonal();
    } else {
        basis.coeff = b;
    }
    return basis;
}

namespace detail {

// rho at a unit point already known to lie on the fiber
inline double rho_unit(const BergmanBasis& basis, const P3& p) {
    const auto& ctx = *basis.ctx;
    const int n = ctx.dim();
    Eigen::VectorXcd v(n);
    if (!ctx.central) {
        for (int k = 0; k < n; ++k) v(k) = ctx.reps_num[k].eval(p);
        return (basis.coeff * v).squaredNorm();
    }
    const CentralSystem& sys = *ctx.central;
    int j = component_of(sys.family(), p);
    double total = 0.0;
    for (std::size_t b = 0; b < sys.block_ranges().size(); ++b) {
        auto [lo, hi] = sys.block_ranges()[b];
        Frac lambda = sys.block_lambdas()[b];
        const auto& comp = sys.family().components()[j];
        if (!lambda.mul_is_integer(comp.mult)) continue;
        Eigen::VectorXcd q(hi - lo);
        for (int k = lo; k < hi; ++k) q(k - lo) = sys.entries()[k].quot[j]->eval(p);
        double unit = h0_unit_factor(sys.family(), j, p, lambda);
        total += unit * (basis.coeff.block(lo, lo, hi - lo, hi - lo) * q).squaredNorm();
    }
    return total;
}

}  // namespace detail

// Fiberwise Bergman kernel at a point: sup over L2-unit sections of the
// squared pointwise norm, computed as the diagonal sum of the orthonormal
// basis. Central evaluation uses the graded h_0 pairing per lambda-block.
inline double rho(const BergmanBasis& basis, const P3& x) {
    P3 p = normalized(x);
    const auto& ctx = *basis.ctx;
    if (!ctx.central) {
        require(std::abs(FlatPoly::from(ctx.fiber_curve).eval(p)) <= 1e-9, errc::point_off_fiber,
                "point does not satisfy the fiber equation");
    }
    return detail::rho_unit(basis, p);
}

// rho at every node of a grid (off-center: the fiber grid; central: the grid
// of component j).
inline std::vector<double> rho_on_grid(const BergmanBasis& basis, const QuadratureGrid& grid,
                                       int component = -1) {
    const auto& ctx = *basis.ctx;
    const std::size_t nn = grid.nodes.size();
    std::vector<double> out(nn);
    if (!ctx.central) {
        parallel_for(nn, [&](std::size_t i) { out[i] = detail::rho_unit(basis, grid.nodes[i].p); });
        return out;
    }
    require(component >= 0, errc::grid_component_mismatch,
            "central rho_on_grid needs the component index");
    const CentralSystem& sys = *ctx.central;
    const auto& comp = sys.family().components()[component];
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t b = 0; b < sys.block_ranges().size(); ++b) {
        auto [lo, hi] = sys.block_ranges()[b];
        Frac lambda = sys.block_lambdas()[b];
        if (!lambda.mul_is_integer(comp.mult)) continue;
        std::vector<double> part(nn);
        parallel_for(nn, [&](std::size_t i) {
            Eigen::VectorXcd q(hi - lo);
            for (int k = lo; k < hi; ++k) q(k - lo) = sys.entries()[k].quot[component]->eval(grid.nodes[i].p);
            double unit = h0_unit_factor(sys.family(), component, grid.nodes[i].p, lambda);
            part[i] = unit * (basis.coeff.block(lo, lo, hi - lo, hi - lo) * q).squaredNorm();
        });
        for (std::size_t i = 0; i < nn; ++i) out[i] += part[i];
    }
    return out;
}

// Bergman basis for a fiber, assembling the space, grid(s), Gram and
// orthonormalization in one step.
inline BergmanBasis bergman_basis(const Family& fam, int m, const FiberId& fiber, int resolution,
                                  OrthoMethod method = OrthoMethod::eigen) {
    if (fiber.is_central) {
        auto ctx = make_central_context(fam, m);
        return orthonormalize(gram_central(ctx, central_grids(fam, resolution)), method);
    }
    SectionSpace space = section_basis(fam, m, fiber);
    auto ctx = make_fiber_context(fam, space, fiber.t);
    return orthonormalize(gram_fiber(ctx, fiber_grid(fam, fiber.t, resolution)), method);
}

// integral of rho over the fiber (with multiplicity at the center); equals
// h^0 up to quadrature error
inline double rho_total_mass(const Family& fam, const BergmanBasis& basis, int resolution) {
    if (!basis.ctx->central) {
        QuadratureGrid grid = fiber_grid(fam, basis.ctx->fiber.t, resolution);
        auto values = rho_on_grid(basis, grid);
        KahanSum acc;
        for (std::size_t i = 0; i < values.size(); ++i) acc.add(grid.nodes[i].weight * values[i]);
        return acc.value();
    }
    auto grids = central_grids(fam, resolution);
    double total = 0.0;
    for (std::size_t j = 0; j < grids.size(); ++j) {
        auto values = rho_on_grid(basis, grids[j], static_cast<int>(j));
        KahanSum acc;
        for (std::size_t i = 0; i < values.size(); ++i) acc.add(grids[j].nodes[i].weight * values[i]);
        total += fam.components()[j].mult * acc.value();
    }
    return total;
}

// phi_m(t) = int_{X_t} (1/m) |log rho_m| omega, with multiplicity at the center.
inline double phi(const Family& fam, int m, const FiberId& fiber, int resolution,
                  OrthoMethod method = OrthoMethod::eigen) {
    require(m >= 1, errc::degree_mismatch, "phi needs m >= 1");
    BergmanBasis basis = bergman_basis(fam, m, fiber, resolution, method);
    auto log_term = [&](double r) { return std::abs(std::log(std::max(r, 1e-300))); };
    if (!fiber.is_central) {
        QuadratureGrid grid = fiber_grid(fam, fiber.t, resolution);
        auto values = rho_on_grid(basis, grid);
        KahanSum acc;
        for (std::size_t i = 0; i < values.size(); ++i)
            acc.add(grid.nodes[i].weight * log_term(values[i]));
        return acc.value() / m;
    }
    auto grids = central_grids(fam, resolution);
    double total = 0.0;
    for (std::size_t j = 0; j < grids.size(); ++j) {
        auto values = rho_on_grid(basis, grids[j], static_cast<int>(j));
        KahanSum acc;
        for (std::size_t i = 0; i < values.size(); ++i)
            acc.add(grids[j].nodes[i].weight * log_term(values[i]));
        total += fam.components()[j].mult * acc.value();
    }
    return total / m;
}

struct ProbeRow {
    std::complex<double> t;
    double rho_mean = 0.0;
    double rho_central = 0.0;
    double gap = 0.0;
};

// Tracks x0 into nearby fibers and compares the fiber kernel at the tracked
// preimages with the central kernel at x0.
inline std::vector<ProbeRow> continuity_probe(const Family& fam, int m, const P3& x0,
                                              const std::vector<std::complex<double>>& ts,
                                              int resolution,
                                              OrthoMethod method = OrthoMethod::eigen) {
    BergmanBasis central = bergman_basis(fam, m, FiberId::central(), resolution, method);
    double rho_c = rho(central, x0);
    std::vector<ProbeRow> rows;
    for (auto t : ts) {
        BergmanBasis basis = bergman_basis(fam, m, FiberId::at(t), resolution, method);
        auto pts = track_points(fam, x0, t);
        double mean = 0.0;
        for (const auto& p : pts) mean += detail::rho_unit(basis, p);
        mean /= static_cast<double>(pts.size());
        rows.push_back({t, mean, rho_c, std::abs(mean - rho_c)});
    }
    return rows;
}

// --- Fubini-Study current pairings -----------------------------------------
//
// (i/2pi) ddbar integrals along the fiber, with the Laplacian of the pulled
// back integrand evaluated per node by central finite differences (step 1e-4)
// in the node's chart coordinate along its branch.

namespace detail {

constexpr double kStencilStep = 1e-4;

// d^2/(dc dcbar) of f along the branch through the node; nullopt when the
// stencil would jump branches near the discriminant
inline std::optional<double> branch_laplacian(const QuadratureGrid& grid, const QuadNode& node,
                                              const std::function<double(const P3&)>& f) {
    const double h = kStencilStep;
    Complex c = node.coord;
    double center = f(node.p);
    double sum = 0.0;
    for (Complex dc : {Complex(h, 0), Complex(-h, 0), Complex(0, h), Complex(0, -h)}) {
        auto moved = grid.branch_point_near(node.chart, c + dc, node.root);
        if (!moved) return std::nullopt;
        // a displaced root far from the node's root means the stencil jumped
        // branches near the discriminant; drop the node
        if (std::abs(moved->second - node.root) > 0.1 * (1.0 + std::abs(node.root)))
            return std::nullopt;
        sum += f(moved->first);
    }
    return (sum - 4.0 * center) / (4.0 * h * h);
}

}  // namespace detail

// int_fiber f * (i/2pi) ddbar g  via the per-node stencil Laplacian of g.
inline double ddbar_pair_integral(const QuadratureGrid& grid,
                                  const std::function<double(const P3&)>& f,
                                  const std::function<double(const P3&)>& g) {
    std::vector<double> contrib(grid.nodes.size(), 0.0);
    parallel_for(grid.nodes.size(), [&](std::size_t i) {
        const auto& node = grid.nodes[i];
        auto lap = detail::branch_laplacian(grid, node, g);
        if (!lap) return;
        contrib[i] = f(node.p) * (*lap) * 2.0 / (2.0 * std::numbers::pi) * node.cell_area;
    });
    KahanSum acc;
    for (double v : contrib) acc.add(v);
    return acc.value();
}

using TestFunction = std::function<double(const P3&)>;

inline TestFunction alpha_one() {
    return [](const P3&) { return 1.0; };
}
// squared modulus of the first homogeneous coordinate at unit norm
inline TestFunction alpha_x2() {
    return [](const P3& p) { return std::norm(p[0]); };
}

// -(1/m) int log(rho_m) (i/2pi) ddbar alpha, the current pairing
// int (c1(h) - omega_{FS,m}/m) ^ alpha on the smooth fiber X_t
inline double fs_current_pairing(const Family& fam, int m, std::complex<double> t,
                                 const TestFunction& alpha, int resolution,
                                 OrthoMethod method = OrthoMethod::eigen) {
    BergmanBasis basis = bergman_basis(fam, m, FiberId::at(t), resolution, method);
    QuadratureGrid grid = fiber_grid(fam, t, resolution);
    auto logrho = [&](const P3& p) {
        return std::log(std::max(detail::rho_unit(basis, p), 1e-300));
    };
    return -ddbar_pair_integral(grid, logrho, alpha) / m;
}

// same pairing moved to the other side by parts: -(1/m) int alpha (i/2pi)
// ddbar log rho; used as the integration-by-parts oracle and, with alpha = 1,
// as the closed-fiber total mass of (c1 - omega_FS/m)
inline double fs_current_pairing_by_parts(const Family& fam, int m, std::complex<double> t,
                                          const TestFunction& alpha, int resolution,
                                          OrthoMethod method = OrthoMethod::eigen) {
    BergmanBasis basis = bergman_basis(fam, m, FiberId::at(t), resolution, method);
    QuadratureGrid grid = fiber_grid(fam, t, resolution);
    auto logrho = [&](const P3& p) {
        return std::log(std::max(detail::rho_unit(basis, p), 1e-300));
    };
    return -ddbar_pair_integral(grid, alpha, logrho) / m;
}

inline double fs_current_total_mass(const Family& fam, int m, std::complex<double> t,
                                    int resolution, OrthoMethod method = OrthoMethod::eigen) {
    return fs_current_pairing_by_parts(fam, m, t, alpha_one(), resolution, method);
}

}  // namespace fbk
