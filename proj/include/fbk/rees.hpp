#pragma once

#include <vector>

#include "fbk/exact_linalg.hpp"
#include "fbk/family.hpp"
#include "fbk/sections.hpp"

namespace fbk {

namespace detail {

// Equations of P(Z) = t^lambda Q(Z, t) + H(Z, t) F(Z, t) with Q and H of
// t-degree <= bound. The t^k rows for k >= lambda are solved identically by
// the free Q block (its columns form an identity on those rows once the
// bound is at least lambda), so the system reduces to the rows k < lambda:
//     P * delta_{k,0} = H_k F0 + H_{k-1} F1,   0 <= k < lambda,
// in the unknowns H_0 ... H_{lambda-1} in S_{m-d}.
struct ReesSystem {
    int m = 0;
    int lambda = 0;
    std::vector<Exponent> sm;       // monomial index of S_m rows
    std::vector<Exponent> smd;      // monomial basis of S_{m-d}
    QMat matrix;                    // (lambda * |S_m|) x (lambda * |S_{m-d}|)

    int rows() const { return static_cast<int>(matrix.size()); }
    int cols() const { return lambda * static_cast<int>(smd.size()); }
};

inline ReesSystem build_rees_system(const Family& fam, int m, int lambda, int t_bound) {
    require(lambda <= t_bound, errc::bound_exceeded,
            "t-degree bound " + std::to_string(t_bound) + " below the scanned level " +
                std::to_string(lambda));
    ReesSystem sys;
    sys.m = m;
    sys.lambda = lambda;
    sys.sm = monomials_of_degree(m);
    const int d = fam.degree();
    if (m >= d) sys.smd = monomials_of_degree(m - d);
    const int nm = static_cast<int>(sys.sm.size());
    const int nh = static_cast<int>(sys.smd.size());

    std::map<Exponent, int, GrlexDescending> index;
    for (int i = 0; i < nm; ++i) index[sys.sm[i]] = i;

    sys.matrix.assign(static_cast<std::size_t>(lambda) * nm,
                      QVec(static_cast<std::size_t>(lambda) * nh, GaussRational(0)));
    auto add_block = [&](int row_k, int col_k, const QPoly& f) {
        // contribution of H_{col_k} * f to the t^{row_k} equations
        for (int h = 0; h < nh; ++h) {
            QPoly prod = QPoly::monomial(sys.smd[h], GaussRational(1)) * f;
            for (const auto& [e, c] : prod.terms())
                sys.matrix[row_k * nm + index[e]][col_k * nh + h] += c;
        }
    };
    for (int k = 0; k < lambda; ++k) {
        add_block(k, k, fam.f0());
        if (k >= 1) add_block(k, k - 1, fam.f1());
    }
    return sys;
}

inline QVec rees_rhs(const ReesSystem& sys, const QPoly& p) {
    QVec b(sys.rows(), GaussRational(0));
    std::map<Exponent, int, GrlexDescending> index;
    for (std::size_t i = 0; i < sys.sm.size(); ++i) index[sys.sm[i]] = static_cast<int>(i);
    for (const auto& [e, c] : p.terms()) b[index.at(e)] = c;  // t^0 rows only
    return b;
}

inline int rees_t_bound(const Family& fam, int m) {
    auto [c, wt] = fam.cstar_weight_check();
    (void)c;
    int maxw = fam.weights()->max_abs_coordinate();
    return (maxw * m + wt - 1) / wt + 2;
}

}  // namespace detail

// Largest lambda >= 0 with P = t^lambda Q + H F solvable (Q, H polynomial in
// Z and t with bounded t-degree), scanning upward; P is the coset
// representative of a section of H^0(X_1, O(m)).
inline int lambda_max(const Family& fam, const QPoly& rep) {
    const int m = rep.degree();
    const int bound = detail::rees_t_bound(fam, m);
    if (rep.is_zero()) return bound;  // the zero section lies in every level
    int ceiling = bound;
    for (int lambda = 1; lambda <= ceiling; ++lambda) {
        auto sys = detail::build_rees_system(fam, m, lambda, bound);
        if (!solvable(sys.matrix, detail::rees_rhs(sys, rep))) return lambda - 1;
    }
    raise(errc::bound_exceeded,
          "lambda scan hit the linear-boundedness ceiling " + std::to_string(ceiling) +
              "; the family weights do not bound this filtration");
}

struct ReesFiltration {
    int m = 0;
    std::vector<int> lambdas;    // 0, 1, ..., top
    std::vector<int> filt_dims;  // dim F^lambda
    std::vector<int> gr_dims;    // dim F^lambda / F^{lambda+1}
    int central_h0 = 0;          // graded central dimension, for the consistency identity
    int c_low = 0, c_high = 0;   // linear-boundedness certificates

    int graded_total() const {
        int n = 0;
        for (int d : gr_dims) n += d;
        return n;
    }
};

// F^lambda over the whole space by the kernel method: feasible coefficient
// vectors v with sum v_k b_k = t^lambda Q + H F, computed by eliminating the
// H unknowns and reading off the constraints on v.
inline std::vector<QVec> rees_level(const Family& fam, const SectionSpace& space, int lambda,
                                    int t_bound) {
    const int n = space.dim();
    if (lambda == 0) return kernel_basis(QMat{}, n);
    auto sys = detail::build_rees_system(fam, space.m, lambda, t_bound);
    const int rows = sys.rows();
    const int hcols = sys.cols();
    // joint system [H | v] with the v block carrying -P_v on the t^0 rows
    QMat joint(rows, QVec(hcols + n, GaussRational(0)));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < hcols; ++c) joint[r][c] = sys.matrix[r][c];
    std::map<Exponent, int, GrlexDescending> index;
    for (std::size_t i = 0; i < sys.sm.size(); ++i) index[sys.sm[i]] = static_cast<int>(i);
    for (int k = 0; k < n; ++k)
        for (const auto& [e, c] : space.reps[k].terms()) joint[index.at(e)][hcols + k] = -c;

    rref(joint);
    // rows with zero H part constrain v alone
    QMat vrows;
    for (int r = 0; r < rows; ++r) {
        bool hzero = true;
        for (int c = 0; c < hcols && hzero; ++c) hzero = joint[r][c].is_zero();
        if (!hzero) continue;
        QVec row(joint[r].begin() + hcols, joint[r].end());
        bool vzero = true;
        for (const auto& c : row)
            if (!c.is_zero()) {
                vzero = false;
                break;
            }
        if (!vzero) vrows.push_back(std::move(row));
    }
    return kernel_basis(std::move(vrows), n);
}

// Graded dimensions of the induced Z-filtration on R_m = H^0(X_1, O(m)),
// with the central-dimension comparison hook.
inline ReesFiltration rees_gr_dims(const Family& fam, int m) {
    const int bound = detail::rees_t_bound(fam, m);
    SectionSpace space = section_basis(fam, m, FiberId::at(1.0));

    ReesFiltration out;
    out.m = m;
    out.c_low = 0;
    out.c_high = bound;
    std::vector<int> dims;
    dims.push_back(space.dim());  // lambda = 0
    for (int lambda = 1; lambda <= bound; ++lambda) {
        int dim = static_cast<int>(rees_level(fam, space, lambda, bound).size());
        dims.push_back(dim);
        if (dim == 0) break;
    }
    require(dims.back() == 0, errc::bound_exceeded,
            "filtration not exhausted at the linear-boundedness ceiling");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        out.lambdas.push_back(static_cast<int>(i));
        out.filt_dims.push_back(dims[i]);
        out.gr_dims.push_back(dims[i] - dims[i + 1]);
    }

    SectionSpace central = section_basis(fam, m, FiberId::central());
    Filtration cfilt = filtration(fam, order_table(fam, central), central);
    out.central_h0 = cfilt.total_graded_dim();
    return out;
}

}  // namespace fbk
