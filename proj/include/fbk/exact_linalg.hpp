#pragma once

#include <vector>

#include "fbk/rational.hpp"

namespace fbk {

using QVec = std::vector<GaussRational>;
using QMat = std::vector<QVec>;  // row-major, rectangular

// In-place reduced row echelon form with first-nonzero pivoting (fully
// deterministic; exact arithmetic needs no magnitude pivoting). Returns the
// pivot column of each pivot row in order.
inline std::vector<int> rref(QMat& a) {
    std::vector<int> pivots;
    if (a.empty()) return pivots;
    const int rows = static_cast<int>(a.size());
    const int cols = static_cast<int>(a[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i) {
            if (!a[i][c].is_zero()) {
                p = i;
                break;
            }
        }
        if (p < 0) continue;
        std::swap(a[r], a[p]);
        GaussRational inv = GaussRational(1) / a[r][c];
        for (int j = c; j < cols; ++j) a[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            GaussRational f = a[i][c];
            for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline int rank(QMat a) { return static_cast<int>(rref(a).size()); }

// Canonical basis of the null space of a (one vector per free column, free
// columns in ascending order).
inline std::vector<QVec> kernel_basis(QMat a, int cols) {
    if (a.empty()) {
        std::vector<QVec> basis;
        for (int c = 0; c < cols; ++c) {
            QVec v(cols, GaussRational(0));
            v[c] = GaussRational(1);
            basis.push_back(std::move(v));
        }
        return basis;
    }
    std::vector<int> pivots = rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<QVec> basis;
    for (int c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        QVec v(cols, GaussRational(0));
        v[c] = GaussRational(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Incremental exact span, used for greedy complement selection.
class SpanTracker {
public:
    explicit SpanTracker(int dim) : dim_(dim) {}

    int rank() const { return static_cast<int>(rows_.size()); }

    // Returns true (and absorbs v) when v enlarges the span.
    bool add(QVec v) {
        reduce(v);
        int lead = -1;
        for (int i = 0; i < dim_; ++i) {
            if (!v[i].is_zero()) {
                lead = i;
                break;
            }
        }
        if (lead < 0) return false;
        GaussRational inv = GaussRational(1) / v[lead];
        for (int i = lead; i < dim_; ++i) v[i] *= inv;
        rows_.push_back({lead, std::move(v)});
        return true;
    }

    bool contains(QVec v) const {
        reduce(v);
        for (const auto& c : v)
            if (!c.is_zero()) return false;
        return true;
    }

private:
    void reduce(QVec& v) const {
        for (const auto& [lead, row] : rows_) {
            if (v[lead].is_zero()) continue;
            GaussRational f = v[lead];
            for (int i = lead; i < dim_; ++i) v[i] -= f * row[i];
        }
    }

    int dim_;
    std::vector<std::pair<int, QVec>> rows_;
};

// Feasibility of A x = b over Q(i).
inline bool solvable(const QMat& a, const QVec& b) {
    QMat aug = a;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
    QMat plain = a;
    return rank(std::move(plain)) == rank(std::move(aug));
}

}  // namespace fbk
