#pragma once

#include <optional>
#include <vector>

#include "minbrain/rational.hpp"

namespace minbrain {

// Pivot test: exact for rationals, 1e-9 for doubles.
template <class Scalar>
inline bool pivot_zero(const Scalar& v) {
    return v == Scalar(0);
}
template <>
inline bool pivot_zero<double>(const double& v) {
    return v > -1e-9 && v < 1e-9;
}

// Incremental column space: columns are reduced against the stored pivots;
// a column joins the basis when its residual is nonzero.
template <class Scalar>
class ColumnSpace {
public:
    // Returns true when the column increased the rank.
    bool insert(Vec<Scalar> column) {
        reduce(column);
        for (int i = 0; i < column.size(); ++i) {
            if (!pivot_zero(column(i))) {
                column /= column(i);
                pivots_.push_back(i);
                basis_.push_back(std::move(column));
                return true;
            }
        }
        return false;
    }

    bool contains(Vec<Scalar> column) const {
        reduce(column);
        for (int i = 0; i < column.size(); ++i)
            if (!pivot_zero(column(i))) return false;
        return true;
    }

    int rank() const { return static_cast<int>(basis_.size()); }

private:
    void reduce(Vec<Scalar>& v) const {
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            const Scalar& c = v(pivots_[k]);
            if (!pivot_zero(c)) v -= basis_[k] * c;
        }
    }

    std::vector<int> pivots_;
    std::vector<Vec<Scalar>> basis_;
};

// Exact solve of A x = b for a matrix with full column rank; nullopt when
// the system is inconsistent.
template <class Scalar>
std::optional<Vec<Scalar>> solve_full_column_rank(Mat<Scalar> a, Vec<Scalar> b) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    std::vector<int> pivot_row(cols, -1);
    int r = 0;
    for (int c = 0; c < cols; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i) {
            if (!pivot_zero(a(i, c))) {
                p = i;
                break;
            }
        }
        if (p < 0) return std::nullopt;    // rank-deficient
        a.row(p).swap(a.row(r));
        std::swap(b(p), b(r));
        for (int i = 0; i < rows; ++i) {
            if (i == r || pivot_zero(a(i, c))) continue;
            Scalar factor = a(i, c) / a(r, c);
            a.row(i) -= factor * a.row(r);
            b(i) -= factor * b(r);
        }
        pivot_row[c] = r;
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (!pivot_zero(b(i))) return std::nullopt;    // inconsistent
    Vec<Scalar> x(cols);
    for (int c = 0; c < cols; ++c) x(c) = b(pivot_row[c]) / a(pivot_row[c], c);
    return x;
}

}  // namespace minbrain
