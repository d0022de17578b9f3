#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gstl {

using index_t = std::size_t;

// Row-major dense real matrix; the carrier for embedding matrices, their
// group-sparse differences, and the d x d parameter matrices they factor.
// Constructors reject non-finite entries; in-place mutation through data()
// is the solvers' unchecked fast path.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(index_t rows, index_t cols);  // zero-filled
    DenseMatrix(index_t rows, index_t cols, std::vector<double> entries);

    static DenseMatrix identity(index_t n);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t size() const { return data_.size(); }

    double operator()(index_t i, index_t j) const {
        return data_[i * cols_ + j];
    }
    double& operator()(index_t i, index_t j) { return data_[i * cols_ + j]; }

    const double* row(index_t i) const { return data_.data() + i * cols_; }
    double* row(index_t i) { return data_.data() + i * cols_; }

    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }

    bool same_shape(const DenseMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    double frobenius_norm() const;
    bool all_finite() const;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double s);

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(DenseMatrix a, double s);

DenseMatrix transpose(const DenseMatrix& a);

// C = A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// C = A^T * B
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);

// U * U^T, symmetric d x d from a d x r factor.
DenseMatrix gram_uu_t(const DenseMatrix& u);

// <A, B> = sum_ij A_ij B_ij
double matrix_dot(const DenseMatrix& a, const DenseMatrix& b);

// Per-row l2 norms of a matrix.
struct RowGroupNorms {
    std::vector<double> norms;
};

RowGroupNorms row_norms(const DenseMatrix& m);

// ||M||_{2,1} = sum of row l2 norms.
double l21_norm(const DenseMatrix& m);

// Proximal operator of t * ||.||_{2,1}: row j maps to
// max(0, 1 - t/||M^j||) * M^j, with zero rows passed through untouched.
DenseMatrix row_group_soft_threshold(const DenseMatrix& m, double t);

// Euclidean projection of a non-negative vector onto the simplex-like
// l1 ball {v >= 0 : sum v <= radius}, by the exact sort-based rule.
std::vector<double> project_l1_ball_nonneg(std::span<const double> v,
                                           double radius);

// Euclidean projection onto {Z : ||Z||_{2,1} <= radius}: project the row
// norms onto the l1 ball, then rescale each row to its projected norm.
DenseMatrix project_l21_ball(const DenseMatrix& m, double radius);

}  // namespace gstl
