#include "gstl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gstl/errors.hpp"
#include "gstl/kernels.hpp"

namespace gstl {

DenseMatrix::DenseMatrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(index_t rows, index_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix data length " +
                             std::to_string(data_.size()) + " != " +
                             std::to_string(rows_) + " x " +
                             std::to_string(cols_));
    }
    if (!all_finite()) {
        throw ValueError("matrix entries must be finite");
    }
}

DenseMatrix DenseMatrix::identity(index_t n) {
    DenseMatrix m(n, n);
    for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double DenseMatrix::frobenius_norm() const {
    return std::sqrt(kernels::sumsq(data_.data(), data_.size()));
}

bool DenseMatrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
    if (!same_shape(other)) throw DimensionError("matrix += shape mismatch");
    kernels::axpy(data_.data(), 1.0, other.data(), data_.size());
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
    if (!same_shape(other)) throw DimensionError("matrix -= shape mismatch");
    kernels::axpy(data_.data(), -1.0, other.data(), data_.size());
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    kernels::scale(data_.data(), s, data_.size());
    return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (index_t i = 0; i < a.rows(); ++i) {
        for (index_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (index_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (index_t l = 0; l < a.cols(); ++l) {
            kernels::axpy(ci, a(i, l), b.row(l), b.cols());
        }
    }
    return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_at_b shape mismatch");
    DenseMatrix c(a.cols(), b.cols());
    for (index_t i = 0; i < a.rows(); ++i) {
        for (index_t l = 0; l < a.cols(); ++l) {
            kernels::axpy(c.row(l), a(i, l), b.row(i), b.cols());
        }
    }
    return c;
}

DenseMatrix gram_uu_t(const DenseMatrix& u) {
    const index_t d = u.rows();
    const index_t r = u.cols();
    DenseMatrix g(d, d);
    for (index_t i = 0; i < d; ++i) {
        for (index_t j = i; j < d; ++j) {
            const double v = kernels::dot(u.row(i), u.row(j), r);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

double matrix_dot(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionError("matrix_dot shape mismatch");
    return kernels::dot(a.data(), b.data(), a.size());
}

RowGroupNorms row_norms(const DenseMatrix& m) {
    RowGroupNorms out;
    out.norms.resize(m.rows());
    for (index_t i = 0; i < m.rows(); ++i) {
        out.norms[i] = std::sqrt(kernels::sumsq(m.row(i), m.cols()));
    }
    return out;
}

double l21_norm(const DenseMatrix& m) {
    double total = 0.0;
    for (index_t i = 0; i < m.rows(); ++i) {
        total += std::sqrt(kernels::sumsq(m.row(i), m.cols()));
    }
    return total;
}

DenseMatrix row_group_soft_threshold(const DenseMatrix& m, double t) {
    if (!(t >= 0.0)) throw ValueError("soft threshold requires t >= 0");
    DenseMatrix out = m;
    for (index_t i = 0; i < out.rows(); ++i) {
        const double norm = std::sqrt(kernels::sumsq(out.row(i), out.cols()));
        if (norm <= t) {
            // Covers the zero-norm row too: no division happens.
            std::fill(out.row(i), out.row(i) + out.cols(), 0.0);
        } else if (t > 0.0) {
            kernels::scale(out.row(i), 1.0 - t / norm, out.cols());
        }
    }
    return out;
}

std::vector<double> project_l1_ball_nonneg(std::span<const double> v,
                                           double radius) {
    if (!(radius >= 0.0)) throw ValueError("l1 projection requires radius >= 0");
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    std::vector<double> out(v.begin(), v.end());
    if (total <= radius) return out;
    if (radius == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }

    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumsum += sorted[k];
        const double cand = (cumsum - radius) / static_cast<double>(k + 1);
        if (sorted[k] - cand > 0.0) {
            theta = cand;
        } else {
            break;
        }
    }
    for (double& x : out) x = std::max(x - theta, 0.0);
    return out;
}

DenseMatrix project_l21_ball(const DenseMatrix& m, double radius) {
    if (!(radius >= 0.0)) throw ValueError("l21 projection requires radius >= 0");
    const RowGroupNorms norms = row_norms(m);
    const double total =
        std::accumulate(norms.norms.begin(), norms.norms.end(), 0.0);
    if (total <= radius + 1e-12) return m;  // already inside

    const std::vector<double> projected =
        project_l1_ball_nonneg(norms.norms, radius);
    DenseMatrix out = m;
    for (index_t i = 0; i < out.rows(); ++i) {
        if (projected[i] <= 0.0) {
            std::fill(out.row(i), out.row(i) + out.cols(), 0.0);
        } else if (norms.norms[i] > 0.0) {
            kernels::scale(out.row(i), projected[i] / norms.norms[i],
                           out.cols());
        }
    }
    return out;
}

}  // namespace gstl
