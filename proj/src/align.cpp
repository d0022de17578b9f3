#include "gstl/align.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "gstl/errors.hpp"

namespace gstl {

DenseMatrix procrustes_rotation(const DenseMatrix& u_hat,
                                const DenseMatrix& u_star) {
    if (!u_hat.same_shape(u_star)) {
        throw DimensionError("procrustes: shapes must match");
    }
    const index_t r = u_hat.cols();
    const DenseMatrix m = matmul_at_b(u_star, u_hat);  // U*^T U_hat, r x r

    Eigen::MatrixXd me(r, r);
    for (index_t i = 0; i < r; ++i) {
        for (index_t j = 0; j < r; ++j) me(i, j) = m(i, j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        me, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd re = svd.matrixU() * svd.matrixV().transpose();

    DenseMatrix rotation(r, r);
    for (index_t i = 0; i < r; ++i) {
        for (index_t j = 0; j < r; ++j) rotation(i, j) = re(i, j);
    }
    return rotation;
}

double error_l21(const DenseMatrix& u_hat, const DenseMatrix& u_star) {
    const DenseMatrix rotation = procrustes_rotation(u_hat, u_star);
    return l21_norm(u_hat - matmul(u_star, rotation));
}

double error_frobenius_theta(const DenseMatrix& u_hat,
                             const DenseMatrix& u_star) {
    if (u_hat.rows() != u_star.rows()) {
        throw DimensionError("theta error: row counts must match");
    }
    return (gram_uu_t(u_hat) - gram_uu_t(u_star)).frobenius_norm();
}

AlignmentReport align_report(const DenseMatrix& u_hat,
                             const DenseMatrix& u_star) {
    AlignmentReport report;
    report.rotation = procrustes_rotation(u_hat, u_star);
    report.l21_error = l21_norm(u_hat - matmul(u_star, report.rotation));
    report.frob_theta_error = error_frobenius_theta(u_hat, u_star);

    const DenseMatrix gram = matmul_at_b(report.rotation, report.rotation);
    for (index_t i = 0; i < gram.rows(); ++i) {
        for (index_t j = 0; j < gram.cols(); ++j) {
            const double expect = i == j ? 1.0 : 0.0;
            if (std::abs(gram(i, j) - expect) > 1e-10) {
                throw Error("procrustes produced a non-orthogonal rotation");
            }
        }
    }
    return report;
}

}  // namespace gstl
