#pragma once

#include "gstl/matrix.hpp"

namespace gstl {

// Rotation-invariant evaluation. U U^T identifies U only up to an
// orthogonal change of basis, so estimates are aligned to the truth by the
// orthogonal Procrustes rotation before measuring row-wise error.

struct AlignmentReport {
    DenseMatrix rotation;  // r x r orthogonal
    double l21_error = 0.0;
    double frob_theta_error = 0.0;
};

// argmin over orthogonal R of ||u_hat - u_star R||_F, via the SVD of
// u_star^T u_hat.
DenseMatrix procrustes_rotation(const DenseMatrix& u_hat,
                                const DenseMatrix& u_star);

// ||u_hat - u_star R||_{2,1} at the Frobenius-optimal rotation.
double error_l21(const DenseMatrix& u_hat, const DenseMatrix& u_star);

// ||u_hat u_hat^T - u_star u_star^T||_F; rotation-free by construction.
double error_frobenius_theta(const DenseMatrix& u_hat,
                             const DenseMatrix& u_star);

AlignmentReport align_report(const DenseMatrix& u_hat,
                             const DenseMatrix& u_star);

}  // namespace gstl
