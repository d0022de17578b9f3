#include <doctest.h>

#include <cmath>

#include "gstl/align.hpp"
#include "gstl/errors.hpp"
#include "gstl/rng.hpp"
#include "oracles.hpp"

using namespace gstl;

TEST_CASE("procrustes of a matrix with itself is the identity") {
    Rng rng(1);
    const DenseMatrix u = oracle::gaussian_matrix(6, 3, rng);
    const DenseMatrix r = procrustes_rotation(u, u);
    CHECK(oracle::relative_matrix_error(r, DenseMatrix::identity(3)) < 1e-10);
    CHECK_THROWS_AS(procrustes_rotation(u, DenseMatrix(6, 2)), DimensionError);
}

TEST_CASE("procrustes recovers a planted rotation") {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        const DenseMatrix u_star = oracle::gaussian_matrix(7, 3, rng);
        const DenseMatrix r0 = oracle::random_orthogonal(3, rng);
        const DenseMatrix u_hat = matmul(u_star, r0);
        const DenseMatrix r = procrustes_rotation(u_hat, u_star);
        CHECK((u_hat - matmul(u_star, r)).frobenius_norm() < 1e-10);
    }
}

TEST_CASE("procrustes at r=1 agrees with the exhaustive sign search") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const DenseMatrix u_star = oracle::gaussian_matrix(5, 1, rng);
        const DenseMatrix u_hat = oracle::gaussian_matrix(5, 1, rng);
        const DenseMatrix r = procrustes_rotation(u_hat, u_star);

        const double res_plus = (u_hat - u_star).frobenius_norm();
        const double res_minus = (u_hat + u_star).frobenius_norm();
        const double best = std::min(res_plus, res_minus);
        const double got = (u_hat - matmul(u_star, r)).frobenius_norm();
        CHECK(got == doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("procrustes residual beats random orthogonal competitors") {
    Rng rng(4);
    const DenseMatrix u_star = oracle::gaussian_matrix(8, 3, rng);
    const DenseMatrix u_hat = oracle::gaussian_matrix(8, 3, rng);
    const DenseMatrix r = procrustes_rotation(u_hat, u_star);
    const double best = (u_hat - matmul(u_star, r)).frobenius_norm();
    int l21_better = 0;
    const double l21_at_best = l21_norm(u_hat - matmul(u_star, r));
    for (int t = 0; t < 1000; ++t) {
        const DenseMatrix cand = oracle::random_orthogonal(3, rng);
        CHECK(best <= (u_hat - matmul(u_star, cand)).frobenius_norm() + 1e-10);
        if (l21_norm(u_hat - matmul(u_star, cand)) < l21_at_best - 1e-12) {
            ++l21_better;
        }
    }
    // The frobenius-optimal rotation need not minimize the l2,1 error;
    // recorded, not asserted.
    WARN_MESSAGE(l21_better == 0, "random rotations beat the frobenius-optimal "
                                  "rotation in l2,1 in ",
                 l21_better, " of 1000 draws");
}

TEST_CASE("error_l21 examples") {
    Rng rng(5);
    const DenseMatrix u_star = oracle::gaussian_matrix(6, 2, rng);
    const DenseMatrix r0 = oracle::random_orthogonal(2, rng);
    CHECK(error_l21(matmul(u_star, r0), u_star) < 1e-9);

    const DenseMatrix u_hat = oracle::gaussian_matrix(6, 2, rng);
    CHECK(error_l21(u_hat, DenseMatrix(6, 2)) ==
          doctest::Approx(l21_norm(u_hat)).epsilon(1e-12));
}

TEST_CASE("error_l21 is invariant to separate rotations of both sides") {
    Rng rng(6);
    const DenseMatrix u_star = oracle::gaussian_matrix(5, 3, rng);
    const DenseMatrix u_hat = oracle::gaussian_matrix(5, 3, rng);
    const double base = error_l21(u_hat, u_star);
    for (int t = 0; t < 10; ++t) {
        const DenseMatrix ra = oracle::random_orthogonal(3, rng);
        const DenseMatrix rb = oracle::random_orthogonal(3, rng);
        const double rotated = error_l21(matmul(u_hat, ra), matmul(u_star, rb));
        CHECK(rotated == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("error_l21 zero iff alignable") {
    Rng rng(7);
    const DenseMatrix u_star = oracle::gaussian_matrix(5, 2, rng);
    const DenseMatrix r0 = oracle::random_orthogonal(2, rng);
    CHECK(error_l21(matmul(u_star, r0), u_star) < 1e-9);

    DenseMatrix off = matmul(u_star, r0);
    off(2, 1) += 0.5;
    CHECK(error_l21(off, u_star) > 1e-3);
}

TEST_CASE("frobenius theta error examples and invariance") {
    Rng rng(8);
    const DenseMatrix u_star = oracle::gaussian_matrix(5, 2, rng);
    const DenseMatrix r0 = oracle::random_orthogonal(2, rng);
    CHECK(error_frobenius_theta(matmul(u_star, r0), u_star) < 1e-10);
    CHECK(error_frobenius_theta(DenseMatrix(5, 2), u_star) ==
          doctest::Approx(gram_uu_t(u_star).frobenius_norm()).epsilon(1e-14));

    // Naive entrywise recomputation.
    const DenseMatrix u_hat = oracle::gaussian_matrix(5, 2, rng);
    double naive = 0.0;
    for (index_t i = 0; i < 5; ++i) {
        for (index_t j = 0; j < 5; ++j) {
            double a = 0.0, b = 0.0;
            for (index_t k = 0; k < 2; ++k) {
                a += u_hat(i, k) * u_hat(j, k);
                b += u_star(i, k) * u_star(j, k);
            }
            naive += (a - b) * (a - b);
        }
    }
    CHECK(error_frobenius_theta(u_hat, u_star) ==
          doctest::Approx(std::sqrt(naive)).epsilon(1e-12));

    // Exact invariance under rotations of each argument.
    const DenseMatrix ra = oracle::random_orthogonal(2, rng);
    const DenseMatrix rb = oracle::random_orthogonal(2, rng);
    CHECK(error_frobenius_theta(matmul(u_hat, ra), matmul(u_star, rb)) ==
          doctest::Approx(error_frobenius_theta(u_hat, u_star))
              .epsilon(1e-12));
}

TEST_CASE("align_report validates orthogonality") {
    Rng rng(9);
    const DenseMatrix u_star = oracle::gaussian_matrix(6, 3, rng);
    const DenseMatrix u_hat = oracle::gaussian_matrix(6, 3, rng);
    const AlignmentReport report = align_report(u_hat, u_star);
    CHECK(report.l21_error >= 0.0);
    CHECK(report.frob_theta_error >= 0.0);
    CHECK(report.rotation.rows() == 3);
}
