#include <doctest.h>

#include <cmath>

#include "gstl/errors.hpp"
#include "gstl/matrix.hpp"
#include "gstl/rng.hpp"
#include "oracles.hpp"

using namespace gstl;

TEST_CASE("l21 norm basics") {
    CHECK(l21_norm(DenseMatrix::identity(2)) == doctest::Approx(2.0));
    CHECK(l21_norm(DenseMatrix(3, 4)) == 0.0);
    CHECK(l21_norm(DenseMatrix(2, 2, {3, 4, 0, 0})) == doctest::Approx(5.0));
}

TEST_CASE("l21 norm triangle inequality on random pairs") {
    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
        const DenseMatrix a = oracle::gaussian_matrix(6, 3, rng);
        const DenseMatrix b = oracle::gaussian_matrix(6, 3, rng);
        CHECK(l21_norm(a + b) <= l21_norm(a) + l21_norm(b) + 1e-12);
    }
}

TEST_CASE("matrix constructors reject bad input") {
    CHECK_THROWS_AS(DenseMatrix(2, 2, {1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, std::nan("")}), ValueError);
    CHECK_THROWS_AS(DenseMatrix(1, 1, {INFINITY}), ValueError);
}

TEST_CASE("row group soft threshold examples") {
    const DenseMatrix m(1, 2, {3, 4});
    CHECK(row_group_soft_threshold(m, 5.0) == DenseMatrix(1, 2));
    CHECK(row_group_soft_threshold(m, 0.0) == m);
    const DenseMatrix out = row_group_soft_threshold(m, 2.5);
    CHECK(out(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(out(0, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(row_group_soft_threshold(m, -0.1), ValueError);
}

TEST_CASE("soft threshold maps zero rows to zero rows") {
    DenseMatrix m(3, 2);
    m(1, 0) = 2.0;
    const DenseMatrix out = row_group_soft_threshold(m, 0.5);
    CHECK(out(0, 0) == 0.0);
    CHECK(out(2, 1) == 0.0);
    CHECK(out(1, 0) == doctest::Approx(1.5));
}

TEST_CASE("soft threshold output minimizes the prox objective") {
    Rng rng(23);
    const auto objective = [](const DenseMatrix& z, const DenseMatrix& m,
                              double t) {
        return t * l21_norm(z) + 0.5 * (z - m).frobenius_norm() *
                                     (z - m).frobenius_norm();
    };
    for (int trial = 0; trial < 5; ++trial) {
        const DenseMatrix m = oracle::gaussian_matrix(5, 3, rng);
        const double t = rng.uniform() * 2.0;
        const DenseMatrix p = row_group_soft_threshold(m, t);
        const double base = objective(p, m, t);
        for (int k = 0; k < 1000; ++k) {
            DenseMatrix cand = p;
            for (index_t i = 0; i < cand.size(); ++i) {
                cand.data()[i] += 1e-3 * rng.normal();
            }
            CHECK(objective(cand, m, t) >= base - 1e-12);
        }
    }
}

TEST_CASE("soft threshold commutes with right-orthogonal multiplication") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseMatrix m = oracle::gaussian_matrix(6, 4, rng);
        const DenseMatrix r = oracle::random_orthogonal(4, rng);
        const double t = rng.uniform();
        const DenseMatrix lhs = row_group_soft_threshold(matmul(m, r), t);
        const DenseMatrix rhs = matmul(row_group_soft_threshold(m, t), r);
        CHECK(oracle::relative_matrix_error(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("l21 ball projection examples") {
    Rng rng(5);
    const DenseMatrix m = oracle::gaussian_matrix(4, 2, rng);
    const double norm = l21_norm(m);
    CHECK(project_l21_ball(m, norm + 1.0) == m);
    CHECK(project_l21_ball(m, 0.0) == DenseMatrix(4, 2));
    CHECK_THROWS_AS(project_l21_ball(m, -1.0), ValueError);

    const DenseMatrix diag(2, 2, {3, 0, 0, 4});
    const DenseMatrix projected = project_l21_ball(diag, 5.0);
    CHECK(projected(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(projected(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(projected(0, 1) == 0.0);

    // Same answer from the independent numerical constrained minimizer.
    const DenseMatrix numerical = oracle::project_l21_numerical(diag, 5.0);
    CHECK(oracle::relative_matrix_error(projected, numerical) < 1e-10);
}

TEST_CASE("l21 ball projection vs numerical minimizer on random 3x2") {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseMatrix m = oracle::gaussian_matrix(3, 2, rng);
        const double radius = 0.2 + 2.0 * rng.uniform();
        const DenseMatrix got = project_l21_ball(m, radius);
        const DenseMatrix expect = oracle::project_l21_numerical(m, radius);
        double max_dev = 0.0;
        for (index_t k = 0; k < got.size(); ++k) {
            max_dev = std::max(max_dev,
                               std::abs(got.data()[k] - expect.data()[k]));
        }
        CHECK(max_dev < 1e-5);
        oracle::check_projection_certificate(m, radius, got, rng, 200);
    }
}

TEST_CASE("l21 ball projection is idempotent") {
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseMatrix m = oracle::gaussian_matrix(5, 3, rng);
        const double radius = rng.uniform() * 3.0;
        const DenseMatrix once = project_l21_ball(m, radius);
        const DenseMatrix twice = project_l21_ball(once, radius);
        CHECK((once - twice).frobenius_norm() < 1e-12);
        CHECK(l21_norm(once) <= radius + 1e-12);
    }
}

TEST_CASE("matmul helpers agree with naive loops") {
    Rng rng(61);
    const DenseMatrix a = oracle::gaussian_matrix(4, 3, rng);
    const DenseMatrix b = oracle::gaussian_matrix(3, 5, rng);
    const DenseMatrix c = matmul(a, b);
    for (index_t i = 0; i < 4; ++i) {
        for (index_t j = 0; j < 5; ++j) {
            double s = 0.0;
            for (index_t l = 0; l < 3; ++l) s += a(i, l) * b(l, j);
            CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
        }
    }

    const DenseMatrix at_b = matmul_at_b(a, a);
    const DenseMatrix expect = matmul(transpose(a), a);
    CHECK(oracle::relative_matrix_error(at_b, expect) < 1e-14);

    const DenseMatrix uu = gram_uu_t(a);
    CHECK(oracle::relative_matrix_error(uu, matmul(a, transpose(a))) < 1e-14);
}
