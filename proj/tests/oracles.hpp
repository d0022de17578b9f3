#pragma once

// Test-only oracles. Everything here is written against the mathematical
// definitions, independently of the library's implementation paths, so the
// tests compare two different routes to the same quantity.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gstl/matrix.hpp"
#include "gstl/rng.hpp"
#include "gstl/sensing.hpp"

namespace oracle {

using gstl::DenseMatrix;
using gstl::index_t;

inline DenseMatrix gaussian_matrix(index_t rows, index_t cols, gstl::Rng& rng) {
    DenseMatrix m(rows, cols);
    for (index_t k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
    return m;
}

// Haar-ish random orthogonal matrix: QR of a Gaussian with sign fixing.
inline DenseMatrix random_orthogonal(index_t r, gstl::Rng& rng) {
    Eigen::MatrixXd g(r, r);
    for (index_t i = 0; i < r; ++i) {
        for (index_t j = 0; j < r; ++j) g(i, j) = rng.normal();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
    for (index_t j = 0; j < r; ++j) {
        if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    DenseMatrix out(r, r);
    for (index_t i = 0; i < r; ++i) {
        for (index_t j = 0; j < r; ++j) out(i, j) = q(i, j);
    }
    return out;
}

// Numerical minimizer of 1/2 ||Z - M||_F^2 subject to ||Z||_{2,1} <= radius,
// by scalar root-finding on the KKT multiplier: Z(t) shrinks each row norm
// by t, and t solves sum_j max(||m_j|| - t, 0) = radius.
inline DenseMatrix project_l21_numerical(const DenseMatrix& m, double radius) {
    std::vector<double> norms(m.rows());
    double total = 0.0;
    for (index_t j = 0; j < m.rows(); ++j) {
        double s = 0.0;
        for (index_t k = 0; k < m.cols(); ++k) s += m(j, k) * m(j, k);
        norms[j] = std::sqrt(s);
        total += norms[j];
    }
    if (total <= radius) return m;

    double lo = 0.0;
    double hi = *std::max_element(norms.begin(), norms.end());
    for (int it = 0; it < 200; ++it) {
        const double t = 0.5 * (lo + hi);
        double sum = 0.0;
        for (double nj : norms) sum += std::max(nj - t, 0.0);
        (sum > radius ? lo : hi) = t;
    }
    const double t = 0.5 * (lo + hi);

    DenseMatrix z(m.rows(), m.cols());
    for (index_t j = 0; j < m.rows(); ++j) {
        const double target = std::max(norms[j] - t, 0.0);
        if (target > 0.0 && norms[j] > 0.0) {
            const double f = target / norms[j];
            for (index_t k = 0; k < m.cols(); ++k) z(j, k) = f * m(j, k);
        }
    }
    return z;
}

// Constrained-optimality certificate for a claimed projection: z must be
// feasible and no feasible perturbation may get closer to m. Convexity
// turns this local check into a global one.
inline void check_projection_certificate(const DenseMatrix& m, double radius,
                                         const DenseMatrix& z, gstl::Rng& rng,
                                         int trials, double eps = 1e-4) {
    if (gstl::l21_norm(z) > radius + 1e-9) {
        throw std::runtime_error("projection certificate: infeasible point");
    }
    const double base = (z - m).frobenius_norm();
    for (int t = 0; t < trials; ++t) {
        DenseMatrix cand = z;
        for (index_t k = 0; k < cand.size(); ++k) {
            cand.data()[k] += eps * rng.normal();
        }
        if (gstl::l21_norm(cand) > radius) continue;
        if ((cand - m).frobenius_norm() < base - 1e-10) {
            throw std::runtime_error(
                "projection certificate: feasible point improves objective");
        }
    }
}

// Numerical solution of the constrained prox subproblem
//   min_z  t ||z||_{2,1} + 1/2 ||z - m||_F^2   s.t.  ||z||_{2,1} <= radius,
// from its KKT conditions: every row norm shrinks by a common amount
// s = t + mu with multiplier mu >= 0 found by bisection on feasibility.
inline DenseMatrix constrained_prox_numerical(const DenseMatrix& m, double t,
                                              double radius) {
    std::vector<double> norms(m.rows());
    for (index_t j = 0; j < m.rows(); ++j) {
        double ss = 0.0;
        for (index_t k = 0; k < m.cols(); ++k) ss += m(j, k) * m(j, k);
        norms[j] = std::sqrt(ss);
    }
    const auto total_at = [&](double shrink) {
        double sum = 0.0;
        for (double nj : norms) sum += std::max(nj - shrink, 0.0);
        return sum;
    };
    double shrink = t;
    if (total_at(t) > radius) {
        double lo = t;
        double hi = *std::max_element(norms.begin(), norms.end());
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (total_at(mid) > radius ? lo : hi) = mid;
        }
        shrink = 0.5 * (lo + hi);
    }
    DenseMatrix z(m.rows(), m.cols());
    for (index_t j = 0; j < m.rows(); ++j) {
        const double target = std::max(norms[j] - shrink, 0.0);
        if (target > 0.0 && norms[j] > 0.0) {
            const double f = target / norms[j];
            for (index_t k = 0; k < m.cols(); ++k) z(j, k) = f * m(j, k);
        }
    }
    return z;
}

// Numerical minimizer of
//   lambda ||u + v - a|| + (1/(2 eta)) (||u - u0||^2 + ||v - v0||^2)
// by projected gradient ascent on its concave dual
//   g(p) = <p, u0 + v0 - a> - eta ||p||^2  over ||p|| <= lambda,
// recovering u = u0 - eta p, v = v0 - eta p. The duality gap certifies the
// answer; the routine never forms a shrinkage factor.
inline void prox_sum_numerical(const std::vector<double>& u0,
                               const std::vector<double>& v0,
                               const std::vector<double>& a, double lambda,
                               double eta, std::vector<double>& u_out,
                               std::vector<double>& v_out) {
    const index_t r = u0.size();
    std::vector<double> m(r);
    for (index_t k = 0; k < r; ++k) m[k] = u0[k] + v0[k] - a[k];

    std::vector<double> p(r, 0.0);
    const double step = 0.45 / eta;  // safe for the 2*eta-smooth dual
    for (int it = 0; it < 20000; ++it) {
        double norm2 = 0.0;
        for (index_t k = 0; k < r; ++k) {
            p[k] += step * (m[k] - 2.0 * eta * p[k]);
            norm2 += p[k] * p[k];
        }
        const double norm = std::sqrt(norm2);
        if (norm > lambda) {
            const double f = lambda / norm;
            for (double& x : p) x *= f;
        }
    }

    u_out.resize(r);
    v_out.resize(r);
    for (index_t k = 0; k < r; ++k) {
        u_out[k] = u0[k] - eta * p[k];
        v_out[k] = v0[k] - eta * p[k];
    }

    // Duality-gap certificate.
    double primal = 0.0, dual = 0.0, s_norm2 = 0.0;
    for (index_t k = 0; k < r; ++k) {
        const double s = u_out[k] + v_out[k] - a[k];
        s_norm2 += s * s;
        primal += ((u_out[k] - u0[k]) * (u_out[k] - u0[k]) +
                   (v_out[k] - v0[k]) * (v_out[k] - v0[k])) /
                  (2.0 * eta);
        dual += p[k] * m[k] - eta * p[k] * p[k];
    }
    primal += lambda * std::sqrt(s_norm2);
    if (std::abs(primal - dual) > 1e-8 * (1.0 + std::abs(primal))) {
        throw std::runtime_error("prox-of-sum oracle: duality gap too large");
    }
}

// Naive objective: expand every sensing matrix and form
// sum_i (x_i - <A_i, U U^T>)^2 / n with plain loops.
inline double bm_objective_naive(const gstl::MeasurementEnsemble& ens,
                                 const std::vector<double>& x,
                                 const DenseMatrix& u) {
    const index_t d = ens.dim();
    DenseMatrix theta(d, d);
    for (index_t i = 0; i < d; ++i) {
        for (index_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (index_t k = 0; k < u.cols(); ++k) s += u(i, k) * u(j, k);
            theta(i, j) = s;
        }
    }
    double total = 0.0;
    for (index_t i = 0; i < ens.size(); ++i) {
        const DenseMatrix a = ens.sensing_matrix(i);
        double inner = 0.0;
        for (index_t p = 0; p < d; ++p) {
            for (index_t q = 0; q < d; ++q) inner += a(p, q) * theta(p, q);
        }
        const double diff = x[i] - inner;
        total += diff * diff;
    }
    return total / static_cast<double>(ens.size());
}

// Central finite differences of a scalar function of a matrix.
inline DenseMatrix finite_difference_gradient(
    const std::function<double(const DenseMatrix&)>& f, const DenseMatrix& x,
    double h = 1e-5) {
    DenseMatrix g(x.rows(), x.cols());
    DenseMatrix xp = x;
    for (index_t k = 0; k < x.size(); ++k) {
        const double orig = xp.data()[k];
        xp.data()[k] = orig + h;
        const double fp = f(xp);
        xp.data()[k] = orig - h;
        const double fm = f(xp);
        xp.data()[k] = orig;
        g.data()[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double relative_matrix_error(const DenseMatrix& got,
                                    const DenseMatrix& expect) {
    const double denom = expect.frobenius_norm();
    return (got - expect).frobenius_norm() / (denom > 0.0 ? denom : 1.0);
}

}  // namespace oracle
