#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "gstl/matrix.hpp"
#include "gstl/sensing.hpp"

namespace gstl {

// Desk-scale empirical probes of the regularity conditions the estimator's
// guarantees rest on. Exact restricted constants are intractable, so these
// are sampled bounds: the returned alpha is an upper bound on the true
// restricted minimum and beta a lower bound on the true maximum.

struct ConditionEstimate {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double kappa_hat = 0.0;
    index_t samples = 0;
    std::uint64_t seed = 0;
};

// min / max over sampled unit-Frobenius rank-<=r matrices Z = A B^T of
// (1/n) ||A(Z)||^2 / ||Z||_F^2.
std::pair<double, double> estimate_rwc(const MeasurementEnsemble& ens,
                                       index_t r, index_t samples,
                                       std::uint64_t seed);

// max of the same ratio; for r == 1 every basis pair E_lk is probed too.
double estimate_smoothness(const MeasurementEnsemble& ens, index_t r,
                           index_t samples, std::uint64_t seed);

// min over cone-sampled shifts D of
//   (1/n) ||A(D U*^T + U* D^T + D D^T)||^2 * s / (sum_{j in J} ||D^j||)^2
// where the off-support rows are rescaled into the cone
//   sum_{j not in J} ||D^j|| <= cone_factor * sum_{j in J} ||D^j||.
double estimate_qcc(const MeasurementEnsemble& ens, const DenseMatrix& u_star,
                    std::span<const index_t> support, index_t samples,
                    std::uint64_t seed, double cone_factor = 7.0);

// Monte Carlo check of the Gaussian-ensemble restricted strong convexity
// inequality at identity covariance: fraction of (ensemble, shift) trials
// with ||A(W)|| / sqrt(n) >= ||W||_F / 4 - 3 C6 (2 sqrt(r/n) +
// 3 sqrt(log d / n)) ||D||_{2,1}, W = D U*^T + U* D^T + D D^T and
// C6 = 2 lbar + 2 sigma1(U*).
double check_rsc_gaussian_identity(index_t d, index_t r, index_t n,
                                   const DenseMatrix& u_star, double lbar,
                                   index_t trials, std::uint64_t seed);

// C6 of the identity-covariance case, exposed so reports can show it.
double rsc_c6_identity(double sigma1_ustar, double lbar);

// Largest singular value of a d x r factor (via the r x r Gram spectrum).
double sigma_max(const DenseMatrix& u);

}  // namespace gstl
