#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gstl/factor.hpp"
#include "gstl/matrix.hpp"
#include "gstl/sensing.hpp"

namespace gstl {

// Second-stage problem: minimize over the shift matrix D, with the l2,1
// ball ||D||_{2,1} <= 2 * big_l as the search region,
//   (1/n_g) ||X_g - A_g((U_p_hat + D)(U_p_hat + D)^T)||^2 + lambda ||D||_{2,1}.
struct TransferProblem {
    const MeasurementEnsemble& gold_ensemble;
    const Observations& x_g;
    const DenseMatrix& u_p_hat;
    double lambda;
    double big_l;
};

struct TransferSolution {
    DenseMatrix delta_hat;
    DenseMatrix u_g_hat;  // u_p_hat + delta_hat
    std::vector<double> objective_trace;  // composite objective per accepted step
    std::vector<index_t> active_rows;     // rows of delta_hat with norm > 1e-10
    index_t projection_active_iters = 0;  // accepted steps where the ball bound
    bool converged = false;
    index_t iterations = 0;
};

double transfer_smooth_loss(const TransferProblem& p, const DenseMatrix& delta);
DenseMatrix transfer_smooth_gradient(const TransferProblem& p,
                                     const DenseMatrix& delta);

// Proximal gradient from delta = 0: gradient step on the smooth loss, then
// the row-group soft threshold with eta * lambda, then projection onto the
// 2L ball; step sizes backtrack until the composite objective does not
// increase.
TransferSolution fit_transfer(const TransferProblem& p,
                              const SolverConfig& cfg);

// The theoretical penalty level: the larger of
//   sqrt((2048 L^2 beta_g sigma_g^2 / n_g) log(10 d^2 / delta))
//   sqrt((256 beta_g sigma_g^2 sigma1_ug^2 / n_g)
//        (r + 2 sqrt(r log(5d/delta)) + 2 log(5d/delta)))
double lambda_from_theorem(index_t n_g, index_t d, index_t r, double beta_g,
                           double sigma_g, double sigma1_ug, double big_l,
                           double delta);

// Same formula with the smoothness constant estimated from the ensemble's
// rank-one probes when the caller has no better value.
double lambda_from_theorem_estimated(const MeasurementEnsemble& gold_ensemble,
                                     index_t r, double sigma_g,
                                     double sigma1_ug, double big_l,
                                     double delta, index_t samples,
                                     std::uint64_t seed);

struct CvEntry {
    double lambda;
    index_t fold;
    double heldout_loss;
    double mean_loss;  // mean over folds for this lambda
};

struct CvResult {
    double best_lambda = 0.0;
    std::vector<CvEntry> table;
};

// Seeded shuffle, contiguous folds, mean held-out smooth loss per lambda;
// ties break toward the larger lambda. Fold x grid jobs run in parallel.
CvResult cross_validate_lambda(const MeasurementEnsemble& gold_ensemble,
                               const Observations& x_g,
                               const DenseMatrix& u_p_hat, double big_l,
                               std::span<const double> grid, index_t folds,
                               const SolverConfig& cfg);

std::string cv_table_csv(const CvResult& cv);

// max(||delta_warm||_{2,1}, 10) from a short unconstrained run.
double default_big_l(const MeasurementEnsemble& gold_ensemble,
                     const Observations& x_g, const DenseMatrix& u_p_hat,
                     double lambda, const SolverConfig& cfg);

}  // namespace gstl
