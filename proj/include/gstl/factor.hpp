#pragma once

#include <cstdint>
#include <vector>

#include "gstl/matrix.hpp"
#include "gstl/sensing.hpp"

namespace gstl {

// Unpenalized low-rank fit: min over U of (1/n) ||X - A(U U^T)||^2.
struct FactorProblem {
    const MeasurementEnsemble& ensemble;
    const Observations& x;
    index_t rank;
};

struct SolverConfig {
    index_t max_iters = 2000;
    double tol = 1e-9;        // relative objective-decrease stop
    double step = 0.05;       // initial step size
    double line_search = 0.5; // backtracking factor, in (0, 1)
    std::uint64_t seed = 0;
    index_t restarts = 1;
};

struct BmFit {
    DenseMatrix u;
    std::vector<double> objective_trace;  // objective at init, then per accepted step
    double objective = 0.0;
    bool converged = false;
    index_t iterations = 0;
};

double bm_objective(const FactorProblem& p, const DenseMatrix& u);

// Exact gradient of bm_objective; the adjoint image is symmetrized because
// the sensing matrices need not be symmetric while U U^T is.
DenseMatrix bm_gradient(const FactorProblem& p, const DenseMatrix& u);

// Top-r eigenpairs of sym((1/n) sum_i X_i A_i), negative eigenvalues
// clamped to zero.
DenseMatrix spectral_init(const FactorProblem& p);

// Gradient descent with backtracking Armijo line search from the spectral
// initialization, plus (restarts - 1) seeded random restarts; the run with
// the lowest final objective wins. The objective never increases across
// accepted steps.
BmFit fit_burer_monteiro(const FactorProblem& p, const SolverConfig& cfg);

// Same descent from a caller-supplied iterate (warm starts, restart studies).
BmFit fit_burer_monteiro_from(const FactorProblem& p, const SolverConfig& cfg,
                              DenseMatrix init);

}  // namespace gstl
