#include "gstl/factor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "gstl/errors.hpp"
#include "gstl/kernels.hpp"
#include "gstl/rng.hpp"

namespace gstl {

namespace {

void check_factor_shape(const FactorProblem& p, const DenseMatrix& u) {
    if (u.rows() != p.ensemble.dim() || u.cols() != p.rank) {
        throw DimensionError("factor iterate must be d x r");
    }
    if (p.x.x.size() != p.ensemble.size()) {
        throw DimensionError("observations length != ensemble size");
    }
}

std::vector<double> residual(const FactorProblem& p, const DenseMatrix& u) {
    std::vector<double> res = p.ensemble.apply(gram_uu_t(u));
    for (index_t i = 0; i < res.size(); ++i) res[i] -= p.x.x[i];
    return res;
}

}  // namespace

double bm_objective(const FactorProblem& p, const DenseMatrix& u) {
    check_factor_shape(p, u);
    const std::vector<double> res = residual(p, u);
    return kernels::sumsq(res.data(), res.size()) /
           static_cast<double>(p.x.x.size());
}

DenseMatrix bm_gradient(const FactorProblem& p, const DenseMatrix& u) {
    check_factor_shape(p, u);
    const std::vector<double> res = residual(p, u);
    const DenseMatrix g = p.ensemble.adjoint(res);
    const DenseMatrix sym = g + transpose(g);
    DenseMatrix grad = matmul(sym, u);
    grad *= 2.0 / static_cast<double>(p.x.x.size());
    return grad;
}

DenseMatrix spectral_init(const FactorProblem& p) {
    if (p.x.x.size() != p.ensemble.size()) {
        throw DimensionError("observations length != ensemble size");
    }
    const index_t d = p.ensemble.dim();
    if (p.rank == 0 || p.rank > d) {
        throw ValueError("rank must satisfy 1 <= r <= d");
    }
    DenseMatrix surrogate = p.ensemble.adjoint(p.x.x);
    surrogate *= 1.0 / static_cast<double>(p.x.x.size());

    Eigen::MatrixXd sym(d, d);
    for (index_t i = 0; i < d; ++i) {
        for (index_t j = 0; j < d; ++j) {
            sym(i, j) = 0.5 * (surrogate(i, j) + surrogate(j, i));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);

    // Eigenvalues come out ascending; take the top r, clamped at zero.
    DenseMatrix u0(d, p.rank);
    for (index_t k = 0; k < p.rank; ++k) {
        const index_t src = d - 1 - k;
        const double lambda = std::max(eig.eigenvalues()(src), 0.0);
        const double scale = std::sqrt(lambda);
        for (index_t i = 0; i < d; ++i) {
            u0(i, k) = scale * eig.eigenvectors()(i, src);
        }
    }
    return u0;
}

namespace {

BmFit run_descent(const FactorProblem& p, const SolverConfig& cfg,
                  DenseMatrix u) {
    BmFit fit;
    double f = bm_objective(p, u);
    if (!std::isfinite(f)) {
        throw DivergedError("non-finite objective at initialization", 0);
    }
    fit.objective_trace.push_back(f);

    double eta = cfg.step;
    for (index_t it = 1; it <= cfg.max_iters; ++it) {
        const DenseMatrix g = bm_gradient(p, u);
        if (!g.all_finite()) {
            throw DivergedError("non-finite gradient at iteration " +
                                    std::to_string(it),
                                it);
        }
        const double gn2 = kernels::sumsq(g.data(), g.size());
        if (gn2 == 0.0) {
            fit.converged = true;
            break;
        }

        eta /= cfg.line_search;  // optimistic growth, then backtrack
        bool accepted = false;
        double f_try = f;
        DenseMatrix u_try;
        for (int bt = 0; bt < 200; ++bt) {
            u_try = u;
            kernels::axpy(u_try.data(), -eta, g.data(), u_try.size());
            f_try = bm_objective(p, u_try);
            if (std::isfinite(f_try) && f_try <= f - 1e-4 * eta * gn2) {
                accepted = true;
                break;
            }
            eta *= cfg.line_search;
            if (eta < 1e-20) break;
        }
        if (!accepted) {
            // No descent step exists at resolvable scales.
            fit.converged = true;
            break;
        }

        const double decrease = f - f_try;
        u = std::move(u_try);
        f = f_try;
        fit.objective_trace.push_back(f);
        fit.iterations = it;
        if (decrease <= cfg.tol * std::max(std::abs(f), 1e-300)) {
            fit.converged = true;
            break;
        }
    }

    fit.u = std::move(u);
    fit.objective = f;
    return fit;
}

}  // namespace

BmFit fit_burer_monteiro_from(const FactorProblem& p, const SolverConfig& cfg,
                              DenseMatrix init) {
    check_factor_shape(p, init);
    if (!(cfg.tol > 0.0) || !(cfg.line_search > 0.0) ||
        !(cfg.line_search < 1.0)) {
        throw ValueError("solver config: tol > 0 and line_search in (0,1)");
    }
    return run_descent(p, cfg, std::move(init));
}

BmFit fit_burer_monteiro(const FactorProblem& p, const SolverConfig& cfg) {
    if (p.rank == 0 || p.rank > p.ensemble.dim()) {
        throw ValueError("rank must satisfy 1 <= r <= d");
    }
    if (!(cfg.tol > 0.0) || !(cfg.line_search > 0.0) ||
        !(cfg.line_search < 1.0)) {
        throw ValueError("solver config: tol > 0 and line_search in (0,1)");
    }

    const DenseMatrix u0 = spectral_init(p);
    BmFit best = run_descent(p, cfg, u0);

    // Random restarts at the spectral initialization's scale.
    const double base_scale =
        u0.frobenius_norm() /
        std::sqrt(static_cast<double>(std::max<index_t>(u0.size(), 1)));
    const double sigma = base_scale > 0.0 ? base_scale : 1.0;
    for (index_t rs = 1; rs < cfg.restarts; ++rs) {
        DenseMatrix u(p.ensemble.dim(), p.rank);
        const RandomStream stream(
            hash_u64(derive_seed(cfg.seed, "bm_restart"), rs));
        for (index_t k = 0; k < u.size(); ++k) {
            u.data()[k] = sigma * stream.normal_at(k);
        }
        BmFit cand = run_descent(p, cfg, std::move(u));
        if (cand.objective < best.objective) best = std::move(cand);
    }
    return best;
}

}  // namespace gstl
