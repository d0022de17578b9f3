#include "gstl/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gstl/conditions.hpp"
#include "gstl/errors.hpp"
#include "gstl/io.hpp"
#include "gstl/kernels.hpp"
#include "gstl/rng.hpp"
#include "gstl/threads.hpp"

namespace gstl {

namespace {

constexpr double kActiveRowTol = 1e-10;
constexpr double kBallSlack = 1e-12;

void check_transfer_shape(const TransferProblem& p, const DenseMatrix& delta) {
    if (delta.rows() != p.u_p_hat.rows() || delta.cols() != p.u_p_hat.cols()) {
        throw DimensionError("delta must match u_p_hat's shape");
    }
    if (p.u_p_hat.rows() != p.gold_ensemble.dim()) {
        throw DimensionError("u_p_hat rows must equal ensemble dimension");
    }
    if (p.x_g.x.size() != p.gold_ensemble.size()) {
        throw DimensionError("gold observations length != ensemble size");
    }
}

}  // namespace

double transfer_smooth_loss(const TransferProblem& p, const DenseMatrix& delta) {
    check_transfer_shape(p, delta);
    const DenseMatrix u = p.u_p_hat + delta;
    std::vector<double> res = p.gold_ensemble.apply(gram_uu_t(u));
    for (index_t i = 0; i < res.size(); ++i) res[i] -= p.x_g.x[i];
    return kernels::sumsq(res.data(), res.size()) /
           static_cast<double>(res.size());
}

DenseMatrix transfer_smooth_gradient(const TransferProblem& p,
                                     const DenseMatrix& delta) {
    check_transfer_shape(p, delta);
    const DenseMatrix u = p.u_p_hat + delta;
    std::vector<double> res = p.gold_ensemble.apply(gram_uu_t(u));
    for (index_t i = 0; i < res.size(); ++i) res[i] -= p.x_g.x[i];
    const DenseMatrix g = p.gold_ensemble.adjoint(res);
    DenseMatrix grad = matmul(g + transpose(g), u);
    grad *= 2.0 / static_cast<double>(res.size());
    return grad;
}

TransferSolution fit_transfer(const TransferProblem& p,
                              const SolverConfig& cfg) {
    if (p.lambda < 0.0) throw ValueError("lambda must be >= 0");
    if (!(p.big_l > 0.0)) throw ValueError("big_l must be > 0");
    if (!(cfg.tol > 0.0) || !(cfg.line_search > 0.0) ||
        !(cfg.line_search < 1.0)) {
        throw ValueError("solver config: tol > 0 and line_search in (0,1)");
    }

    const index_t d = p.u_p_hat.rows();
    const index_t r = p.u_p_hat.cols();
    const double radius = 2.0 * p.big_l;

    TransferSolution sol;
    DenseMatrix delta(d, r);
    check_transfer_shape(p, delta);

    double f = transfer_smooth_loss(p, delta) + p.lambda * l21_norm(delta);
    if (!std::isfinite(f)) {
        throw DivergedError("non-finite composite objective at start", 0);
    }
    sol.objective_trace.push_back(f);

    double eta = cfg.step;
    for (index_t it = 1; it <= cfg.max_iters; ++it) {
        const DenseMatrix g = transfer_smooth_gradient(p, delta);
        if (!g.all_finite()) {
            throw DivergedError("non-finite gradient at iteration " +
                                    std::to_string(it),
                                it);
        }

        eta /= cfg.line_search;
        bool accepted = false;
        bool fixed_point = false;
        bool projected = false;
        DenseMatrix z;
        double f_try = f;
        for (int bt = 0; bt < 200; ++bt) {
            DenseMatrix step = delta;
            kernels::axpy(step.data(), -eta, g.data(), step.size());
            z = row_group_soft_threshold(step, eta * p.lambda);
            const double pre_proj = l21_norm(z);
            if (pre_proj > radius + kBallSlack) {
                z = project_l21_ball(z, radius);
                projected = true;
            } else {
                projected = false;
            }
            f_try = transfer_smooth_loss(p, z) + p.lambda * l21_norm(z);

            DenseMatrix diff = z - delta;
            const double move2 = kernels::sumsq(diff.data(), diff.size());
            if (move2 == 0.0) {
                // Prox fixed point at this step size; nothing can improve.
                accepted = true;
                fixed_point = true;
                break;
            }
            if (std::isfinite(f_try) &&
                f_try <= f - 1e-4 * move2 / (2.0 * eta)) {
                accepted = true;
                break;
            }
            eta *= cfg.line_search;
            if (eta < 1e-20) break;
        }
        if (!accepted) {
            sol.converged = true;
            break;
        }

        const double decrease = f - f_try;
        delta = std::move(z);
        f = f_try;
        sol.objective_trace.push_back(f);
        sol.iterations = it;
        if (projected) ++sol.projection_active_iters;
        if (fixed_point ||
            decrease <= cfg.tol * std::max(std::abs(f), 1e-300)) {
            sol.converged = true;
            break;
        }
    }

    const RowGroupNorms norms = row_norms(delta);
    for (index_t j = 0; j < d; ++j) {
        if (norms.norms[j] > kActiveRowTol) sol.active_rows.push_back(j);
    }
    sol.u_g_hat = p.u_p_hat + delta;
    sol.delta_hat = std::move(delta);
    return sol;
}

double lambda_from_theorem(index_t n_g, index_t d, index_t r, double beta_g,
                           double sigma_g, double sigma1_ug, double big_l,
                           double delta) {
    if (n_g == 0 || d == 0 || r == 0) {
        throw ValueError("lambda_from_theorem: counts must be positive");
    }
    if (!(beta_g > 0.0) || !(sigma_g > 0.0) || !(sigma1_ug > 0.0) ||
        !(big_l > 0.0)) {
        throw ValueError("lambda_from_theorem: scales must be positive");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ValueError("lambda_from_theorem: confidence must be in (0,1)");
    }
    const double nd = static_cast<double>(n_g);
    const double dd = static_cast<double>(d);
    const double rd = static_cast<double>(r);
    const double branch1 = std::sqrt(2048.0 * big_l * big_l * beta_g * sigma_g *
                                     sigma_g / nd * std::log(10.0 * dd * dd / delta));
    const double log_term = std::log(5.0 * dd / delta);
    const double branch2 =
        std::sqrt(256.0 * beta_g * sigma_g * sigma_g * sigma1_ug * sigma1_ug /
                  nd * (rd + 2.0 * std::sqrt(rd * log_term) + 2.0 * log_term));
    return std::max(branch1, branch2);
}

double lambda_from_theorem_estimated(const MeasurementEnsemble& gold_ensemble,
                                     index_t r, double sigma_g,
                                     double sigma1_ug, double big_l,
                                     double delta, index_t samples,
                                     std::uint64_t seed) {
    const double beta_g = estimate_smoothness(gold_ensemble, 1, samples, seed);
    return lambda_from_theorem(gold_ensemble.size(), gold_ensemble.dim(), r,
                               beta_g, sigma_g, sigma1_ug, big_l, delta);
}

CvResult cross_validate_lambda(const MeasurementEnsemble& gold_ensemble,
                               const Observations& x_g,
                               const DenseMatrix& u_p_hat, double big_l,
                               std::span<const double> grid, index_t folds,
                               const SolverConfig& cfg) {
    const index_t n = x_g.x.size();
    if (grid.empty()) throw ValueError("cross-validation grid is empty");
    if (folds < 2) throw ValueError("cross-validation needs folds >= 2");
    if (folds > n) throw ValueError("more folds than observations");

    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), index_t{0});
    Rng rng(derive_seed(cfg.seed, "cv_shuffle"));
    rng.shuffle(order);

    // Contiguous folds over the shuffled order.
    std::vector<std::vector<index_t>> fold_indices(folds);
    for (index_t f = 0; f < folds; ++f) {
        const index_t begin = f * n / folds;
        const index_t end = (f + 1) * n / folds;
        fold_indices[f].assign(order.begin() + begin, order.begin() + end);
        std::sort(fold_indices[f].begin(), fold_indices[f].end());
    }

    const index_t jobs = folds * grid.size();
    std::vector<double> losses(jobs, 0.0);
    parallel_for(jobs, [&](index_t job) {
        const index_t f = job % folds;
        const index_t gi = job / folds;

        std::vector<index_t> train;
        train.reserve(n - fold_indices[f].size());
        for (index_t g2 = 0; g2 < folds; ++g2) {
            if (g2 == f) continue;
            train.insert(train.end(), fold_indices[g2].begin(),
                         fold_indices[g2].end());
        }
        std::sort(train.begin(), train.end());

        const MeasurementEnsemble train_ens = gold_ensemble.subset(train);
        Observations train_obs;
        train_obs.sigma = x_g.sigma;
        train_obs.x.reserve(train.size());
        for (index_t idx : train) train_obs.x.push_back(x_g.x[idx]);

        const TransferProblem sub{train_ens, train_obs, u_p_hat, grid[gi],
                                  big_l};
        const TransferSolution fit = fit_transfer(sub, cfg);

        const MeasurementEnsemble test_ens =
            gold_ensemble.subset(fold_indices[f]);
        Observations test_obs;
        test_obs.sigma = x_g.sigma;
        for (index_t idx : fold_indices[f]) test_obs.x.push_back(x_g.x[idx]);
        const TransferProblem eval{test_ens, test_obs, u_p_hat, grid[gi],
                                   big_l};
        losses[job] = transfer_smooth_loss(eval, fit.delta_hat);
    });

    CvResult cv;
    double best_mean = 0.0;
    for (index_t gi = 0; gi < grid.size(); ++gi) {
        double mean = 0.0;
        for (index_t f = 0; f < folds; ++f) mean += losses[gi * folds + f];
        mean /= static_cast<double>(folds);
        for (index_t f = 0; f < folds; ++f) {
            cv.table.push_back(
                CvEntry{grid[gi], f, losses[gi * folds + f], mean});
        }
        const bool first = gi == 0;
        // Ties break toward the larger lambda (stronger regularization).
        if (first || mean < best_mean ||
            (mean == best_mean && grid[gi] > cv.best_lambda)) {
            best_mean = mean;
            cv.best_lambda = grid[gi];
        }
    }
    return cv;
}

std::string cv_table_csv(const CvResult& cv) {
    std::string out = "lambda,fold,heldout_loss,mean_loss\n";
    for (const CvEntry& e : cv.table) {
        out += io::fmt17(e.lambda);
        out += ',';
        out += std::to_string(e.fold);
        out += ',';
        out += io::fmt17(e.heldout_loss);
        out += ',';
        out += io::fmt17(e.mean_loss);
        out += '\n';
    }
    return out;
}

double default_big_l(const MeasurementEnsemble& gold_ensemble,
                     const Observations& x_g, const DenseMatrix& u_p_hat,
                     double lambda, const SolverConfig& cfg) {
    SolverConfig warm = cfg;
    warm.max_iters = std::min<index_t>(cfg.max_iters, 200);
    const TransferProblem p{gold_ensemble, x_g, u_p_hat, lambda, 1e18};
    const TransferSolution sol = fit_transfer(p, warm);
    return std::max(l21_norm(sol.delta_hat), 10.0);
}

}  // namespace gstl
