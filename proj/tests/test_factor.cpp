#include <doctest.h>

#include <cmath>

#include "gstl/align.hpp"
#include "gstl/errors.hpp"
#include "gstl/factor.hpp"
#include "gstl/kernels.hpp"
#include "gstl/rng.hpp"
#include "oracles.hpp"

using namespace gstl;

namespace {

// Noiseless planted instance: X = A(U* U*^T).
struct Planted {
    MeasurementEnsemble ens;
    Observations obs;
    DenseMatrix u_star;
};

Planted planted_instance(index_t d, index_t r, index_t n, std::uint64_t seed,
                         double sigma = 0.0) {
    Rng rng(seed);
    Planted out{MeasurementEnsemble::gaussian(d, n, seed + 1),
                Observations{},
                oracle::gaussian_matrix(d, r, rng)};
    out.obs.x = out.ens.apply(gram_uu_t(out.u_star));
    out.obs.sigma = sigma;
    for (double& x : out.obs.x) x += sigma * rng.normal();
    return out;
}

}  // namespace

TEST_CASE("bm objective zero at exact fit and ||x||^2/n at zero") {
    const Planted inst = planted_instance(6, 2, 30, 3);
    const FactorProblem p{inst.ens, inst.obs, 2};
    CHECK(bm_objective(p, inst.u_star) == doctest::Approx(0.0));

    const DenseMatrix zero(6, 2);
    const double expect =
        kernels::sumsq(inst.obs.x.data(), inst.obs.x.size()) / 30.0;
    CHECK(bm_objective(p, zero) == doctest::Approx(expect).epsilon(1e-14));

    CHECK_THROWS_AS(bm_objective(p, DenseMatrix(6, 3)), DimensionError);
}

TEST_CASE("bm objective matches the naive double-loop expansion") {
    const Planted inst = planted_instance(5, 2, 12, 9, 0.5);
    const FactorProblem p{inst.ens, inst.obs, 2};
    Rng rng(10);
    for (int t = 0; t < 5; ++t) {
        const DenseMatrix u = oracle::gaussian_matrix(5, 2, rng);
        const double got = bm_objective(p, u);
        const double naive = oracle::bm_objective_naive(inst.ens, inst.obs.x, u);
        CHECK(got == doctest::Approx(naive).epsilon(1e-12));
    }
}

TEST_CASE("bm gradient matches central finite differences") {
    Rng rng(21);
    for (int t = 0; t < 20; ++t) {
        const Planted inst = planted_instance(6, 2, 20, 100 + t, 0.3);
        const FactorProblem p{inst.ens, inst.obs, 2};
        const DenseMatrix u = oracle::gaussian_matrix(6, 2, rng);
        const DenseMatrix grad = bm_gradient(p, u);
        const DenseMatrix fd = oracle::finite_difference_gradient(
            [&](const DenseMatrix& x) { return bm_objective(p, x); }, u);
        CHECK(oracle::relative_matrix_error(grad, fd) < 1e-5);
    }
}

TEST_CASE("bm gradient vanishes at a perfect fit") {
    const Planted inst = planted_instance(5, 2, 40, 8);
    const FactorProblem p{inst.ens, inst.obs, 2};
    CHECK(bm_gradient(p, inst.u_star).frobenius_norm() < 1e-10);
}

TEST_CASE("symmetric ensembles collapse the gradient formula") {
    // Symmetrize a small materialized ensemble by A <- (A + A^T)/2 through
    // the word-pair trick: build explicit symmetric sensing matrices.
    const index_t d = 4, n = 6;
    Rng rng(33);
    std::vector<DenseMatrix> mats;
    for (index_t i = 0; i < n; ++i) {
        DenseMatrix a = oracle::gaussian_matrix(d, d, rng);
        mats.push_back((a + transpose(a)) * 0.5);
    }
    // Wrap them as observations of a streamed-free ensemble is not possible
    // directly; instead compare the two formula routes algebraically:
    // grad = (2/n) (G + G^T) U with G = sum_i res_i A_i. For symmetric A_i,
    // G is symmetric and grad = (4/n) G U.
    const DenseMatrix u = oracle::gaussian_matrix(d, 2, rng);
    const DenseMatrix theta = gram_uu_t(u);
    std::vector<double> res(n);
    for (index_t i = 0; i < n; ++i) res[i] = matrix_dot(mats[i], theta) - 1.0;
    DenseMatrix g(d, d);
    for (index_t i = 0; i < n; ++i) {
        kernels::axpy(g.data(), res[i], mats[i].data(), g.size());
    }
    const DenseMatrix full = matmul(g + transpose(g), u) * (2.0 / n);
    const DenseMatrix collapsed = matmul(g, u) * (4.0 / n);
    CHECK(oracle::relative_matrix_error(full, collapsed) < 1e-12);
}

TEST_CASE("spectral init recovers an exact surrogate") {
    // Word-pair full ensemble with responses scaled by d^2 makes the
    // surrogate (1/n) sum X_i A_i equal exactly U* U*^T.
    const index_t d = 6, r = 2;
    Rng rng(44);
    const DenseMatrix u_star = oracle::gaussian_matrix(d, r, rng);
    const DenseMatrix theta = gram_uu_t(u_star);
    const MeasurementEnsemble ens = word_pair_ensemble_full(d, 1);
    Observations obs;
    obs.x = ens.apply(theta);
    for (double& x : obs.x) x *= static_cast<double>(d * d);
    const FactorProblem p{ens, obs, r};
    const DenseMatrix u0 = spectral_init(p);
    CHECK((gram_uu_t(u0) - theta).frobenius_norm() < 1e-8);

    // Unscaled responses give the surrogate at 1/d^2 scale.
    Observations raw;
    raw.x = ens.apply(theta);
    const FactorProblem praw{ens, raw, r};
    const DenseMatrix u0_raw = spectral_init(praw);
    const double c = 1.0 / static_cast<double>(d * d);
    CHECK((gram_uu_t(u0_raw) - theta * c).frobenius_norm() < 1e-8);
}

TEST_CASE("spectral init of zero observations is zero") {
    const MeasurementEnsemble ens = MeasurementEnsemble::gaussian(5, 8, 2);
    Observations obs;
    obs.x.assign(8, 0.0);
    const FactorProblem p{ens, obs, 2};
    CHECK(spectral_init(p).frobenius_norm() == 0.0);
}

TEST_CASE("burer-monteiro solver recovers a noiseless planted factor") {
    const Planted inst = planted_instance(10, 2, 200, 55);
    const FactorProblem p{inst.ens, inst.obs, 2};
    SolverConfig cfg;
    const BmFit fit = fit_burer_monteiro(p, cfg);
    const DenseMatrix theta_star = gram_uu_t(inst.u_star);
    const double rel = (gram_uu_t(fit.u) - theta_star).frobenius_norm() /
                       theta_star.frobenius_norm();
    CHECK(rel < 1e-3);
    CHECK(fit.converged);

    // Line-search contract: the trace never increases.
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
        CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-15);
    }

    // Converged gradient scale.
    const double gnorm = bm_gradient(p, fit.u).frobenius_norm();
    CHECK(gnorm <= 1e-4 * (1.0 + fit.objective));
}

TEST_CASE("max_iters = 0 returns the initialization") {
    const Planted inst = planted_instance(6, 2, 30, 66, 0.2);
    const FactorProblem p{inst.ens, inst.obs, 2};
    SolverConfig cfg;
    cfg.max_iters = 0;
    const BmFit fit = fit_burer_monteiro(p, cfg);
    CHECK(fit.u == spectral_init(p));
    CHECK(fit.iterations == 0);
}

TEST_CASE("rotation indifference of the objective") {
    const Planted inst = planted_instance(7, 3, 25, 77, 0.1);
    const FactorProblem p{inst.ens, inst.obs, 3};
    Rng rng(78);
    const DenseMatrix u = oracle::gaussian_matrix(7, 3, rng);
    const DenseMatrix r = oracle::random_orthogonal(3, rng);
    const double f1 = bm_objective(p, u);
    const double f2 = bm_objective(p, matmul(u, r));
    CHECK(f1 == doctest::Approx(f2).epsilon(1e-12));
}

TEST_CASE("multi-restart objectives agree on a well-posed proxy instance") {
    // Soft check: local-minima agreement is theory, echoed empirically.
    SyntheticSpec spec;
    spec.d = 20;
    spec.r = 5;
    spec.s = 2;
    spec.n_g = 50;
    spec.n_p = 5000;
    spec.seed = 202;
    const SyntheticInstance inst = generate_synthetic(spec);
    const FactorProblem p{inst.proxy_ensemble, inst.proxy_obs, spec.r};
    SolverConfig cfg;
    cfg.max_iters = 800;
    cfg.tol = 1e-8;

    const DenseMatrix u0 = spectral_init(p);
    const double scale = u0.frobenius_norm() /
                         std::sqrt(static_cast<double>(u0.size()));
    std::vector<double> finals;
    finals.push_back(fit_burer_monteiro_from(p, cfg, u0).objective);
    Rng rng(900);
    for (int rs = 1; rs < 5; ++rs) {
        const DenseMatrix start =
            oracle::gaussian_matrix(spec.d, spec.r, rng) * scale;
        finals.push_back(fit_burer_monteiro_from(p, cfg, start).objective);
    }
    const double lo = *std::min_element(finals.begin(), finals.end());
    const double hi = *std::max_element(finals.begin(), finals.end());
    const bool within_one_percent = hi <= lo * 1.01;
    WARN_MESSAGE(within_one_percent,
                 "multi-restart objective spread above 1%: ", lo, " .. ", hi);

    // Hard part of the contract: more restarts never hurt.
    SolverConfig multi = cfg;
    multi.restarts = 3;
    multi.seed = 5;
    SolverConfig single = cfg;
    const double best_multi = fit_burer_monteiro(p, multi).objective;
    const double best_single = fit_burer_monteiro(p, single).objective;
    CHECK(best_multi <= best_single + 1e-12);
}
