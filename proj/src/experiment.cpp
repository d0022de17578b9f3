#include "gstl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <filesystem>

#include "gstl/align.hpp"
#include "gstl/errors.hpp"
#include "gstl/factor.hpp"
#include "gstl/glove.hpp"
#include "gstl/io.hpp"
#include "gstl/rng.hpp"
#include "gstl/threads.hpp"

namespace gstl {

namespace {

struct MeanCi {
    double mean = 0.0;
    double ci95 = 0.0;
};

MeanCi mean_ci(const std::vector<double>& values) {
    MeanCi out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        out.ci95 = 1.96 * sd / std::sqrt(n);
    }
    return out;
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? io::fmt17(*v) : std::string();
}

// Row labels for fitted factors written in the embedding text format.
std::vector<std::string> synthetic_tokens(index_t d) {
    std::vector<std::string> tokens;
    tokens.reserve(d);
    for (index_t i = 0; i < d; ++i) tokens.push_back("w" + std::to_string(i));
    return tokens;
}

}  // namespace

ExperimentResult run_synth_experiment(const ExperimentSettings& settings) {
    if (settings.trials == 0) throw ValueError("experiment: trials >= 1");
    if (settings.lambda_grid.empty()) {
        throw ValueError("experiment: lambda grid is empty");
    }
    if (!(settings.holdout_fraction > 0.0 && settings.holdout_fraction < 1.0)) {
        throw ValueError("experiment: holdout fraction in (0, 1)");
    }

    ExperimentResult result;
    result.rows.resize(3 * settings.trials);

    parallel_for(settings.trials, [&](index_t t) {
        SyntheticSpec spec = settings.spec;
        spec.seed = hash_u64(derive_seed(settings.spec.seed, "trial"), t);
        const SyntheticInstance inst = generate_synthetic(spec);
        if (t == 0 && !settings.dump_dir.empty()) {
            save_instance_csv(inst, spec, settings.dump_dir);
        }

        TrialRow& gold_row = result.rows[3 * t];
        TrialRow& proxy_row = result.rows[3 * t + 1];
        TrialRow& tl_row = result.rows[3 * t + 2];
        gold_row = TrialRow{};
        gold_row.trial = t;
        gold_row.estimator = "gold";
        proxy_row = TrialRow{};
        proxy_row.trial = t;
        proxy_row.estimator = "proxy";
        tl_row = TrialRow{};
        tl_row.trial = t;
        tl_row.estimator = "tl";

        SolverConfig solver = settings.solver;
        solver.seed = hash_u64(spec.seed, 0xF17ull);

        // Proxy estimator; the transfer stage reuses its embedding.
        DenseMatrix u_p_hat;
        try {
            const FactorProblem proxy{inst.proxy_ensemble, inst.proxy_obs,
                                      spec.r};
            BmFit fit = fit_burer_monteiro(proxy, solver);
            proxy_row.frob_theta_error =
                error_frobenius_theta(fit.u, inst.u_g_star);
            proxy_row.l21_error = error_l21(fit.u, inst.u_g_star);
            u_p_hat = std::move(fit.u);
        } catch (const DivergedError& e) {
            proxy_row.error = e.what();
            tl_row.error = "proxy stage diverged";
        }

        try {
            const FactorProblem gold{inst.gold_ensemble, inst.gold_obs, spec.r};
            const BmFit fit = fit_burer_monteiro(gold, solver);
            gold_row.frob_theta_error =
                error_frobenius_theta(fit.u, inst.u_g_star);
            gold_row.l21_error = error_l21(fit.u, inst.u_g_star);
            if (t == 0 && !settings.dump_dir.empty()) {
                write_embeddings((std::filesystem::path(settings.dump_dir) /
                                  "u_g_hat_gold.txt")
                                     .string(),
                                 synthetic_tokens(spec.d), fit.u);
            }
        } catch (const DivergedError& e) {
            gold_row.error = e.what();
        }

        if (!tl_row.error.empty()) return;
        try {
            // Holdout split of the gold data.
            const index_t n = inst.gold_obs.x.size();
            std::vector<index_t> order(n);
            std::iota(order.begin(), order.end(), index_t{0});
            Rng rng(hash_u64(spec.seed, 0x401Dull));
            rng.shuffle(order);
            const index_t n_holdout = std::max<index_t>(
                1, static_cast<index_t>(
                       std::lround(settings.holdout_fraction *
                                   static_cast<double>(n))));
            std::vector<index_t> holdout(order.begin(),
                                         order.begin() + n_holdout);
            std::vector<index_t> train(order.begin() + n_holdout, order.end());
            std::sort(holdout.begin(), holdout.end());
            std::sort(train.begin(), train.end());

            const MeasurementEnsemble train_ens =
                inst.gold_ensemble.subset(train);
            Observations train_obs;
            train_obs.sigma = inst.gold_obs.sigma;
            for (index_t idx : train) train_obs.x.push_back(inst.gold_obs.x[idx]);

            SolverConfig cv_solver = settings.cv_solver;
            cv_solver.seed = hash_u64(spec.seed, 0xC4ull);

            const double big_l =
                settings.big_l > 0.0
                    ? settings.big_l
                    : default_big_l(train_ens, train_obs, u_p_hat, 0.0,
                                    cv_solver);

            const CvResult cv = cross_validate_lambda(
                train_ens, train_obs, u_p_hat, big_l, settings.lambda_grid,
                settings.folds, cv_solver);
            if (t == 0) result.cv_table_trial0_csv = cv_table_csv(cv);

            const TransferProblem problem{train_ens, train_obs, u_p_hat,
                                          cv.best_lambda, big_l};
            const TransferSolution sol = fit_transfer(problem, solver);

            tl_row.frob_theta_error =
                error_frobenius_theta(sol.u_g_hat, inst.u_g_star);
            tl_row.l21_error = error_l21(sol.u_g_hat, inst.u_g_star);
            tl_row.lambda_selected = cv.best_lambda;
            tl_row.active_rows = sol.active_rows.size();
            tl_row.support_exact = sol.active_rows == inst.support;

            const MeasurementEnsemble holdout_ens =
                inst.gold_ensemble.subset(holdout);
            Observations holdout_obs;
            holdout_obs.sigma = inst.gold_obs.sigma;
            for (index_t idx : holdout) {
                holdout_obs.x.push_back(inst.gold_obs.x[idx]);
            }
            const TransferProblem eval{holdout_ens, holdout_obs, u_p_hat,
                                       cv.best_lambda, big_l};
            tl_row.holdout_loss = transfer_smooth_loss(eval, sol.delta_hat);

            if (t == 0 && !settings.dump_dir.empty()) {
                const auto dir = std::filesystem::path(settings.dump_dir);
                write_embeddings((dir / "u_p_hat.txt").string(),
                                 synthetic_tokens(spec.d), u_p_hat);
                write_embeddings((dir / "u_g_hat_tl.txt").string(),
                                 synthetic_tokens(spec.d), sol.u_g_hat);
            }
        } catch (const DivergedError& e) {
            tl_row.error = e.what();
        }
    });

    // Summaries over trials that completed.
    const auto summarize = [&](const std::string& name) {
        std::vector<double> frob, l21;
        for (const TrialRow& row : result.rows) {
            if (row.estimator == name && row.error.empty()) {
                frob.push_back(row.frob_theta_error);
                l21.push_back(row.l21_error);
            }
        }
        EstimatorSummary s;
        const MeanCi f = mean_ci(frob);
        const MeanCi l = mean_ci(l21);
        s.mean_frob = f.mean;
        s.ci95_frob = f.ci95;
        s.mean_l21 = l.mean;
        s.ci95_l21 = l.ci95;
        s.ok_trials = frob.size();
        return s;
    };
    result.gold = summarize("gold");
    result.proxy = summarize("proxy");
    result.tl = summarize("tl");

    index_t exact = 0;
    index_t tl_ok = 0;
    for (const TrialRow& row : result.rows) {
        if (row.estimator == "tl" && row.error.empty()) {
            ++tl_ok;
            if (row.support_exact && *row.support_exact) ++exact;
        }
    }
    result.support_recovery_rate =
        tl_ok ? static_cast<double>(exact) / static_cast<double>(tl_ok) : 0.0;
    result.ratio_tl_proxy_frob =
        result.proxy.mean_frob > 0.0 ? result.tl.mean_frob / result.proxy.mean_frob
                                     : 0.0;
    result.ratio_tl_gold_frob =
        result.gold.mean_frob > 0.0 ? result.tl.mean_frob / result.gold.mean_frob
                                    : 0.0;
    return result;
}

std::string trials_csv(const ExperimentResult& result) {
    std::string out =
        "trial,estimator,frob_theta_error,l21_error,lambda_selected,"
        "active_rows,support_exact,holdout_loss,error\n";
    for (const TrialRow& row : result.rows) {
        out += std::to_string(row.trial);
        out += ',' + row.estimator;
        out += ',' + io::fmt17(row.frob_theta_error);
        out += ',' + io::fmt17(row.l21_error);
        out += ',' + opt_cell(row.lambda_selected);
        out += ',';
        if (row.active_rows) out += std::to_string(*row.active_rows);
        out += ',';
        if (row.support_exact) out += *row.support_exact ? "1" : "0";
        out += ',' + opt_cell(row.holdout_loss);
        out += ',' + row.error;
        out += '\n';
    }
    return out;
}

std::string summary_csv(const ExperimentResult& result) {
    std::string out = "estimator,metric,mean,ci95_half,ok_trials\n";
    const auto emit = [&](const std::string& name, const EstimatorSummary& s) {
        out += name + ",frob_theta_error," + io::fmt17(s.mean_frob) + ',' +
               io::fmt17(s.ci95_frob) + ',' + std::to_string(s.ok_trials) +
               '\n';
        out += name + ",l21_error," + io::fmt17(s.mean_l21) + ',' +
               io::fmt17(s.ci95_l21) + ',' + std::to_string(s.ok_trials) + '\n';
    };
    emit("gold", result.gold);
    emit("proxy", result.proxy);
    emit("tl", result.tl);
    out += "tl,frob_ratio_vs_proxy," + io::fmt17(result.ratio_tl_proxy_frob) +
           ",,\n";
    out += "tl,frob_ratio_vs_gold," + io::fmt17(result.ratio_tl_gold_frob) +
           ",,\n";
    out += "tl,support_recovery_rate," +
           io::fmt17(result.support_recovery_rate) + ",,\n";
    return out;
}

}  // namespace gstl
