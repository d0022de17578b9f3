#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gstl/sensing.hpp"
#include "gstl/transfer.hpp"

namespace gstl {

// Repeated synthetic comparison of the three estimators: gold-only,
// proxy-only, and the two-stage transfer fit with cross-validated penalty.
// A holdout_fraction slice of each trial's gold data is kept out of
// training; the penalty level is tuned by k-fold cross-validation on the
// remaining slice and the holdout loss is reported.
struct ExperimentSettings {
    SyntheticSpec spec;  // spec.seed is the base seed; trials derive from it
    index_t trials = 100;
    std::vector<double> lambda_grid;
    index_t folds = 5;
    double holdout_fraction = 0.2;
    SolverConfig solver;     // proxy/gold/final transfer fits
    SolverConfig cv_solver;  // cross-validation fits (can be coarser)
    double big_l = 0.0;      // 0 = derive per trial from a warm run
    std::string dump_dir;    // when set, trial 0's instance is serialized here
};

struct TrialRow {
    index_t trial = 0;
    std::string estimator;  // "gold" | "proxy" | "tl"
    double frob_theta_error = 0.0;
    double l21_error = 0.0;
    std::optional<double> lambda_selected;
    std::optional<index_t> active_rows;
    std::optional<bool> support_exact;
    std::optional<double> holdout_loss;
    std::string error;  // divergence message; row excluded from the summary
};

struct EstimatorSummary {
    double mean_frob = 0.0;
    double ci95_frob = 0.0;
    double mean_l21 = 0.0;
    double ci95_l21 = 0.0;
    index_t ok_trials = 0;
};

struct ExperimentResult {
    std::vector<TrialRow> rows;
    EstimatorSummary gold, proxy, tl;
    double support_recovery_rate = 0.0;
    double ratio_tl_proxy_frob = 0.0;
    double ratio_tl_gold_frob = 0.0;
    std::string cv_table_trial0_csv;
};

ExperimentResult run_synth_experiment(const ExperimentSettings& settings);

std::string trials_csv(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);

}  // namespace gstl
