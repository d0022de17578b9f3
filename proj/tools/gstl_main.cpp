// gstl: group-sparse transfer learning for low-rank embeddings.
//
// Subcommands tie the library into reproducible file-based pipelines:
//   synth-experiment  gold/proxy/transfer comparison on planted instances
//   conditions        sampled regularity-condition probes
//   cooc              corpus -> vocabulary + co-occurrence table
//   train             co-occurrence table + pretrained -> embeddings
//   rank              domain-word ranking and F1 against labels

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gstl/conditions.hpp"
#include "gstl/errors.hpp"
#include "gstl/experiment.hpp"
#include "gstl/glove.hpp"
#include "gstl/io.hpp"
#include "gstl/rng.hpp"
#include "gstl/textpipe.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

gstl::SolverConfig solver_from_config(const gstl::io::Config& cfg,
                                      const std::string& prefix,
                                      const gstl::SolverConfig& defaults) {
    gstl::SolverConfig out = defaults;
    out.max_iters = cfg.get_u64(prefix + "max_iters", defaults.max_iters);
    out.tol = cfg.get_double(prefix + "tol", defaults.tol);
    out.step = cfg.get_double(prefix + "step", defaults.step);
    out.line_search = cfg.get_double(prefix + "line_search", defaults.line_search);
    out.restarts = cfg.get_u64(prefix + "restarts", defaults.restarts);
    return out;
}

int cmd_synth_experiment(const std::string& config_path) {
    const std::vector<std::string> keys = {
        "d", "r", "s", "n_g", "n_p", "sigma_g", "sigma_p", "shift_value",
        "seed", "trials", "lambda_grid", "folds", "holdout_fraction",
        "output_dir", "big_l", "dump_dir",
        "max_iters", "tol", "step", "line_search", "restarts",
        "cv_max_iters", "cv_tol", "cv_step", "cv_line_search", "cv_restarts"};
    const gstl::io::Config cfg = gstl::io::Config::parse_file(config_path, keys);

    gstl::ExperimentSettings settings;
    settings.spec.d = cfg.get_u64("d");
    settings.spec.r = cfg.get_u64("r");
    settings.spec.s = cfg.get_u64("s");
    settings.spec.n_g = cfg.get_u64("n_g");
    settings.spec.n_p = cfg.get_u64("n_p");
    settings.spec.sigma_g = cfg.get_double("sigma_g", 1.0);
    settings.spec.sigma_p = cfg.get_double("sigma_p", 1.0);
    settings.spec.shift_value = cfg.get_double("shift_value", 1.0);
    settings.spec.seed = cfg.get_u64("seed");
    settings.trials = cfg.get_u64("trials");
    settings.lambda_grid = cfg.get_double_list("lambda_grid");
    settings.folds = cfg.get_u64("folds", 5);
    settings.holdout_fraction = cfg.get_double("holdout_fraction", 0.2);
    settings.big_l = cfg.get_double("big_l", 0.0);
    settings.dump_dir = cfg.get_string("dump_dir", "");

    settings.solver = solver_from_config(cfg, "", gstl::SolverConfig{});
    gstl::SolverConfig cv_defaults = settings.solver;
    cv_defaults.max_iters = 600;
    cv_defaults.tol = 1e-7;
    settings.cv_solver = solver_from_config(cfg, "cv_", cv_defaults);

    const std::string out_dir = cfg.get_string("output_dir");
    fs::create_directories(out_dir);

    const gstl::ExperimentResult result = gstl::run_synth_experiment(settings);

    gstl::io::write_text_file((fs::path(out_dir) / "trials.csv").string(),
                              gstl::trials_csv(result));
    gstl::io::write_text_file((fs::path(out_dir) / "summary.csv").string(),
                              gstl::summary_csv(result));
    if (!result.cv_table_trial0_csv.empty()) {
        gstl::io::write_text_file(
            (fs::path(out_dir) / "cv_table_trial0.csv").string(),
            result.cv_table_trial0_csv);
    }

    std::cout << "trials: " << settings.trials << "\n"
              << "tl mean frob error:    " << gstl::io::fmt17(result.tl.mean_frob)
              << "\n"
              << "gold mean frob error:  "
              << gstl::io::fmt17(result.gold.mean_frob) << "\n"
              << "proxy mean frob error: "
              << gstl::io::fmt17(result.proxy.mean_frob) << "\n"
              << "tl/proxy ratio: " << gstl::io::fmt17(result.ratio_tl_proxy_frob)
              << "\n"
              << "tl/gold ratio:  " << gstl::io::fmt17(result.ratio_tl_gold_frob)
              << "\n"
              << "support recovery rate: "
              << gstl::io::fmt17(result.support_recovery_rate) << "\n";
    return 0;
}

int cmd_conditions(const std::string& config_path) {
    const std::vector<std::string> keys = {
        "kind", "d", "r", "s", "n", "n_per_pair", "samples", "seed",
        "cone_factor", "output_csv",
        "rsc_trials", "rsc_n", "rsc_lbar"};
    const gstl::io::Config cfg = gstl::io::Config::parse_file(config_path, keys);

    const std::string kind = cfg.get_string("kind");
    const gstl::index_t d = cfg.get_u64("d");
    const gstl::index_t r = cfg.get_u64("r");
    const gstl::index_t samples = cfg.get_u64("samples", 200);
    const std::uint64_t seed = cfg.get_u64("seed");
    const double cone_factor = cfg.get_double("cone_factor", 7.0);

    gstl::MeasurementEnsemble ens = [&] {
        if (kind == "gaussian") {
            return gstl::MeasurementEnsemble::gaussian(
                d, cfg.get_u64("n"), gstl::derive_seed(seed, "ensemble"));
        }
        if (kind == "wordpair") {
            return gstl::word_pair_ensemble_full(d,
                                                 cfg.get_u64("n_per_pair", 1));
        }
        throw gstl::ConfigError("kind must be gaussian or wordpair", 0);
    }();

    std::string csv = "condition,estimate,samples,seed,method\n";
    const auto row = [&](const std::string& name, double value,
                         gstl::index_t used, const std::string& method) {
        csv += name + ',' + gstl::io::fmt17(value) + ',' +
               std::to_string(used) + ',' + std::to_string(seed) + ',' +
               method + '\n';
    };

    const auto [alpha, beta] = gstl::estimate_rwc(ens, r, samples, seed);
    row("rwc_alpha", alpha, samples, "sampled_bound");
    row("rwc_beta", beta, samples, "sampled_bound");
    row("smoothness_beta", gstl::estimate_smoothness(ens, r, samples, seed),
        samples, "sampled_bound");

    const gstl::index_t s = cfg.get_u64("s", 0);
    if (s > 0) {
        gstl::SyntheticSpec spec;
        spec.d = d;
        spec.r = r;
        spec.s = s;
        spec.n_g = ens.size();
        spec.n_p = 1;
        spec.seed = gstl::derive_seed(seed, "instance");
        const gstl::SyntheticInstance inst = gstl::generate_synthetic(spec);
        row("qcc_kappa",
            gstl::estimate_qcc(ens, inst.u_g_star, inst.support, samples, seed,
                               cone_factor),
            samples, "sampled_bound");
    }

    const gstl::index_t rsc_trials = cfg.get_u64("rsc_trials", 0);
    if (rsc_trials > 0) {
        gstl::DenseMatrix u_star(d, r);
        const gstl::RandomStream stream(gstl::derive_seed(seed, "rsc_u_star"));
        for (gstl::index_t k = 0; k < u_star.size(); ++k) {
            u_star.data()[k] = stream.normal_at(k);
        }
        row("rsc_pass_fraction",
            gstl::check_rsc_gaussian_identity(
                d, r, cfg.get_u64("rsc_n", cfg.get_u64("n", 0)), u_star,
                cfg.get_double("rsc_lbar", 5.0), rsc_trials, seed),
            rsc_trials, "monte_carlo");
    }

    const std::string out = cfg.get_string("output_csv", "");
    if (out.empty()) {
        std::cout << csv;
    } else {
        const fs::path parent = fs::path(out).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        gstl::io::write_text_file(out, csv);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_cooc(const std::string& corpus_path, const std::string& vocab_out,
             const std::string& cooc_out, gstl::index_t window,
             std::uint64_t min_count, bool no_distance_weighting,
             const std::string& stopwords_path) {
    std::unordered_set<std::string> stopwords;
    if (!stopwords_path.empty()) {
        stopwords = gstl::read_stopwords(stopwords_path);
    }
    const std::string corpus = gstl::io::read_text_file(corpus_path);
    const std::vector<gstl::Sentence> sentences =
        gstl::preprocess(corpus, stopwords);
    const gstl::Vocabulary vocab =
        gstl::build_vocabulary(sentences, min_count);
    const gstl::CooccurrenceCounts counts = gstl::count_cooccurrences(
        sentences, vocab, window, !no_distance_weighting);
    gstl::write_vocab_tsv(vocab_out, vocab);
    gstl::write_cooc_tsv(cooc_out, counts);
    std::cout << "vocabulary: " << vocab.size() << " tokens\n"
              << "co-occurrence entries: " << counts.entries.size() << "\n";
    return 0;
}

int cmd_train(const std::string& cooc_path, const std::string& vocab_path,
              const std::string& pretrained_path, const std::string& method,
              double lambda, const std::string& out_path,
              const gstl::GloveConfig& base_cfg, gstl::index_t rank,
              const std::string& components_prefix) {
    const gstl::CooccurrenceCounts counts = gstl::read_cooc_tsv(cooc_path);
    gstl::Vocabulary vocab = gstl::read_vocab_tsv(vocab_path);
    if (vocab.size() < counts.vocab_size) {
        throw gstl::DataError("vocabulary smaller than co-occurrence ids");
    }

    gstl::GloveConfig cfg = base_cfg;
    gstl::GloveFit fit;
    if (method == "glove") {
        cfg.rank = rank;
        fit = gstl::fit_glove_plain(counts, cfg);
    } else {
        const gstl::Embeddings pre = gstl::read_embeddings(pretrained_path);
        const gstl::DenseMatrix aligned = gstl::align_pretrained(pre, vocab);
        if (method == "tl") {
            fit = gstl::fit_glove_transfer(counts, aligned, lambda, cfg);
        } else if (method == "mittens") {
            fit = gstl::fit_mittens(counts, aligned, lambda, cfg);
        } else {
            throw gstl::ValueError("method must be tl, mittens or glove");
        }
    }

    gstl::write_embeddings(out_path, vocab.tokens,
                           fit.model.u + fit.model.v);
    if (!components_prefix.empty()) {
        gstl::write_embeddings(components_prefix + ".u.txt", vocab.tokens,
                               fit.model.u);
        gstl::write_embeddings(components_prefix + ".v.txt", vocab.tokens,
                               fit.model.v);
        std::vector<double> biases = fit.model.b;
        gstl::io::write_vector_lines(components_prefix + ".b.txt", biases);
        gstl::io::write_vector_lines(components_prefix + ".c.txt",
                                     fit.model.c);
    }
    std::cout << "final objective: " << gstl::io::fmt17(fit.objective) << "\n"
              << "epochs: " << fit.epochs
              << (fit.converged ? " (converged)" : " (max epochs)") << "\n";
    return 0;
}

int cmd_rank(const std::string& model_path, const std::string& pretrained_path,
             const std::string& labels_path, double top_fraction,
             const std::string& out_path) {
    const gstl::Embeddings model = gstl::read_embeddings(model_path);
    const gstl::Embeddings pre = gstl::read_embeddings(pretrained_path);

    // The model vocabulary drives the ranking; every token needs a
    // pretrained row.
    gstl::Vocabulary vocab;
    for (const std::string& tok : model.tokens) {
        const auto id = static_cast<std::uint32_t>(vocab.tokens.size());
        if (!vocab.id_of.emplace(tok, id).second) {
            throw gstl::DataError("duplicate token in model: " + tok);
        }
        vocab.tokens.push_back(tok);
        vocab.counts.push_back(0);
    }
    const gstl::DenseMatrix aligned = gstl::align_pretrained(pre, vocab);
    if (aligned.cols() != model.vectors.cols()) {
        throw gstl::DataError("model and pretrained dimensions differ");
    }
    const gstl::RankingResult ranking =
        gstl::rank_rows(model.vectors, aligned, model.tokens);

    std::unordered_set<std::string> labels;
    if (!labels_path.empty()) {
        for (const std::string& tok :
             gstl::read_stopwords(labels_path)) {  // same newline format
            labels.insert(tok);
        }
    }

    const gstl::index_t top_k = std::min<gstl::index_t>(
        ranking.ranked.size(),
        static_cast<gstl::index_t>(std::ceil(
            top_fraction * static_cast<double>(ranking.ranked.size()))));

    std::string csv = "rank,token,score,predicted_domain\n";
    for (gstl::index_t i = 0; i < ranking.ranked.size(); ++i) {
        csv += std::to_string(i + 1) + ',' + ranking.ranked[i].first + ',' +
               gstl::io::fmt17(ranking.ranked[i].second) + ',' +
               (i < top_k ? "1" : "0") + '\n';
    }
    if (!labels.empty()) {
        const gstl::F1Result f1 = gstl::evaluate_f1(ranking, labels,
                                                    top_fraction);
        csv += "# precision = " + gstl::io::fmt17(f1.precision) + '\n';
        csv += "# recall = " + gstl::io::fmt17(f1.recall) + '\n';
        csv += "# f1 = " + gstl::io::fmt17(f1.f1) + '\n';
        std::cout << "precision: " << gstl::io::fmt17(f1.precision) << "\n"
                  << "recall: " << gstl::io::fmt17(f1.recall) << "\n"
                  << "f1: " << gstl::io::fmt17(f1.f1) << "\n";
    }
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        gstl::io::write_text_file(out_path, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "group-sparse transfer learning for low-rank embedding models"};
    app.require_subcommand(1);

    std::string config_path;
    auto* synth = app.add_subcommand(
        "synth-experiment",
        "run the seeded gold/proxy/transfer comparison from a config file "
        "(plain-text 'key = value' lines; see README for the key list)");
    synth->add_option("config", config_path, "experiment config file")
        ->required();

    std::string cond_config;
    auto* cond = app.add_subcommand(
        "conditions",
        "sampled probes of the regularity conditions; emits CSV "
        "condition,estimate,samples,seed,method");
    cond->add_option("config", cond_config, "conditions config file")
        ->required();

    std::string corpus_path, vocab_out, cooc_out, stopwords_path;
    gstl::index_t window = 5;
    std::uint64_t min_count = 1;
    bool no_distance_weighting = false;
    auto* cooc = app.add_subcommand(
        "cooc",
        "preprocess a corpus and emit vocabulary ('token<TAB>count', id = "
        "line number) and co-occurrence ('i<TAB>j<TAB>weight', i <= j) TSV");
    cooc->add_option("corpus", corpus_path, "UTF-8 corpus file")->required();
    cooc->add_option("--vocab-out", vocab_out, "vocabulary TSV path")
        ->required();
    cooc->add_option("--cooc-out", cooc_out, "co-occurrence TSV path")
        ->required();
    cooc->add_option("--window", window, "symmetric context window (default 5)");
    cooc->add_option("--min-count", min_count,
                     "minimum corpus frequency (default 1)");
    cooc->add_flag("--no-distance-weighting", no_distance_weighting,
                   "count pairs with weight 1 instead of 1/distance");
    cooc->add_option("--stopwords", stopwords_path,
                     "newline-delimited stopword list");

    std::string train_cooc, train_vocab, train_pre, train_method = "tl";
    std::string train_out, components_prefix;
    double train_lambda = 0.05;
    gstl::index_t train_rank = 100;
    gstl::GloveConfig glove_cfg;
    auto* train = app.add_subcommand(
        "train",
        "fit embeddings on a co-occurrence table; writes 'token v1 ... vr' "
        "lines for U+V and prints the final objective");
    train->add_option("cooc", train_cooc, "co-occurrence TSV")->required();
    train->add_option("pretrained", train_pre,
                      "pretrained embedding text file (unused for "
                      "--method glove)")
        ->required();
    train->add_option("--vocab", train_vocab, "vocabulary TSV")->required();
    train->add_option("--method", train_method, "tl | mittens | glove");
    train->add_option("--lambda", train_lambda,
                      "penalty level (default 0.05; ignored for glove)");
    train->add_option("--out", train_out, "output embedding file")->required();
    train->add_option("--epochs", glove_cfg.max_epochs, "max epochs");
    train->add_option("--eta", glove_cfg.eta, "base adaptive step");
    train->add_option("--tol", glove_cfg.tol, "relative objective tolerance");
    train->add_option("--seed", glove_cfg.seed, "initialization seed");
    train->add_option("--rank", train_rank,
                      "embedding dimension for --method glove (default 100)");
    train->add_option("--x-max", glove_cfg.x_max, "weighting cutoff");
    train->add_option("--alpha", glove_cfg.alpha, "weighting exponent");
    train->add_option("--save-components", components_prefix,
                      "also write U, V, b, c under this path prefix");

    std::string rank_model, rank_pre, rank_labels, rank_out;
    double top_fraction = 0.10;
    auto* rankc = app.add_subcommand(
        "rank",
        "rank words by embedding shift from pretrained; emits CSV "
        "rank,token,score,predicted_domain");
    rankc->add_option("model", rank_model, "trained embedding file")
        ->required();
    rankc->add_option("pretrained", rank_pre, "pretrained embedding file")
        ->required();
    rankc->add_option("--labels", rank_labels,
                      "newline-delimited domain words; adds an F1 summary");
    rankc->add_option("--top-fraction", top_fraction,
                      "prediction slice (default 0.10)");
    rankc->add_option("--out", rank_out, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth_experiment(config_path);
        if (cond->parsed()) return cmd_conditions(cond_config);
        if (cooc->parsed()) {
            return cmd_cooc(corpus_path, vocab_out, cooc_out, window, min_count,
                            no_distance_weighting, stopwords_path);
        }
        if (train->parsed()) {
            return cmd_train(train_cooc, train_vocab, train_pre, train_method,
                             train_lambda, train_out, glove_cfg, train_rank,
                             components_prefix);
        }
        if (rankc->parsed()) {
            return cmd_rank(rank_model, rank_pre, rank_labels, top_fraction,
                            rank_out);
        }
    } catch (const gstl::ConfigError& e) {
        std::cerr << "config error"
                  << (e.line > 0 ? " (line " + std::to_string(e.line) + ")"
                                 : "")
                  << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const gstl::ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const gstl::DivergedError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const gstl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
