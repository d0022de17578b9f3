#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gstl/matrix.hpp"
#include "gstl/textpipe.hpp"

namespace gstl {

// Weighted log-bilinear embedding model: target vectors U, context vectors
// V, and the two bias vectors. The evaluation embedding is U + V.
struct GloveModel {
    DenseMatrix u;
    DenseMatrix v;
    std::vector<double> b;
    std::vector<double> c;
};

struct GloveConfig {
    index_t rank = 100;
    index_t max_epochs = 100;
    double eta = 0.05;    // base adaptive step
    double tol = 1e-6;    // relative objective-decrease stop
    double x_max = 100.0;
    double alpha = 0.75;
    std::uint64_t seed = 0;
};

// (x / x_max)^alpha below x_max, 1 above.
double glove_weight(double x, double x_max = 100.0, double alpha = 0.75);

// Sum over stored nonzero cells of f(X_ij) (log X_ij - (U^i.V^j + b_i + c_j))^2
// plus lambda * sum_i ||(U^i + V^i) - pre^i||  (group penalty).
double glove_tl_objective(const GloveModel& model,
                          const CooccurrenceCounts& counts,
                          const DenseMatrix& pretrained, double lambda,
                          double x_max = 100.0, double alpha = 0.75);

// Same smooth loss with the squared penalty lambda * sum_i ||.||^2.
double glove_mittens_objective(const GloveModel& model,
                               const CooccurrenceCounts& counts,
                               const DenseMatrix& pretrained, double lambda,
                               double x_max = 100.0, double alpha = 0.75);

// Gradient of the squared penalty w.r.t. U and V (equal blocks).
std::pair<DenseMatrix, DenseMatrix> mittens_penalty_gradient(
    const GloveModel& model, const DenseMatrix& pretrained, double lambda);

// Exact joint proximal step for one word's group penalty: minimizes
//   lambda ||u + v - a|| + (1/(2 eta)) (||u - u0||^2 + ||v - v0||^2)
// in place. The sum shrinks toward a, the correction splits equally.
void joint_sum_prox(std::span<double> u, std::span<double> v,
                    std::span<const double> a, double lambda, double eta);

struct GloveFit {
    GloveModel model;
    std::vector<double> objective_trace;  // objective at init, then per epoch
    double objective = 0.0;
    index_t epochs = 0;
    bool converged = false;
};

// Group-penalized fit: each epoch runs an adaptive-step (accumulated
// squared gradient) pass over the nonzero cells, then a closed-form joint
// proximal step on every (U^i, V^i) pair that shrinks the sum U^i + V^i
// toward the pretrained row. Deterministic given the seed.
GloveFit fit_glove_transfer(const CooccurrenceCounts& counts,
                            const DenseMatrix& pretrained, double lambda,
                            const GloveConfig& cfg);

// Squared-penalty baseline on the identical schedule; the penalty enters
// through the same adaptive gradient pass instead of a prox.
GloveFit fit_mittens(const CooccurrenceCounts& counts,
                     const DenseMatrix& pretrained, double lambda,
                     const GloveConfig& cfg);

// Plain fit (no penalty); rank comes from cfg.rank.
GloveFit fit_glove_plain(const CooccurrenceCounts& counts,
                         const GloveConfig& cfg);

// Per-word domain-shift scores ||(U^i + V^i) - pre^i||, sorted descending
// with lexicographic tie-break on the token.
struct RankingResult {
    std::vector<std::pair<std::string, double>> ranked;
};

RankingResult rank_domain_words(const GloveModel& model,
                                const DenseMatrix& pretrained,
                                const std::vector<std::string>& tokens);

// Scores from a written model file (rows are already U + V).
RankingResult rank_rows(const DenseMatrix& combined,
                        const DenseMatrix& pretrained,
                        const std::vector<std::string>& tokens);

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    index_t top_k = 0;
    index_t hits = 0;
};

// Predictions are the top ceil(top_fraction * d) ranked words; F1 is 0 when
// precision + recall is 0.
F1Result evaluate_f1(const RankingResult& ranking,
                     const std::unordered_set<std::string>& domain_words,
                     double top_fraction = 0.10);

// Mean of per-article F1 values weighted by article token length.
double weighted_f1(std::span<const F1Result> results,
                   std::span<const double> article_weights);

// Embedding text format: "token v1 v2 ... vr", one line per token.
void write_embeddings(const std::string& path,
                      const std::vector<std::string>& tokens,
                      const DenseMatrix& vectors);

struct Embeddings {
    std::vector<std::string> tokens;
    DenseMatrix vectors;
};

Embeddings read_embeddings(const std::string& path);

// Rows of the pretrained table aligned to vocabulary ids; a vocabulary
// token missing from the table is an error naming the token.
DenseMatrix align_pretrained(const Embeddings& pretrained,
                             const Vocabulary& vocab);

}  // namespace gstl
