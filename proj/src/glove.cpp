#include "gstl/glove.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gstl/errors.hpp"
#include "gstl/io.hpp"
#include "gstl/kernels.hpp"
#include "gstl/rng.hpp"

namespace gstl {

double glove_weight(double x, double x_max, double alpha) {
    if (x < 0.0) throw ValueError("glove_weight: x must be >= 0");
    if (x >= x_max) return 1.0;
    return std::pow(x / x_max, alpha);
}

namespace {

struct OrderedCell {
    std::uint32_t i;
    std::uint32_t j;
    double log_x;
    double fx;
};

// Expand the symmetric half-table into ordered (i, j) cells; zero cells are
// skipped (the weight is zero and the log undefined).
std::vector<OrderedCell> ordered_cells(const CooccurrenceCounts& counts,
                                       double x_max, double alpha) {
    std::vector<OrderedCell> cells;
    cells.reserve(counts.entries.size() * 2);
    for (const CoocEntry& e : counts.entries) {
        if (!(e.weight > 0.0)) continue;
        const double log_x = std::log(e.weight);
        const double fx = glove_weight(e.weight, x_max, alpha);
        cells.push_back(OrderedCell{e.i, e.j, log_x, fx});
        if (e.i != e.j) cells.push_back(OrderedCell{e.j, e.i, log_x, fx});
    }
    std::sort(cells.begin(), cells.end(),
              [](const OrderedCell& a, const OrderedCell& b) {
                  return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
              });
    return cells;
}

double smooth_loss(const GloveModel& model, const std::vector<OrderedCell>& cells) {
    const index_t r = model.u.cols();
    double total = 0.0;
    for (const OrderedCell& cell : cells) {
        const double pred =
            kernels::dot(model.u.row(cell.i), model.v.row(cell.j), r) +
            model.b[cell.i] + model.c[cell.j];
        const double diff = pred - cell.log_x;
        total += cell.fx * diff * diff;
    }
    return total;
}

double group_penalty(const GloveModel& model, const DenseMatrix& pretrained,
                     double lambda) {
    const index_t r = model.u.cols();
    double total = 0.0;
    std::vector<double> s(r);
    for (index_t i = 0; i < model.u.rows(); ++i) {
        for (index_t k = 0; k < r; ++k) {
            s[k] = model.u(i, k) + model.v(i, k) - pretrained(i, k);
        }
        total += std::sqrt(kernels::sumsq(s.data(), r));
    }
    return lambda * total;
}

double squared_penalty(const GloveModel& model, const DenseMatrix& pretrained,
                       double lambda) {
    const index_t r = model.u.cols();
    double total = 0.0;
    std::vector<double> s(r);
    for (index_t i = 0; i < model.u.rows(); ++i) {
        for (index_t k = 0; k < r; ++k) {
            s[k] = model.u(i, k) + model.v(i, k) - pretrained(i, k);
        }
        total += kernels::sumsq(s.data(), r);
    }
    return lambda * total;
}

void check_model_counts(const GloveModel& model,
                        const CooccurrenceCounts& counts) {
    if (model.u.rows() != counts.vocab_size ||
        !model.u.same_shape(model.v) || model.b.size() != model.u.rows() ||
        model.c.size() != model.u.rows()) {
        throw DimensionError("glove model inconsistent with counts");
    }
}

enum class PenaltyKind { None, Group, Squared };

GloveFit fit_core(const CooccurrenceCounts& counts,
                  const DenseMatrix* pretrained, double lambda,
                  PenaltyKind penalty, const GloveConfig& cfg) {
    const index_t d = counts.vocab_size;
    const index_t r = pretrained ? pretrained->cols() : cfg.rank;
    if (r == 0) throw ValueError("glove fit: rank must be >= 1");
    if (lambda < 0.0) throw ValueError("glove fit: lambda must be >= 0");
    if (pretrained && pretrained->rows() != d) {
        throw DimensionError("pretrained rows != vocabulary size");
    }
    if (penalty != PenaltyKind::None && !pretrained) {
        throw ValueError("penalized glove fit needs pretrained embeddings");
    }

    const std::vector<OrderedCell> cells =
        ordered_cells(counts, cfg.x_max, cfg.alpha);

    GloveFit fit;
    GloveModel& m = fit.model;
    m.u = DenseMatrix(d, r);
    m.v = DenseMatrix(d, r);
    m.b.assign(d, 0.0);
    m.c.assign(d, 0.0);
    {
        const RandomStream init(derive_seed(cfg.seed, "glove_init"));
        const double half = 0.5 / static_cast<double>(r);
        for (index_t k = 0; k < m.u.size(); ++k) {
            m.u.data()[k] = (2.0 * init.uniform_at(k) - 1.0) * half;
        }
        for (index_t k = 0; k < m.v.size(); ++k) {
            m.v.data()[k] = (2.0 * init.uniform_at(m.u.size() + k) - 1.0) * half;
        }
    }

    // Accumulated squared gradients, the original recipe's step scaling.
    DenseMatrix gu(d, r), gv(d, r);
    std::fill(gu.data(), gu.data() + gu.size(), 1.0);
    std::fill(gv.data(), gv.data() + gv.size(), 1.0);
    std::vector<double> gb(d, 1.0), gc(d, 1.0);

    const bool penalized = penalty != PenaltyKind::None && lambda > 0.0;
    const auto objective = [&]() {
        double f = smooth_loss(m, cells);
        if (penalized && penalty == PenaltyKind::Group) {
            f += group_penalty(m, *pretrained, lambda);
        } else if (penalized && penalty == PenaltyKind::Squared) {
            f += squared_penalty(m, *pretrained, lambda);
        }
        return f;
    };

    double f = objective();
    fit.objective_trace.push_back(f);

    std::vector<double> u_before(r);
    std::vector<double> row_step_sum(d), s_vec(r);
    std::vector<std::uint32_t> row_step_cnt(d);

    for (index_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::fill(row_step_sum.begin(), row_step_sum.end(), 0.0);
        std::fill(row_step_cnt.begin(), row_step_cnt.end(), 0u);

        // Smooth pass over the nonzero cells, fixed order.
        for (const OrderedCell& cell : cells) {
            double* ui = m.u.row(cell.i);
            double* vj = m.v.row(cell.j);
            const double pred = kernels::dot(ui, vj, r) +
                                m.b[cell.i] + m.c[cell.j];
            const double gs = 2.0 * cell.fx * (pred - cell.log_x);

            std::copy(ui, ui + r, u_before.begin());
            for (index_t k = 0; k < r; ++k) {
                const double g = gs * vj[k];
                gu(cell.i, k) += g * g;
                const double step = cfg.eta / std::sqrt(gu(cell.i, k));
                ui[k] -= step * g;
                row_step_sum[cell.i] += step;
                ++row_step_cnt[cell.i];
            }
            for (index_t k = 0; k < r; ++k) {
                const double g = gs * u_before[k];
                gv(cell.j, k) += g * g;
                const double step = cfg.eta / std::sqrt(gv(cell.j, k));
                vj[k] -= step * g;
                row_step_sum[cell.j] += step;
                ++row_step_cnt[cell.j];
            }
            gb[cell.i] += gs * gs;
            m.b[cell.i] -= cfg.eta * gs / std::sqrt(gb[cell.i]);
            gc[cell.j] += gs * gs;
            m.c[cell.j] -= cfg.eta * gs / std::sqrt(gc[cell.j]);
        }

        if (penalized && penalty == PenaltyKind::Group) {
            // Joint prox per word at the row's mean adaptive step.
            for (index_t i = 0; i < d; ++i) {
                const double eta_i =
                    row_step_cnt[i]
                        ? row_step_sum[i] / static_cast<double>(row_step_cnt[i])
                        : cfg.eta;
                joint_sum_prox({m.u.row(i), r}, {m.v.row(i), r},
                               {pretrained->row(i), r}, lambda, eta_i);
            }
        } else if (penalized && penalty == PenaltyKind::Squared) {
            // Penalty gradient through the same adaptive scaling.
            for (index_t i = 0; i < d; ++i) {
                for (index_t k = 0; k < r; ++k) {
                    s_vec[k] = m.u(i, k) + m.v(i, k) - (*pretrained)(i, k);
                }
                for (index_t k = 0; k < r; ++k) {
                    const double g = 2.0 * lambda * s_vec[k];
                    gu(i, k) += g * g;
                    m.u(i, k) -= cfg.eta * g / std::sqrt(gu(i, k));
                    gv(i, k) += g * g;
                    m.v(i, k) -= cfg.eta * g / std::sqrt(gv(i, k));
                }
            }
        }

        const double f_new = objective();
        if (!std::isfinite(f_new)) {
            throw DivergedError("glove objective diverged at epoch " +
                                    std::to_string(epoch),
                                epoch);
        }
        const double decrease = f - f_new;
        f = f_new;
        fit.objective_trace.push_back(f);
        fit.epochs = epoch;
        if (decrease >= 0.0 &&
            decrease <= cfg.tol * std::max(std::abs(f), 1e-300)) {
            fit.converged = true;
            break;
        }
    }

    fit.objective = f;
    return fit;
}

}  // namespace

double glove_tl_objective(const GloveModel& model,
                          const CooccurrenceCounts& counts,
                          const DenseMatrix& pretrained, double lambda,
                          double x_max, double alpha) {
    check_model_counts(model, counts);
    if (pretrained.rows() != model.u.rows() ||
        pretrained.cols() != model.u.cols()) {
        throw DimensionError("pretrained shape must match embeddings");
    }
    return smooth_loss(model, ordered_cells(counts, x_max, alpha)) +
           group_penalty(model, pretrained, lambda);
}

double glove_mittens_objective(const GloveModel& model,
                               const CooccurrenceCounts& counts,
                               const DenseMatrix& pretrained, double lambda,
                               double x_max, double alpha) {
    check_model_counts(model, counts);
    if (pretrained.rows() != model.u.rows() ||
        pretrained.cols() != model.u.cols()) {
        throw DimensionError("pretrained shape must match embeddings");
    }
    return smooth_loss(model, ordered_cells(counts, x_max, alpha)) +
           squared_penalty(model, pretrained, lambda);
}

void joint_sum_prox(std::span<double> u, std::span<double> v,
                    std::span<const double> a, double lambda, double eta) {
    if (u.size() != v.size() || u.size() != a.size()) {
        throw DimensionError("joint_sum_prox: length mismatch");
    }
    if (lambda < 0.0 || !(eta > 0.0)) {
        throw ValueError("joint_sum_prox: lambda >= 0, eta > 0");
    }
    const index_t r = u.size();
    double dist2 = 0.0;
    for (index_t k = 0; k < r; ++k) {
        const double s = u[k] + v[k] - a[k];
        dist2 += s * s;
    }
    const double dist = std::sqrt(dist2);
    const double t = 2.0 * lambda * eta;
    const double shrink = dist <= t ? 0.0 : 1.0 - t / dist;
    for (index_t k = 0; k < r; ++k) {
        const double s = u[k] + v[k] - a[k];
        const double w = 0.5 * (shrink - 1.0) * s;
        u[k] += w;
        v[k] += w;
    }
}

std::pair<DenseMatrix, DenseMatrix> mittens_penalty_gradient(
    const GloveModel& model, const DenseMatrix& pretrained, double lambda) {
    if (pretrained.rows() != model.u.rows() ||
        pretrained.cols() != model.u.cols()) {
        throw DimensionError("pretrained shape must match embeddings");
    }
    const index_t d = model.u.rows();
    const index_t r = model.u.cols();
    DenseMatrix du(d, r), dv(d, r);
    for (index_t i = 0; i < d; ++i) {
        for (index_t k = 0; k < r; ++k) {
            const double g =
                2.0 * lambda * (model.u(i, k) + model.v(i, k) - pretrained(i, k));
            du(i, k) = g;
            dv(i, k) = g;
        }
    }
    return {std::move(du), std::move(dv)};
}

GloveFit fit_glove_transfer(const CooccurrenceCounts& counts,
                            const DenseMatrix& pretrained, double lambda,
                            const GloveConfig& cfg) {
    return fit_core(counts, &pretrained, lambda, PenaltyKind::Group, cfg);
}

GloveFit fit_mittens(const CooccurrenceCounts& counts,
                     const DenseMatrix& pretrained, double lambda,
                     const GloveConfig& cfg) {
    return fit_core(counts, &pretrained, lambda, PenaltyKind::Squared, cfg);
}

GloveFit fit_glove_plain(const CooccurrenceCounts& counts,
                         const GloveConfig& cfg) {
    return fit_core(counts, nullptr, 0.0, PenaltyKind::None, cfg);
}

RankingResult rank_rows(const DenseMatrix& combined,
                        const DenseMatrix& pretrained,
                        const std::vector<std::string>& tokens) {
    if (combined.rows() != pretrained.rows() ||
        combined.cols() != pretrained.cols() ||
        tokens.size() != combined.rows()) {
        throw DimensionError("ranking inputs must share vocabulary and rank");
    }
    RankingResult result;
    result.ranked.reserve(tokens.size());
    const index_t r = combined.cols();
    std::vector<double> diff(r);
    for (index_t i = 0; i < combined.rows(); ++i) {
        for (index_t k = 0; k < r; ++k) {
            diff[k] = combined(i, k) - pretrained(i, k);
        }
        result.ranked.emplace_back(tokens[i],
                                   std::sqrt(kernels::sumsq(diff.data(), r)));
    }
    std::sort(result.ranked.begin(), result.ranked.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    return result;
}

RankingResult rank_domain_words(const GloveModel& model,
                                const DenseMatrix& pretrained,
                                const std::vector<std::string>& tokens) {
    return rank_rows(model.u + model.v, pretrained, tokens);
}

F1Result evaluate_f1(const RankingResult& ranking,
                     const std::unordered_set<std::string>& domain_words,
                     double top_fraction) {
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
        throw ValueError("evaluate_f1: top_fraction in (0, 1]");
    }
    // Only labels present in the ranked vocabulary form the positive class.
    index_t positives = 0;
    for (const auto& [token, score] : ranking.ranked) {
        (void)score;
        if (domain_words.count(token)) ++positives;
    }
    if (positives == 0) throw ValueError("evaluate_f1: empty labels");

    const index_t d = ranking.ranked.size();
    F1Result out;
    out.top_k = static_cast<index_t>(
        std::ceil(top_fraction * static_cast<double>(d)));
    out.top_k = std::min(out.top_k, d);
    for (index_t i = 0; i < out.top_k; ++i) {
        if (domain_words.count(ranking.ranked[i].first)) ++out.hits;
    }
    out.precision = out.top_k
                        ? static_cast<double>(out.hits) /
                              static_cast<double>(out.top_k)
                        : 0.0;
    out.recall = static_cast<double>(out.hits) /
                 static_cast<double>(positives);
    const double pr = out.precision + out.recall;
    out.f1 = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
    return out;
}

double weighted_f1(std::span<const F1Result> results,
                   std::span<const double> article_weights) {
    if (results.size() != article_weights.size() || results.empty()) {
        throw DimensionError("weighted_f1: one weight per article");
    }
    double num = 0.0;
    double den = 0.0;
    for (index_t i = 0; i < results.size(); ++i) {
        if (article_weights[i] < 0.0) {
            throw ValueError("weighted_f1: weights must be >= 0");
        }
        num += article_weights[i] * results[i].f1;
        den += article_weights[i];
    }
    if (den <= 0.0) throw ValueError("weighted_f1: total weight is zero");
    return num / den;
}

void write_embeddings(const std::string& path,
                      const std::vector<std::string>& tokens,
                      const DenseMatrix& vectors) {
    if (tokens.size() != vectors.rows()) {
        throw DimensionError("write_embeddings: one token per row");
    }
    std::string out;
    for (index_t i = 0; i < vectors.rows(); ++i) {
        out += tokens[i];
        for (index_t k = 0; k < vectors.cols(); ++k) {
            out += ' ';
            out += io::fmt17(vectors(i, k));
        }
        out += '\n';
    }
    io::write_text_file(path, out);
}

Embeddings read_embeddings(const std::string& path) {
    const std::string text = io::read_text_file(path);
    Embeddings emb;
    std::vector<double> data;
    index_t cols = 0;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string token;
        if (!(cells >> token)) continue;
        index_t this_cols = 0;
        double v = 0.0;
        while (cells >> v) {
            data.push_back(v);
            ++this_cols;
        }
        if (!cells.eof()) {
            throw DataError("bad embedding value at line " +
                            std::to_string(line_no) + " in " + path);
        }
        if (emb.tokens.empty()) {
            cols = this_cols;
        } else if (this_cols != cols) {
            throw DataError("inconsistent embedding dimension at line " +
                            std::to_string(line_no) + " in " + path);
        }
        emb.tokens.push_back(token);
    }
    if (cols == 0 && !emb.tokens.empty()) {
        throw DataError("embeddings in " + path + " have no values");
    }
    emb.vectors = DenseMatrix(emb.tokens.size(), cols, std::move(data));
    return emb;
}

DenseMatrix align_pretrained(const Embeddings& pretrained,
                             const Vocabulary& vocab) {
    std::unordered_map<std::string, index_t> where;
    for (index_t i = 0; i < pretrained.tokens.size(); ++i) {
        where.emplace(pretrained.tokens[i], i);
    }
    DenseMatrix out(vocab.size(), pretrained.vectors.cols());
    std::string missing;
    for (index_t id = 0; id < vocab.size(); ++id) {
        const auto it = where.find(vocab.tokens[id]);
        if (it == where.end()) {
            if (!missing.empty()) missing += ", ";
            missing += vocab.tokens[id];
            continue;
        }
        std::copy(pretrained.vectors.row(it->second),
                  pretrained.vectors.row(it->second) + pretrained.vectors.cols(),
                  out.row(id));
    }
    if (!missing.empty()) {
        throw DataError("tokens missing from pretrained embeddings: " + missing);
    }
    return out;
}

}  // namespace gstl
