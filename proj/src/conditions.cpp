#include "gstl/conditions.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gstl/errors.hpp"
#include "gstl/kernels.hpp"
#include "gstl/rng.hpp"
#include "gstl/threads.hpp"

namespace gstl {

namespace {

DenseMatrix gaussian_matrix(index_t rows, index_t cols,
                            const RandomStream& stream,
                            std::uint64_t offset = 0) {
    DenseMatrix m(rows, cols);
    for (index_t k = 0; k < m.size(); ++k) {
        m.data()[k] = stream.normal_at(offset + k);
    }
    return m;
}

// Z = A B^T has rank <= r by construction.
DenseMatrix random_low_rank(index_t d, index_t r, const RandomStream& stream) {
    const DenseMatrix a = gaussian_matrix(d, r, stream, 0);
    const DenseMatrix b = gaussian_matrix(d, r, stream, d * r);
    return matmul(a, transpose(b));
}

double operator_ratio(const MeasurementEnsemble& ens, const DenseMatrix& z) {
    const std::vector<double> az = ens.apply(z);
    const double num = kernels::sumsq(az.data(), az.size()) /
                       static_cast<double>(ens.size());
    const double den = kernels::sumsq(z.data(), z.size());
    return num / den;
}

// W = D U*^T + U* D^T + D D^T, the exact second-order expansion of
// (U* + D)(U* + D)^T - U* U*^T.
DenseMatrix shift_image(const DenseMatrix& u_star, const DenseMatrix& delta) {
    const DenseMatrix cross = matmul(delta, transpose(u_star));
    return cross + transpose(cross) + matmul(delta, transpose(delta));
}

}  // namespace

double sigma_max(const DenseMatrix& u) {
    const DenseMatrix gram = matmul_at_b(u, u);
    const index_t r = gram.rows();
    Eigen::MatrixXd ge(r, r);
    for (index_t i = 0; i < r; ++i) {
        for (index_t j = 0; j < r; ++j) ge(i, j) = gram(i, j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ge);
    return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

std::pair<double, double> estimate_rwc(const MeasurementEnsemble& ens,
                                       index_t r, index_t samples,
                                       std::uint64_t seed) {
    if (samples == 0) throw ValueError("estimate_rwc: samples >= 1");
    const index_t d = ens.dim();
    std::vector<double> ratios(samples);
    parallel_for(samples, [&](index_t s) {
        const RandomStream stream(hash_u64(derive_seed(seed, "rwc"), s));
        DenseMatrix z = random_low_rank(d, r, stream);
        ratios[s] = operator_ratio(ens, z);
    });
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    return {*lo, *hi};
}

double estimate_smoothness(const MeasurementEnsemble& ens, index_t r,
                           index_t samples, std::uint64_t seed) {
    if (samples == 0) throw ValueError("estimate_smoothness: samples >= 1");
    const index_t d = ens.dim();
    std::vector<double> ratios(samples);
    parallel_for(samples, [&](index_t s) {
        const RandomStream stream(hash_u64(derive_seed(seed, "smooth"), s));
        DenseMatrix z = random_low_rank(d, r, stream);
        ratios[s] = operator_ratio(ens, z);
    });
    double best = *std::max_element(ratios.begin(), ratios.end());

    if (r == 1) {
        // Rank-one basis probes, used directly by the penalty-level theory.
        for (index_t l = 0; l < d; ++l) {
            for (index_t k = 0; k < d; ++k) {
                DenseMatrix e(d, d);
                e(l, k) = 1.0;
                best = std::max(best, operator_ratio(ens, e));
            }
        }
    }
    return best;
}

double estimate_qcc(const MeasurementEnsemble& ens, const DenseMatrix& u_star,
                    std::span<const index_t> support, index_t samples,
                    std::uint64_t seed, double cone_factor) {
    if (samples == 0) throw ValueError("estimate_qcc: samples >= 1");
    if (support.empty()) throw ValueError("estimate_qcc: support is empty");
    if (!(cone_factor > 0.0)) throw ValueError("estimate_qcc: cone factor > 0");
    const index_t d = u_star.rows();
    const index_t r = u_star.cols();
    if (d != ens.dim()) throw DimensionError("u_star rows != ensemble dim");

    std::vector<bool> in_support(d, false);
    for (index_t j : support) {
        if (j >= d) throw DimensionError("support index out of range");
        in_support[j] = true;
    }
    const double s_count = static_cast<double>(support.size());

    std::vector<double> ratios(samples);
    parallel_for(samples, [&](index_t s) {
        const std::uint64_t sample_seed = hash_u64(derive_seed(seed, "qcc"), s);
        for (std::uint64_t attempt = 0;; ++attempt) {
            const RandomStream stream(hash_u64(sample_seed, attempt));
            DenseMatrix delta = gaussian_matrix(d, r, stream);
            const RowGroupNorms norms = row_norms(delta);
            double sum_j = 0.0;
            double sum_jc = 0.0;
            for (index_t j = 0; j < d; ++j) {
                (in_support[j] ? sum_j : sum_jc) += norms.norms[j];
            }
            if (sum_j <= 0.0) continue;  // degenerate draw, resample

            if (sum_jc > 0.0) {
                // Rescale the off-support block into the cone with random slack.
                const double u = u64_to_unit(stream.bits_at(2 * d * r + 7));
                const double factor = u * cone_factor * sum_j / sum_jc;
                for (index_t j = 0; j < d; ++j) {
                    if (!in_support[j]) {
                        kernels::scale(delta.row(j), factor, r);
                    }
                }
            }

            const DenseMatrix w = shift_image(u_star, delta);
            const std::vector<double> aw = ens.apply(w);
            const double quad = kernels::sumsq(aw.data(), aw.size()) /
                                static_cast<double>(ens.size());
            ratios[s] = quad * s_count / (sum_j * sum_j);
            break;
        }
    });
    return *std::min_element(ratios.begin(), ratios.end());
}

double rsc_c6_identity(double sigma1_ustar, double lbar) {
    return 2.0 * lbar + 2.0 * sigma1_ustar;
}

double check_rsc_gaussian_identity(index_t d, index_t r, index_t n,
                                   const DenseMatrix& u_star, double lbar,
                                   index_t trials, std::uint64_t seed) {
    if (trials == 0) throw ValueError("rsc check: trials >= 1");
    if (u_star.rows() != d || u_star.cols() != r) {
        throw DimensionError("rsc check: u_star must be d x r");
    }
    if (!(lbar > 0.0)) throw ValueError("rsc check: lbar > 0");

    const double c6 = rsc_c6_identity(sigma_max(u_star), lbar);
    const double nd = static_cast<double>(n);
    const double slack =
        3.0 * c6 *
        (2.0 * std::sqrt(static_cast<double>(r) / nd) +
         3.0 * std::sqrt(std::log(static_cast<double>(d)) / nd));

    std::vector<int> pass(trials, 0);
    parallel_for(trials, [&](index_t t) {
        const std::uint64_t trial_seed = hash_u64(derive_seed(seed, "rsc"), t);
        const MeasurementEnsemble ens = MeasurementEnsemble::gaussian(
            d, n, trial_seed, GaussianStorage::Streamed);

        const RandomStream stream(hash_u64(trial_seed, 0x515Cull));
        DenseMatrix delta = gaussian_matrix(d, r, stream);
        const double norm21 = l21_norm(delta);
        const double target =
            u64_to_unit_pos(stream.bits_at(2 * d * r + 13)) * lbar;
        if (norm21 > 0.0) delta *= target / norm21;

        const DenseMatrix w = shift_image(u_star, delta);
        const std::vector<double> aw = ens.apply(w);
        const double lhs =
            std::sqrt(kernels::sumsq(aw.data(), aw.size()) / nd);
        const double rhs = 0.25 * w.frobenius_norm() - slack * l21_norm(delta);
        pass[t] = lhs >= rhs ? 1 : 0;
    });

    index_t count = 0;
    for (int v : pass) count += v;
    return static_cast<double>(count) / static_cast<double>(trials);
}

}  // namespace gstl
