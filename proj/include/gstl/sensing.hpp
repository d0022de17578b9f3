#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gstl/matrix.hpp"

namespace gstl {

enum class EnsembleKind { GaussianDense, WordPairBasis };

enum class GaussianStorage {
    Auto,          // materialize for d <= 64, stream above
    Materialized,  // force stored sensing matrices
    Streamed,      // force regeneration from the counter-based stream
};

// The linear measurement operator: a tagged collection of d x d sensing
// matrices. Gaussian ensembles are seeded; the same seed regenerates the
// same matrices whether they are stored or streamed. Word-pair ensembles
// hold one (j, k) basis index pair per observation. Immutable once built.
class MeasurementEnsemble {
  public:
    MeasurementEnsemble() = default;  // empty; assign before use

    static MeasurementEnsemble gaussian(index_t d, index_t n,
                                        std::uint64_t seed,
                                        GaussianStorage storage =
                                            GaussianStorage::Auto);
    static MeasurementEnsemble word_pairs(
        index_t d, std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);

    EnsembleKind kind() const { return kind_; }
    index_t dim() const { return d_; }
    index_t size() const { return n_; }
    std::uint64_t seed() const { return seed_; }
    bool materialized() const { return !store_.empty(); }
    double scale_factor() const { return scale_; }

    // (A(theta))_i = <A_i, theta>
    std::vector<double> apply(const DenseMatrix& theta) const;

    // A*(eps) = sum_i eps_i A_i
    DenseMatrix adjoint(std::span<const double> eps) const;

    // Materializes A_i; meant for probes and test oracles.
    DenseMatrix sensing_matrix(index_t i) const;

    // Sub-ensemble of the selected observations (cross-validation folds).
    MeasurementEnsemble subset(std::span<const index_t> indices) const;

    // Same ensemble with every A_i multiplied by c.
    MeasurementEnsemble scaled(double c) const;

    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs() const {
        return pairs_;
    }

  private:
    void fill_sensing_row(index_t i, double* out) const;

    EnsembleKind kind_ = EnsembleKind::GaussianDense;
    index_t d_ = 0;
    index_t n_ = 0;
    double scale_ = 1.0;
    // Gaussian
    std::uint64_t seed_ = 0;
    std::vector<double> store_;            // n rows of d*d entries when materialized
    std::vector<std::uint64_t> index_map_;  // original indices for streamed subsets
    // Word pairs
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
};

// Observed responses with their noise scale (subgaussian parameter).
struct Observations {
    std::vector<double> x;
    double sigma = 0.0;
};

struct SyntheticSpec {
    index_t d = 20;
    index_t r = 5;
    index_t s = 2;
    index_t n_g = 50;
    index_t n_p = 5000;
    double sigma_g = 1.0;
    double sigma_p = 1.0;
    double shift_value = 1.0;
    std::uint64_t seed = 0;
};

struct SyntheticInstance {
    MeasurementEnsemble proxy_ensemble;
    Observations proxy_obs;
    MeasurementEnsemble gold_ensemble;
    Observations gold_obs;
    DenseMatrix u_p_star;
    DenseMatrix delta_star;
    DenseMatrix u_g_star;
    std::vector<index_t> support;  // sorted row indices of the planted shift
};

// Planted-shift generator: U*_p has i.i.d. standard normal entries, the
// shift matrix has s uniformly chosen rows filled with shift_value, and the
// responses carry Gaussian noise at the requested scales. Fully determined
// by spec.seed.
SyntheticInstance generate_synthetic(const SyntheticSpec& spec);

// Deterministic enumeration of all d^2 basis pairs, each observed
// n_per_pair times.
MeasurementEnsemble word_pair_ensemble_full(index_t d, index_t n_per_pair);

// Sampling-with-replacement view of word-pair observations: for every pair
// (j, k), n_per_pair Bernoulli indicators with success probability
// theta(j, k). Entries of theta must be probabilities. sigma is 1/2.
std::pair<MeasurementEnsemble, Observations> sample_word_pair_bernoulli(
    const DenseMatrix& theta, index_t n_per_pair, std::uint64_t seed);

// Directory-of-CSV serialization: factor matrices as CSV, observations one
// value per line, and a manifest of the generator parameters. Ensembles are
// reconstructed from the recorded seed on load.
void save_instance_csv(const SyntheticInstance& inst, const SyntheticSpec& spec,
                       const std::string& dir);
SyntheticInstance load_instance_csv(const std::string& dir,
                                    SyntheticSpec* spec_out = nullptr);

}  // namespace gstl
