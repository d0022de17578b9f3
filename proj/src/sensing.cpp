#include "gstl/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>

#include "gstl/errors.hpp"
#include "gstl/io.hpp"
#include "gstl/kernels.hpp"
#include "gstl/rng.hpp"

namespace gstl {

namespace {

constexpr index_t kMaterializeDimLimit = 64;

std::uint64_t observation_seed(std::uint64_t ensemble_seed, std::uint64_t i) {
    return hash_u64(derive_seed(ensemble_seed, "sensing_row"), i);
}

}  // namespace

MeasurementEnsemble MeasurementEnsemble::gaussian(index_t d, index_t n,
                                                  std::uint64_t seed,
                                                  GaussianStorage storage) {
    if (d == 0 || n == 0) throw ValueError("gaussian ensemble needs d, n >= 1");
    MeasurementEnsemble e;
    e.kind_ = EnsembleKind::GaussianDense;
    e.d_ = d;
    e.n_ = n;
    e.seed_ = seed;
    const bool materialize =
        storage == GaussianStorage::Materialized ||
        (storage == GaussianStorage::Auto && d <= kMaterializeDimLimit);
    if (materialize) {
        e.store_.resize(n * d * d);
        for (index_t i = 0; i < n; ++i) {
            e.fill_sensing_row(i, e.store_.data() + i * d * d);
        }
    }
    return e;
}

MeasurementEnsemble MeasurementEnsemble::word_pairs(
    index_t d, std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
    if (d == 0) throw ValueError("word-pair ensemble needs d >= 1");
    for (const auto& [j, k] : pairs) {
        if (j >= d || k >= d) {
            throw DimensionError("word-pair index out of range");
        }
    }
    MeasurementEnsemble e;
    e.kind_ = EnsembleKind::WordPairBasis;
    e.d_ = d;
    e.n_ = pairs.size();
    e.pairs_ = std::move(pairs);
    return e;
}

void MeasurementEnsemble::fill_sensing_row(index_t i, double* out) const {
    const std::uint64_t original =
        index_map_.empty() ? static_cast<std::uint64_t>(i) : index_map_[i];
    const RandomStream stream(observation_seed(seed_, original));
    const index_t len = d_ * d_;
    for (index_t k = 0; k < len; ++k) out[k] = stream.normal_at(k);
}

std::vector<double> MeasurementEnsemble::apply(const DenseMatrix& theta) const {
    if (theta.rows() != d_ || theta.cols() != d_) {
        throw DimensionError("apply: theta must be d x d");
    }
    std::vector<double> out(n_);
    if (kind_ == EnsembleKind::WordPairBasis) {
        for (index_t i = 0; i < n_; ++i) {
            out[i] = scale_ * theta(pairs_[i].first, pairs_[i].second);
        }
        return out;
    }
    const index_t len = d_ * d_;
    if (materialized()) {
        for (index_t i = 0; i < n_; ++i) {
            out[i] =
                scale_ * kernels::dot(store_.data() + i * len, theta.data(), len);
        }
    } else {
        std::vector<double> scratch(len);
        for (index_t i = 0; i < n_; ++i) {
            fill_sensing_row(i, scratch.data());
            out[i] = scale_ * kernels::dot(scratch.data(), theta.data(), len);
        }
    }
    return out;
}

DenseMatrix MeasurementEnsemble::adjoint(std::span<const double> eps) const {
    if (eps.size() != n_) {
        throw DimensionError("adjoint: weight vector length != n");
    }
    DenseMatrix g(d_, d_);
    if (kind_ == EnsembleKind::WordPairBasis) {
        for (index_t i = 0; i < n_; ++i) {
            g(pairs_[i].first, pairs_[i].second) += scale_ * eps[i];
        }
        return g;
    }
    const index_t len = d_ * d_;
    if (materialized()) {
        for (index_t i = 0; i < n_; ++i) {
            kernels::axpy(g.data(), scale_ * eps[i], store_.data() + i * len,
                          len);
        }
    } else {
        std::vector<double> scratch(len);
        for (index_t i = 0; i < n_; ++i) {
            fill_sensing_row(i, scratch.data());
            kernels::axpy(g.data(), scale_ * eps[i], scratch.data(), len);
        }
    }
    return g;
}

DenseMatrix MeasurementEnsemble::sensing_matrix(index_t i) const {
    if (i >= n_) throw DimensionError("sensing_matrix index out of range");
    DenseMatrix a(d_, d_);
    if (kind_ == EnsembleKind::WordPairBasis) {
        a(pairs_[i].first, pairs_[i].second) = scale_;
        return a;
    }
    if (materialized()) {
        const index_t len = d_ * d_;
        std::copy(store_.data() + i * len, store_.data() + (i + 1) * len,
                  a.data());
    } else {
        fill_sensing_row(i, a.data());
    }
    if (scale_ != 1.0) kernels::scale(a.data(), scale_, a.size());
    return a;
}

MeasurementEnsemble MeasurementEnsemble::subset(
    std::span<const index_t> indices) const {
    MeasurementEnsemble e;
    e.kind_ = kind_;
    e.d_ = d_;
    e.n_ = indices.size();
    e.scale_ = scale_;
    e.seed_ = seed_;
    if (kind_ == EnsembleKind::WordPairBasis) {
        e.pairs_.reserve(indices.size());
        for (index_t idx : indices) {
            if (idx >= n_) throw DimensionError("subset index out of range");
            e.pairs_.push_back(pairs_[idx]);
        }
        return e;
    }
    const index_t len = d_ * d_;
    if (materialized()) {
        e.store_.resize(indices.size() * len);
        for (index_t k = 0; k < indices.size(); ++k) {
            const index_t idx = indices[k];
            if (idx >= n_) throw DimensionError("subset index out of range");
            std::copy(store_.data() + idx * len, store_.data() + (idx + 1) * len,
                      e.store_.data() + k * len);
        }
    } else {
        e.index_map_.reserve(indices.size());
        for (index_t idx : indices) {
            if (idx >= n_) throw DimensionError("subset index out of range");
            e.index_map_.push_back(
                index_map_.empty() ? static_cast<std::uint64_t>(idx)
                                   : index_map_[idx]);
        }
    }
    return e;
}

MeasurementEnsemble MeasurementEnsemble::scaled(double c) const {
    MeasurementEnsemble e = *this;
    e.scale_ *= c;
    return e;
}

SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
    if (spec.s > spec.d) throw ValueError("generate_synthetic: s > d");
    if (spec.r > spec.d) throw ValueError("generate_synthetic: r > d");
    if (spec.r == 0 || spec.d == 0) {
        throw ValueError("generate_synthetic: d, r >= 1");
    }
    if (spec.sigma_g < 0.0 || spec.sigma_p < 0.0) {
        throw ValueError("generate_synthetic: sigma >= 0");
    }

    SyntheticInstance inst;

    // Proxy factor.
    inst.u_p_star = DenseMatrix(spec.d, spec.r);
    {
        const RandomStream stream(derive_seed(spec.seed, "u_p_star"));
        for (index_t k = 0; k < inst.u_p_star.size(); ++k) {
            inst.u_p_star.data()[k] = stream.normal_at(k);
        }
    }

    // Uniform support without replacement, via a partial Fisher-Yates.
    {
        std::vector<index_t> perm(spec.d);
        std::iota(perm.begin(), perm.end(), index_t{0});
        Rng rng(derive_seed(spec.seed, "support"));
        for (index_t i = 0; i < spec.s; ++i) {
            const index_t j = i + rng.index(spec.d - i);
            std::swap(perm[i], perm[j]);
        }
        inst.support.assign(perm.begin(), perm.begin() + spec.s);
        std::sort(inst.support.begin(), inst.support.end());
    }

    inst.delta_star = DenseMatrix(spec.d, spec.r);
    for (index_t j : inst.support) {
        for (index_t k = 0; k < spec.r; ++k) {
            inst.delta_star(j, k) = spec.shift_value;
        }
    }
    inst.u_g_star = inst.u_p_star + inst.delta_star;

    inst.proxy_ensemble = MeasurementEnsemble::gaussian(
        spec.d, spec.n_p, derive_seed(spec.seed, "proxy_ensemble"));
    inst.gold_ensemble = MeasurementEnsemble::gaussian(
        spec.d, spec.n_g, derive_seed(spec.seed, "gold_ensemble"));

    const DenseMatrix theta_p = gram_uu_t(inst.u_p_star);
    const DenseMatrix theta_g = gram_uu_t(inst.u_g_star);

    inst.proxy_obs.x = inst.proxy_ensemble.apply(theta_p);
    inst.proxy_obs.sigma = spec.sigma_p;
    {
        const RandomStream noise(derive_seed(spec.seed, "proxy_noise"));
        for (index_t i = 0; i < spec.n_p; ++i) {
            inst.proxy_obs.x[i] += spec.sigma_p * noise.normal_at(i);
        }
    }

    inst.gold_obs.x = inst.gold_ensemble.apply(theta_g);
    inst.gold_obs.sigma = spec.sigma_g;
    {
        const RandomStream noise(derive_seed(spec.seed, "gold_noise"));
        for (index_t i = 0; i < spec.n_g; ++i) {
            inst.gold_obs.x[i] += spec.sigma_g * noise.normal_at(i);
        }
    }

    return inst;
}

MeasurementEnsemble word_pair_ensemble_full(index_t d, index_t n_per_pair) {
    if (d == 0 || n_per_pair == 0) {
        throw ValueError("word_pair_ensemble_full: d, n_per_pair >= 1");
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(d * d * n_per_pair);
    for (index_t j = 0; j < d; ++j) {
        for (index_t k = 0; k < d; ++k) {
            for (index_t rep = 0; rep < n_per_pair; ++rep) {
                pairs.emplace_back(static_cast<std::uint32_t>(j),
                                   static_cast<std::uint32_t>(k));
            }
        }
    }
    return MeasurementEnsemble::word_pairs(d, std::move(pairs));
}

std::pair<MeasurementEnsemble, Observations> sample_word_pair_bernoulli(
    const DenseMatrix& theta, index_t n_per_pair, std::uint64_t seed) {
    if (theta.rows() != theta.cols()) {
        throw DimensionError("bernoulli sampling needs a square theta");
    }
    for (index_t k = 0; k < theta.size(); ++k) {
        const double p = theta.data()[k];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValueError("bernoulli sampling: theta entries must be in [0,1]");
        }
    }
    MeasurementEnsemble ens =
        word_pair_ensemble_full(theta.rows(), n_per_pair);
    Observations obs;
    obs.sigma = 0.5;  // Bernoulli indicators are 1/2-subgaussian
    obs.x.resize(ens.size());
    const RandomStream stream(derive_seed(seed, "bernoulli"));
    for (index_t i = 0; i < ens.size(); ++i) {
        const auto [j, k] = ens.pairs()[i];
        obs.x[i] = stream.uniform_at(i) < theta(j, k) ? 1.0 : 0.0;
    }
    return {std::move(ens), std::move(obs)};
}

void save_instance_csv(const SyntheticInstance& inst, const SyntheticSpec& spec,
                       const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto path = [&](const char* name) {
        return (fs::path(dir) / name).string();
    };
    io::write_matrix_csv(path("u_p_star.csv"), inst.u_p_star);
    io::write_matrix_csv(path("delta_star.csv"), inst.delta_star);
    io::write_matrix_csv(path("u_g_star.csv"), inst.u_g_star);
    io::write_vector_lines(path("x_p.csv"), inst.proxy_obs.x);
    io::write_vector_lines(path("x_g.csv"), inst.gold_obs.x);
    std::string manifest;
    manifest += "d = " + std::to_string(spec.d) + "\n";
    manifest += "r = " + std::to_string(spec.r) + "\n";
    manifest += "s = " + std::to_string(spec.s) + "\n";
    manifest += "n_g = " + std::to_string(spec.n_g) + "\n";
    manifest += "n_p = " + std::to_string(spec.n_p) + "\n";
    manifest += "sigma_g = " + io::fmt17(spec.sigma_g) + "\n";
    manifest += "sigma_p = " + io::fmt17(spec.sigma_p) + "\n";
    manifest += "shift_value = " + io::fmt17(spec.shift_value) + "\n";
    manifest += "seed = " + std::to_string(spec.seed) + "\n";
    io::write_text_file(path("manifest.txt"), manifest);
}

SyntheticInstance load_instance_csv(const std::string& dir,
                                    SyntheticSpec* spec_out) {
    namespace fs = std::filesystem;
    const auto path = [&](const char* name) {
        return (fs::path(dir) / name).string();
    };
    const io::Config manifest = io::Config::parse_file(
        path("manifest.txt"),
        {"d", "r", "s", "n_g", "n_p", "sigma_g", "sigma_p", "shift_value",
         "seed"});
    SyntheticSpec spec;
    spec.d = manifest.get_u64("d");
    spec.r = manifest.get_u64("r");
    spec.s = manifest.get_u64("s");
    spec.n_g = manifest.get_u64("n_g");
    spec.n_p = manifest.get_u64("n_p");
    spec.sigma_g = manifest.get_double("sigma_g");
    spec.sigma_p = manifest.get_double("sigma_p");
    spec.shift_value = manifest.get_double("shift_value");
    spec.seed = manifest.get_u64("seed");

    SyntheticInstance inst;
    inst.u_p_star = io::read_matrix_csv(path("u_p_star.csv"));
    inst.delta_star = io::read_matrix_csv(path("delta_star.csv"));
    inst.u_g_star = io::read_matrix_csv(path("u_g_star.csv"));
    inst.proxy_obs.x = io::read_vector_lines(path("x_p.csv"));
    inst.proxy_obs.sigma = spec.sigma_p;
    inst.gold_obs.x = io::read_vector_lines(path("x_g.csv"));
    inst.gold_obs.sigma = spec.sigma_g;
    if (inst.proxy_obs.x.size() != spec.n_p ||
        inst.gold_obs.x.size() != spec.n_g) {
        throw DataError("instance observations do not match manifest sizes");
    }
    inst.proxy_ensemble = MeasurementEnsemble::gaussian(
        spec.d, spec.n_p, derive_seed(spec.seed, "proxy_ensemble"));
    inst.gold_ensemble = MeasurementEnsemble::gaussian(
        spec.d, spec.n_g, derive_seed(spec.seed, "gold_ensemble"));
    for (index_t j = 0; j < spec.d; ++j) {
        double norm = 0.0;
        for (index_t k = 0; k < spec.r; ++k) {
            norm += inst.delta_star(j, k) * inst.delta_star(j, k);
        }
        if (norm > 0.0) inst.support.push_back(j);
    }
    if (spec_out) *spec_out = spec;
    return inst;
}

}  // namespace gstl
