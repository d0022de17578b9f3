#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gstl/errors.hpp"
#include "gstl/kernels.hpp"
#include "gstl/rng.hpp"
#include "gstl/sensing.hpp"
#include "oracles.hpp"

using namespace gstl;

TEST_CASE("word-pair apply picks single entries") {
    const MeasurementEnsemble ens =
        MeasurementEnsemble::word_pairs(4, {{2, 3}});
    DenseMatrix theta(4, 4);
    theta(2, 3) = 0.7;
    const auto out = ens.apply(theta);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == doctest::Approx(0.7));
}

TEST_CASE("apply is linear and matches the trace for an identity matrix") {
    Rng rng(3);
    const DenseMatrix theta = oracle::gaussian_matrix(5, 5, rng);
    // A word-pair ensemble enumerating the diagonal acts like a trace.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> diag;
    for (std::uint32_t i = 0; i < 5; ++i) diag.emplace_back(i, i);
    const MeasurementEnsemble ens = MeasurementEnsemble::word_pairs(5, diag);
    const auto out = ens.apply(theta);
    double trace = 0.0;
    for (index_t i = 0; i < 5; ++i) trace += theta(i, i);
    double sum = 0.0;
    for (double v : out) sum += v;
    CHECK(sum == doctest::Approx(trace).epsilon(1e-14));

    CHECK(ens.apply(DenseMatrix(5, 5)) == std::vector<double>(5, 0.0));
}

TEST_CASE("apply rejects shape mismatches") {
    const MeasurementEnsemble ens = MeasurementEnsemble::gaussian(4, 3, 1);
    CHECK_THROWS_AS(ens.apply(DenseMatrix(3, 3)), DimensionError);
    CHECK_THROWS_AS(ens.adjoint(std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("adjoint basics") {
    const MeasurementEnsemble ens =
        MeasurementEnsemble::word_pairs(3, {{1, 2}, {0, 0}});
    const DenseMatrix g = ens.adjoint(std::vector<double>{1.0, 0.0});
    CHECK(g(1, 2) == 1.0);
    CHECK(g.frobenius_norm() == 1.0);
    CHECK(ens.adjoint(std::vector<double>{0.0, 0.0}).frobenius_norm() == 0.0);
}

TEST_CASE("adjoint identity <A*(e), Z> = <e, A(Z)> on random triples") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const index_t d = 3 + trial % 4;
        const index_t n = 5 + trial % 7;
        const MeasurementEnsemble ens = MeasurementEnsemble::gaussian(
            d, n, 1000 + trial,
            trial % 2 ? GaussianStorage::Materialized
                      : GaussianStorage::Streamed);
        const DenseMatrix z = oracle::gaussian_matrix(d, d, rng);
        std::vector<double> eps(n);
        for (double& e : eps) e = rng.normal();

        const double lhs = matrix_dot(ens.adjoint(eps), z);
        const auto az = ens.apply(z);
        const double rhs = kernels::dot(eps.data(), az.data(), n);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("materialized and streamed gaussian ensembles agree bitwise") {
    const MeasurementEnsemble stored = MeasurementEnsemble::gaussian(
        6, 9, 99, GaussianStorage::Materialized);
    const MeasurementEnsemble streamed = MeasurementEnsemble::gaussian(
        6, 9, 99, GaussianStorage::Streamed);
    Rng rng(11);
    const DenseMatrix z = oracle::gaussian_matrix(6, 6, rng);
    CHECK(stored.apply(z) == streamed.apply(z));

    std::vector<double> eps(9);
    for (double& e : eps) e = rng.normal();
    CHECK(stored.adjoint(eps) == streamed.adjoint(eps));

    // Subsets keep the identity.
    const std::vector<index_t> pick = {1, 4, 7};
    CHECK(stored.subset(pick).apply(z) == streamed.subset(pick).apply(z));
}

TEST_CASE("word_pair_ensemble_full enumerates every pair") {
    const MeasurementEnsemble ens = word_pair_ensemble_full(2, 1);
    REQUIRE(ens.size() == 4);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> seen = ens.pairs();
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<std::pair<std::uint32_t, std::uint32_t>>{
                      {0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK_THROWS_AS(word_pair_ensemble_full(2, 0), ValueError);
}

TEST_CASE("full word-pair ensemble scales the frobenius norm by 1/d^2") {
    Rng rng(13);
    const index_t d = 3;
    const MeasurementEnsemble ens = word_pair_ensemble_full(d, 2);
    const DenseMatrix z = oracle::gaussian_matrix(d, d, rng);
    const auto az = ens.apply(z);
    const double lhs = kernels::sumsq(az.data(), az.size()) /
                       static_cast<double>(ens.size());
    const double rhs =
        kernels::sumsq(z.data(), z.size()) / static_cast<double>(d * d);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
}

TEST_CASE("generate_synthetic plants the advertised structure") {
    SyntheticSpec spec;
    spec.d = 20;
    spec.r = 5;
    spec.s = 2;
    spec.n_g = 50;
    spec.n_p = 200;  // small here; the experiment uses 5000
    spec.seed = 42;
    const SyntheticInstance inst = generate_synthetic(spec);

    REQUIRE(inst.support.size() == 2);
    index_t nonzero_rows = 0;
    for (index_t j = 0; j < spec.d; ++j) {
        double norm = 0.0;
        for (index_t k = 0; k < spec.r; ++k) {
            norm += inst.delta_star(j, k) * inst.delta_star(j, k);
        }
        if (norm > 0.0) {
            ++nonzero_rows;
            CHECK(std::find(inst.support.begin(), inst.support.end(), j) !=
                  inst.support.end());
            for (index_t k = 0; k < spec.r; ++k) {
                CHECK(inst.delta_star(j, k) == 1.0);
            }
        }
    }
    CHECK(nonzero_rows == spec.s);
    CHECK(inst.u_g_star == inst.u_p_star + inst.delta_star);
    CHECK(inst.proxy_obs.x.size() == spec.n_p);
    CHECK(inst.gold_obs.x.size() == spec.n_g);
}

TEST_CASE("generate_synthetic is deterministic and validates inputs") {
    SyntheticSpec spec;
    spec.d = 8;
    spec.r = 2;
    spec.s = 3;
    spec.n_g = 10;
    spec.n_p = 20;
    spec.seed = 7;
    const SyntheticInstance a = generate_synthetic(spec);
    const SyntheticInstance b = generate_synthetic(spec);
    CHECK(a.u_p_star == b.u_p_star);
    CHECK(a.proxy_obs.x == b.proxy_obs.x);
    CHECK(a.gold_obs.x == b.gold_obs.x);
    CHECK(a.support == b.support);

    SyntheticSpec bad = spec;
    bad.s = 9;
    CHECK_THROWS_AS(generate_synthetic(bad), ValueError);
    bad = spec;
    bad.r = 9;
    CHECK_THROWS_AS(generate_synthetic(bad), ValueError);
}

TEST_CASE("noiseless observations equal the operator image exactly") {
    SyntheticSpec spec;
    spec.d = 6;
    spec.r = 2;
    spec.s = 1;
    spec.n_g = 12;
    spec.n_p = 15;
    spec.sigma_g = 0.0;
    spec.sigma_p = 0.0;
    spec.seed = 5;
    const SyntheticInstance inst = generate_synthetic(spec);
    const auto expect_g = inst.gold_ensemble.apply(gram_uu_t(inst.u_g_star));
    CHECK(inst.gold_obs.x == expect_g);
    const auto expect_p = inst.proxy_ensemble.apply(gram_uu_t(inst.u_p_star));
    CHECK(inst.proxy_obs.x == expect_p);
}

TEST_CASE("support has uniform-ish coverage across seeds") {
    SyntheticSpec spec;
    spec.d = 10;
    spec.r = 2;
    spec.s = 1;
    spec.n_g = 4;
    spec.n_p = 4;
    std::vector<int> hits(spec.d, 0);
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        spec.seed = seed;
        ++hits[generate_synthetic(spec).support[0]];
    }
    for (int h : hits) CHECK(h > 10);  // ~40 expected per row
}

TEST_CASE("bernoulli word-pair sampling has matching means") {
    DenseMatrix theta(2, 2, {0.5, 0.1, 0.2, 0.05});
    const auto [ens, obs] = sample_word_pair_bernoulli(theta, 4000, 31);
    REQUIRE(obs.x.size() == 4 * 4000);
    CHECK(obs.sigma == 0.5);
    double mean00 = 0.0;
    for (index_t i = 0; i < ens.size(); ++i) {
        if (ens.pairs()[i] == std::make_pair(0u, 0u)) mean00 += obs.x[i];
        CHECK((obs.x[i] == 0.0 || obs.x[i] == 1.0));
    }
    CHECK(mean00 / 4000.0 == doctest::Approx(0.5).epsilon(0.05));

    DenseMatrix bad(1, 1, {1.5});
    CHECK_THROWS_AS(sample_word_pair_bernoulli(bad, 1, 0), ValueError);
}

TEST_CASE("instance CSV round-trip") {
    SyntheticSpec spec;
    spec.d = 5;
    spec.r = 2;
    spec.s = 2;
    spec.n_g = 7;
    spec.n_p = 9;
    spec.seed = 77;
    const SyntheticInstance inst = generate_synthetic(spec);

    const auto dir = std::filesystem::temp_directory_path() / "gstl_inst_rt";
    std::filesystem::remove_all(dir);
    save_instance_csv(inst, spec, dir.string());

    SyntheticSpec spec2;
    const SyntheticInstance back = load_instance_csv(dir.string(), &spec2);
    CHECK(spec2.seed == spec.seed);
    CHECK(back.u_p_star == inst.u_p_star);
    CHECK(back.u_g_star == inst.u_g_star);
    CHECK(back.proxy_obs.x == inst.proxy_obs.x);
    CHECK(back.gold_obs.x == inst.gold_obs.x);
    CHECK(back.support == inst.support);

    // The reconstructed ensemble is the original one.
    Rng rng(1);
    const DenseMatrix z = oracle::gaussian_matrix(5, 5, rng);
    CHECK(back.gold_ensemble.apply(z) == inst.gold_ensemble.apply(z));
    std::filesystem::remove_all(dir);
}
