#include <doctest.h>

#include <cmath>
#include <vector>

#include "ztpc/errors.hpp"
#include "ztpc/kruskal.hpp"
#include "ztpc/observation_set.hpp"
#include "ztpc/problem_gen.hpp"

using namespace ztpc;

TEST_CASE("config validation enforces the entry-range and rank contracts") {
    const Shape s({4, 4, 4});
    CHECK_NOTHROW(validate(GenConfig{s, 2, 1.0, 2.5, 0}));
    CHECK_NOTHROW(validate(GenConfig{s, 1, 2.0, 2.0, 0}));  // beta == alpha is fine
    CHECK_THROWS_AS(validate(GenConfig{s, 2, 2.5, 1.0, 0}), contract_error);
    CHECK_THROWS_AS(validate(GenConfig{s, 2, 0.0, 1.0, 0}), contract_error);
    CHECK_THROWS_AS(validate(GenConfig{s, 2, -1.0, 1.0, 0}), contract_error);
    CHECK_THROWS_AS(validate(GenConfig{s, 0, 1.0, 2.5, 0}), contract_error);
}

TEST_CASE("generate_truth: factor entries live in the per-mode range") {
    // For entries of the reconstruction to land in [beta, alpha], each factor
    // entry is drawn from [(beta/R)^(1/N), (alpha/R)^(1/N)]; with beta = 1,
    // alpha = 2.5, N = 3, R = 5 that interval is [0.58480355, 0.79370053].
    const GenConfig cfg{Shape({6, 6, 6}), 5, 1.0, 2.5, 42};
    SubstreamRng rng(cfg.seed, "truth");
    const auto truth = generate_truth(cfg, rng);

    REQUIRE(truth.rank() == 5);
    CHECK((truth.weights().array() == 1.0).all());
    for (int n = 0; n < 3; ++n) {
        CHECK(truth.factor(n).minCoeff() >= 0.5848035476425731);
        CHECK(truth.factor(n).maxCoeff() <= 0.7937005259840998);
    }
}

TEST_CASE("generate_truth: every reconstructed entry lands in [beta, alpha]") {
    const GenConfig cfg{Shape({5, 4, 3}), 3, 0.5, 4.0, 7};
    SubstreamRng rng(cfg.seed, "truth");
    const auto truth = generate_truth(cfg, rng);
    const auto dense = kruskal_to_dense(truth);
    for (double v : dense.values()) {
        CHECK(v >= 0.5);
        CHECK(v <= 4.0);
    }
}

TEST_CASE("generate_truth is deterministic in (seed, stream)") {
    const GenConfig cfg{Shape({4, 4, 4}), 2, 1.0, 2.5, 99};
    SubstreamRng r1(cfg.seed, "truth"), r2(cfg.seed, "truth");
    const auto a = generate_truth(cfg, r1);
    const auto b = generate_truth(cfg, r2);
    for (int n = 0; n < 3; ++n) CHECK((a.factor(n).array() == b.factor(n).array()).all());
}

TEST_CASE("sample_omega: requested size, valid members, and the full shortcut") {
    const Shape s({4, 5, 3});
    SubstreamRng rng(11, "omega");

    const auto part = sample_omega(s, 17, rng);
    CHECK(part.size() == 17);
    CHECK(!part.is_full());
    for (index_t k = 0; k < part.size(); ++k) {
        CHECK(part.index_at(k) >= 0);
        CHECK(part.index_at(k) < s.num_entries());
    }

    const auto all = sample_omega(s, s.num_entries(), rng);
    CHECK(all.is_full());

    CHECK_THROWS_AS((void)sample_omega(s, s.num_entries() + 1, rng), contract_error);
}

TEST_CASE("sample_counts: support inside omega, all counts positive") {
    const GenConfig cfg{Shape({5, 5, 5}), 2, 1.0, 2.5, 3};
    SubstreamRng truth_rng(cfg.seed, "truth");
    const auto truth = generate_truth(cfg, truth_rng);

    SubstreamRng omega_rng(cfg.seed, "omega");
    const auto omega = sample_omega(cfg.shape, 60, omega_rng);

    SubstreamRng counts_rng(cfg.seed, "counts");
    const auto counts = sample_counts(truth, omega, counts_rng);

    CHECK(counts.shape() == cfg.shape);
    CHECK(counts.nnz() <= omega.size());
    for (index_t lin : counts.linear_indices()) CHECK(omega.contains(lin));
    for (count_t c : counts.counts()) CHECK(c >= 1);

    // Entries average in [1, 2.5]; with 60 draws the total must land well
    // inside [0.3, 3.2] per observed index (5+ sigma margins).
    const double per_index =
        static_cast<double>(counts.total_count()) / static_cast<double>(omega.size());
    CHECK(per_index > 0.3);
    CHECK(per_index < 3.2);
}

TEST_CASE("make_instance: gamma is the nonzero part of omega, truth is stable") {
    const GenConfig cfg{Shape({6, 6, 6}), 3, 1.0, 2.5, 2024};
    const auto inst = make_instance(cfg, 100);

    CHECK(inst.omega.size() == 100);
    CHECK(inst.omega.contains_all(inst.gamma));
    CHECK(inst.gamma.size() == inst.counts.nnz());
    for (index_t lin : inst.counts.linear_indices()) CHECK(inst.gamma.contains(lin));

    // Changing how much is observed must not change the underlying model.
    const auto inst2 = make_instance(cfg, 150);
    for (int n = 0; n < 3; ++n)
        CHECK((inst.truth.factor(n).array() == inst2.truth.factor(n).array()).all());

    // Same config, same omega size: bitwise identical everything.
    const auto inst3 = make_instance(cfg, 100);
    CHECK(inst3.counts.linear_indices() == inst.counts.linear_indices());
    CHECK(inst3.counts.counts() == inst.counts.counts());
}

TEST_CASE("make_instance at full observation covers every index") {
    const GenConfig cfg{Shape({3, 3, 3}), 2, 2.0, 3.0, 5};
    const auto inst = make_instance(cfg, 27);
    CHECK(inst.omega.is_full());
    // With entries >= 2 almost every index should carry a nonzero count, and
    // sampled counts exist only where omega says so.
    CHECK(inst.counts.nnz() > 0);
    CHECK(inst.gamma.size() == inst.counts.nnz());
}
