#pragma once

#include <cstdint>

#include "ztpc/kruskal.hpp"
#include "ztpc/observation_set.hpp"
#include "ztpc/rng.hpp"
#include "ztpc/shape.hpp"
#include "ztpc/sparse.hpp"

namespace ztpc {

/// Synthetic-problem description: a rank-R model whose reconstructed entries
/// all fall in [beta, alpha], plus the seed for every derived random stream.
struct GenConfig {
    Shape shape;
    int rank = 1;
    double beta = 1.0;
    double alpha = 2.5;
    std::uint64_t seed = 0;
};

/// Validates 0 < beta <= alpha (finite) and rank >= 1.
void validate(const GenConfig& cfg);

/// A complete synthetic instance: the ground-truth model, counts drawn at
/// the trusted indices, the trusted set itself, and its nonzero subset.
struct ProblemInstance {
    KruskalModel truth;
    SparseCountTensor counts;
    ObservationSet omega;  // trusted indices (observed, zero or not)
    ObservationSet gamma;  // trusted indices with a nonzero count
};

/// Ground-truth model: every factor entry i.i.d. uniform on
/// [(beta/R)^{1/N}, (alpha/R)^{1/N}] with unit weights, which confines every
/// reconstructed entry to [beta, alpha]. Factors are filled mode by mode in
/// row-major order, so the draw sequence is part of the format.
[[nodiscard]] KruskalModel generate_truth(const GenConfig& cfg, SubstreamRng& rng);

/// Independent Poisson draw at every index of `omega`, with mean equal to
/// the model entry there; zero draws are recorded by omission. Means must be
/// strictly positive at every sampled index.
[[nodiscard]] SparseCountTensor sample_counts(const KruskalModel& truth,
                                              const ObservationSet& omega, SubstreamRng& rng);

/// Uniformly random subset of the linearized index set with exactly `size`
/// members (every subset of that cardinality equally likely).
[[nodiscard]] ObservationSet sample_omega(const Shape& shape, index_t size, SubstreamRng& rng);

/// Composes generate_truth, sample_omega, sample_counts and the nonzero
/// restriction, with one independent named random stream per stage ("truth",
/// "omega", "counts"), so regenerating with a different omega_size reuses
/// the identical truth.
[[nodiscard]] ProblemInstance make_instance(const GenConfig& cfg, index_t omega_size);

}  // namespace ztpc
