#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ztpc/kruskal.hpp"
#include "ztpc/observation_set.hpp"
#include "ztpc/sparse.hpp"

namespace ztpc {

enum class LossKind { Poisson, ZeroTruncatedPoisson };

/// Additive shift applied inside logarithms and divisors so that model
/// entries at (or numerically near) zero never produce infinities.
struct StabilizationPolicy {
    double eps = 1e-10;
};

/// Negative log-likelihood of count x under a Poisson with mean m:
/// -[x*log(m+eps) - m - log(x!)]. Requires m >= 0 finite, x >= 0.
[[nodiscard]] double poisson_nll_entry(double m, count_t x, StabilizationPolicy policy = {});

/// d/dm of poisson_nll_entry: 1 - x/(m+eps).
[[nodiscard]] double poisson_nll_grad_entry(double m, count_t x, StabilizationPolicy policy = {});

/// Negative log-likelihood of count x >= 1 under a zero-truncated Poisson
/// with rate m: -[x*log(m+eps) - log(e^m - 1 + eps) - log(x!)]. Evaluated
/// through a cancellation-free form of log(e^m - 1) at every scale.
/// Throws contract_error when x < 1 (zeros must never reach this loss).
[[nodiscard]] double ztp_nll_entry(double m, count_t x, StabilizationPolicy policy = {});

/// d/dm of ztp_nll_entry: 1/(1 - e^{-m}) - x/(m+eps), the first term computed
/// as 1/(-expm1(-m)). Throws contract_error when x < 1.
[[nodiscard]] double ztp_nll_grad_entry(double m, count_t x, StabilizationPolicy policy = {});

/// Reusable masked-NLL evaluator. Construction pairs each mask index with its
/// count once (mask indices absent from X read as x = 0, permitted only for
/// the Poisson loss kind); evaluations then run over the precomputed pairs in
/// a single fixed order, so objective values are bit-reproducible.
///
/// When the mask is the full index set and the loss is Poisson, the sum of
/// model entries and its gradient are computed from factor column sums (a
/// rank-one identity) and only X's support is enumerated.
class MaskedLossEvaluator {
public:
    MaskedLossEvaluator(const SparseCountTensor& X, const ObservationSet& mask, LossKind kind,
                        StabilizationPolicy policy = {});

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] LossKind kind() const { return kind_; }
    [[nodiscard]] index_t mask_size() const { return mask_size_; }

    /// Objective at the point described by `weights` and `vars`, where `vars`
    /// packs all factor matrices (row-major, mode after mode, each of size
    /// extent(n) x rank). When `grads` is non-null it receives the factor
    /// gradients in the same packed layout (weights held fixed).
    double value_and_grad_packed(int rank, const Eigen::VectorXd& weights, const double* vars,
                                 double* grads) const;

    /// Convenience forms operating on a model's factor matrices.
    [[nodiscard]] double value(const KruskalModel& model) const;
    double value_and_grad(const KruskalModel& model, std::vector<FactorMatrix>& grads) const;

private:
    Shape shape_;
    LossKind kind_;
    StabilizationPolicy policy_;
    index_t mask_size_ = 0;
    bool full_poisson_ = false;       // rank-one fast path enabled
    int order_ = 0;
    std::vector<std::int32_t> midx_;  // K x order, interleaved multi-indices
    std::vector<double> xs_;          // K counts (as doubles; exact for this domain)
    std::vector<double> log_fact_;    // K values of log(x!)
};

/// Sum of per-entry NLL of `kind` over `mask`. Entries of X outside the mask
/// are ignored; mask indices missing from X count as x = 0 (Poisson only —
/// the zero-truncated kind rejects them with contract_error).
[[nodiscard]] double masked_objective(const KruskalModel& model, const SparseCountTensor& X,
                                      const ObservationSet& mask, LossKind kind,
                                      StabilizationPolicy policy = {});

/// Gradient of masked_objective with respect to each factor matrix, holding
/// the model weights fixed.
[[nodiscard]] std::vector<FactorMatrix> masked_objective_grad(const KruskalModel& model,
                                                              const SparseCountTensor& X,
                                                              const ObservationSet& mask,
                                                              LossKind kind,
                                                              StabilizationPolicy policy = {});

}  // namespace ztpc
