#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ztpc/kruskal.hpp"
#include "ztpc/losses.hpp"
#include "ztpc/observation_set.hpp"
#include "ztpc/optimizer.hpp"
#include "ztpc/sparse.hpp"

namespace ztpc {

/// The three estimation pipelines. They differ only in which index set the
/// likelihood runs over and whether zeros are modeled or truncated away:
///   Poisson — every index of the tensor, zeros included (false zeros too);
///   Oracle  — the trusted indices only (requires knowing them);
///   Ztp     — the nonzero indices only, under the zero-truncated likelihood.
enum class EstimatorKind { Poisson, Oracle, Ztp };

[[nodiscard]] const char* to_string(EstimatorKind kind);
[[nodiscard]] std::optional<EstimatorKind> estimator_from_string(std::string_view name);

struct FitSpec {
    EstimatorKind kind = EstimatorKind::Poisson;
    int rank = 1;                    // estimation rank (may differ from truth)
    std::uint64_t init_seed = 0;     // seeds the initialization stream
    OptimOptions optim{};
    StabilizationPolicy policy{};
    /// Optional (low, high) bounds for the initial model's entries; defaults
    /// to (0.1, twice the mean nonzero count of the data).
    std::optional<std::pair<double, double>> init_entry_range;
};

struct FitResult {
    KruskalModel model;
    double final_nll = 0.0;
    int iterations = 0;
    OptimStatus status = OptimStatus::MaxIters;
    std::optional<double> rel_error;  // present when the truth was supplied
};

/// The (mask, loss) pair each estimator minimizes over: Poisson -> (full
/// index set, Poisson loss); Oracle -> (omega, Poisson loss); Ztp -> (gamma,
/// zero-truncated loss). Requires gamma ⊆ omega; Ztp with empty gamma is a
/// data-insufficiency error.
[[nodiscard]] std::pair<ObservationSet, LossKind> assemble_mask(EstimatorKind kind,
                                                                const Shape& shape,
                                                                const ObservationSet& omega,
                                                                const ObservationSet& gamma);

/// Maximum-likelihood fit of a rank-`spec.rank` model to the counts. Factor
/// entries are the optimization variables, box-bounded below at 1e-10 so the
/// zero-truncated loss stays finite; weights are fixed at one (scale lives in
/// the factors). Initialization draws factor entries uniformly so the initial
/// model entries span the configured range. One restart from a fresh
/// initialization is attempted if the line search fails outright; the better
/// result wins. When `truth` is provided the relative error is attached.
[[nodiscard]] FitResult fit(const FitSpec& spec, const SparseCountTensor& X,
                            const ObservationSet& omega, const KruskalModel* truth = nullptr);

/// Frobenius-norm relative error ||truth - estimate|| / ||truth||, computed
/// through Gram-matrix identities (never materializes either tensor).
[[nodiscard]] double relative_error(const KruskalModel& truth, const KruskalModel& estimate);

/// Mean and sample standard deviation of the rel_error fields. All results
/// must carry one; a single result yields deviation 0.
[[nodiscard]] std::pair<double, double> average_relative_error(
    const std::vector<FitResult>& results);

}  // namespace ztpc
