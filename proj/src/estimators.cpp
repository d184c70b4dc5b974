#include "ztpc/estimators.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "ztpc/errors.hpp"
#include "ztpc/rng.hpp"

namespace ztpc {

const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Poisson: return "poisson";
        case EstimatorKind::Oracle: return "oracle";
        case EstimatorKind::Ztp: return "ztp";
    }
    return "unknown";
}

std::optional<EstimatorKind> estimator_from_string(std::string_view name) {
    if (name == "poisson") return EstimatorKind::Poisson;
    if (name == "oracle") return EstimatorKind::Oracle;
    if (name == "ztp") return EstimatorKind::Ztp;
    return std::nullopt;
}

std::pair<ObservationSet, LossKind> assemble_mask(EstimatorKind kind, const Shape& shape,
                                                  const ObservationSet& omega,
                                                  const ObservationSet& gamma) {
    if (omega.shape() != shape || gamma.shape() != shape)
        throw contract_error("assemble_mask: shape mismatch between tensor and index sets");
    if (!omega.contains_all(gamma))
        throw contract_error("assemble_mask: the nonzero set is not a subset of the trusted set");
    switch (kind) {
        case EstimatorKind::Poisson:
            return {ObservationSet::full(shape), LossKind::Poisson};
        case EstimatorKind::Oracle:
            return {omega, LossKind::Poisson};
        case EstimatorKind::Ztp:
            if (gamma.is_empty())
                throw data_error(
                    "assemble_mask: no nonzero observations; the zero-truncated estimator has "
                    "nothing to fit");
            return {gamma, LossKind::ZeroTruncatedPoisson};
    }
    throw contract_error("assemble_mask: unknown estimator kind");
}

namespace {

// Uniform factor initialization spanning model entries in [lo_entry, hi_entry]:
// per-entry factor range [(lo/R)^{1/N}, (hi/R)^{1/N}], drawn in packed order.
Eigen::VectorXd draw_initial_point(const Shape& shape, int rank, double lo_entry, double hi_entry,
                                   std::uint64_t init_seed, std::string_view stream) {
    const double inv_order = 1.0 / static_cast<double>(shape.order());
    const double lo = std::pow(lo_entry / rank, inv_order);
    const double hi = std::pow(hi_entry / rank, inv_order);
    size_t total = 0;
    for (int n = 0; n < shape.order(); ++n)
        total += static_cast<size_t>(shape.extent(n)) * static_cast<size_t>(rank);
    SubstreamRng rng(init_seed, stream);
    Eigen::VectorXd x0(static_cast<Eigen::Index>(total));
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = rng.uniform(lo, hi);
    return x0;
}

KruskalModel unpack_model(const Shape& shape, int rank, const Eigen::VectorXd& vars) {
    std::vector<FactorMatrix> factors;
    factors.reserve(static_cast<size_t>(shape.order()));
    size_t offset = 0;
    for (int n = 0; n < shape.order(); ++n) {
        FactorMatrix A(shape.extent(n), rank);
        std::memcpy(A.data(), vars.data() + offset, static_cast<size_t>(A.size()) * sizeof(double));
        offset += static_cast<size_t>(A.size());
        factors.push_back(std::move(A));
    }
    return KruskalModel(shape, rank, std::move(factors));
}

}  // namespace

FitResult fit(const FitSpec& spec, const SparseCountTensor& X, const ObservationSet& omega,
              const KruskalModel* truth) {
    if (spec.rank < 1) throw contract_error("fit: rank must be >= 1");
    if (X.shape() != omega.shape()) throw contract_error("fit: tensor and trusted-set shapes differ");
    if (truth && truth->shape() != X.shape())
        throw contract_error("fit: truth shape does not match the data");

    const Shape& shape = X.shape();
    const ObservationSet gamma = restrict_to_nonzeros(X, omega);
    auto [mask, loss] = assemble_mask(spec.kind, shape, omega, gamma);
    const MaskedLossEvaluator evaluator(X, mask, loss, spec.policy);

    double lo_entry = 0.1;
    double hi_entry = 2.0;
    if (X.nnz() > 0)
        hi_entry = 2.0 * static_cast<double>(X.total_count()) / static_cast<double>(X.nnz());
    if (spec.init_entry_range) {
        lo_entry = spec.init_entry_range->first;
        hi_entry = spec.init_entry_range->second;
    }
    if (!(lo_entry > 0.0) || !(hi_entry >= lo_entry))
        throw contract_error("fit: initialization range must satisfy 0 < low <= high");

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(spec.rank);
    ObjectiveGradFn objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        return evaluator.value_and_grad_packed(spec.rank, ones, x.data(), grad.data());
    };
    const Box box{1e-10, std::numeric_limits<double>::infinity()};

    OptimResult best = minimize(
        objective, draw_initial_point(shape, spec.rank, lo_entry, hi_entry, spec.init_seed, "init"),
        box, spec.optim);
    if (best.status == OptimStatus::LineSearchFailure) {
        OptimResult retry = minimize(
            objective,
            draw_initial_point(shape, spec.rank, lo_entry, hi_entry, spec.init_seed, "init:restart"),
            box, spec.optim);
        if (retry.objective < best.objective) best = std::move(retry);
    }

    FitResult result{unpack_model(shape, spec.rank, best.solution), best.objective,
                     best.iterations, best.status, std::nullopt};
    if (truth) result.rel_error = relative_error(*truth, result.model);
    return result;
}

double relative_error(const KruskalModel& truth, const KruskalModel& estimate) {
    if (truth.shape() != estimate.shape())
        throw contract_error("relative_error: model shapes differ");
    const double truth_sq = kruskal_inner_product(truth, truth);
    const double cross = kruskal_inner_product(truth, estimate);
    const double estimate_sq = kruskal_inner_product(estimate, estimate);
    const double diff_sq = std::max(0.0, truth_sq - 2.0 * cross + estimate_sq);
    return std::sqrt(diff_sq) / std::sqrt(truth_sq);
}

std::pair<double, double> average_relative_error(const std::vector<FitResult>& results) {
    if (results.empty()) throw contract_error("average_relative_error: empty result list");
    double sum = 0.0;
    for (const FitResult& r : results) {
        if (!r.rel_error)
            throw contract_error("average_relative_error: a result lacks a relative error");
        sum += *r.rel_error;
    }
    const double mean = sum / static_cast<double>(results.size());
    if (results.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (const FitResult& r : results) {
        const double d = *r.rel_error - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(results.size() - 1))};
}

}  // namespace ztpc
