#include "ztpc/problem_gen.hpp"

#include <cmath>
#include <string>

#include "ztpc/errors.hpp"

namespace ztpc {

void validate(const GenConfig& cfg) {
    if (cfg.rank < 1) throw contract_error("GenConfig: rank must be >= 1");
    if (!(cfg.beta > 0.0) || !(cfg.beta <= cfg.alpha) || !std::isfinite(cfg.alpha))
        throw contract_error("GenConfig: need 0 < beta <= alpha, got beta=" +
                             std::to_string(cfg.beta) + " alpha=" + std::to_string(cfg.alpha));
}

KruskalModel generate_truth(const GenConfig& cfg, SubstreamRng& rng) {
    validate(cfg);
    const int N = cfg.shape.order();
    const double inv_order = 1.0 / static_cast<double>(N);
    const double lo = std::pow(cfg.beta / cfg.rank, inv_order);
    const double hi = std::pow(cfg.alpha / cfg.rank, inv_order);
    std::vector<FactorMatrix> factors;
    factors.reserve(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n) {
        FactorMatrix A(cfg.shape.extent(n), cfg.rank);
        for (index_t i = 0; i < A.rows(); ++i)
            for (int r = 0; r < cfg.rank; ++r) A(i, r) = rng.uniform(lo, hi);
        factors.push_back(std::move(A));
    }
    return KruskalModel(cfg.shape, cfg.rank, std::move(factors));
}

SparseCountTensor sample_counts(const KruskalModel& truth, const ObservationSet& omega,
                                SubstreamRng& rng) {
    if (truth.shape() != omega.shape())
        throw contract_error("sample_counts: model and index-set shapes differ");
    std::vector<index_t> linear;
    std::vector<count_t> counts;
    std::vector<index_t> idx(static_cast<size_t>(truth.shape().order()));
    for (index_t k = 0; k < omega.size(); ++k) {
        const index_t member = omega.index_at(k);
        truth.shape().delinearize(member, idx);
        const double mean = truth.entry(idx);
        if (!(mean > 0.0))
            throw contract_error("sample_counts: nonpositive model entry " +
                                 std::to_string(mean) + " at linear index " +
                                 std::to_string(member));
        const count_t draw = rng.poisson(mean);
        if (draw > 0) {
            linear.push_back(member);
            counts.push_back(draw);
        }
    }
    return SparseCountTensor::from_linear(truth.shape(), std::move(linear), std::move(counts));
}

ObservationSet sample_omega(const Shape& shape, index_t size, SubstreamRng& rng) {
    if (size < 0 || size > shape.num_entries())
        throw contract_error("sample_omega: size " + std::to_string(size) +
                             " outside [0, " + std::to_string(shape.num_entries()) + "]");
    if (size == shape.num_entries()) return ObservationSet::full(shape);
    return ObservationSet::from_indices(shape,
                                        sample_without_replacement(shape.num_entries(), size, rng));
}

ProblemInstance make_instance(const GenConfig& cfg, index_t omega_size) {
    validate(cfg);
    SubstreamRng truth_rng(cfg.seed, "truth");
    SubstreamRng omega_rng(cfg.seed, "omega");
    SubstreamRng counts_rng(cfg.seed, "counts");
    KruskalModel truth = generate_truth(cfg, truth_rng);
    ObservationSet omega = sample_omega(cfg.shape, omega_size, omega_rng);
    SparseCountTensor counts = sample_counts(truth, omega, counts_rng);
    ObservationSet gamma = restrict_to_nonzeros(counts, omega);
    return ProblemInstance{std::move(truth), std::move(counts), std::move(omega),
                           std::move(gamma)};
}

}  // namespace ztpc
