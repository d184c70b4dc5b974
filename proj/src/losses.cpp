#include "ztpc/losses.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "ztpc/errors.hpp"

namespace ztpc {

namespace {

// log(e^m - 1 + eps) without overflow or cancellation: below the switch point
// expm1 is exact; above it e^m dominates and log(e^m - 1) = m + log1p(-e^{-m}).
double log_expm1_stable(double m, double eps) {
    if (m <= 30.0) return std::log(std::expm1(m) + eps);
    return m + std::log1p(-std::exp(-m));
}

void require_positive_count(count_t x, const char* where) {
    if (x < 1)
        throw contract_error(std::string(where) +
                             ": zero-truncated loss requires x >= 1, got " + std::to_string(x) +
                             " (a zero count reached the truncated likelihood; the mask is wrong)");
}

}  // namespace

double poisson_nll_entry(double m, count_t x, StabilizationPolicy policy) {
    if (x < 0) throw contract_error("poisson_nll_entry: negative count");
    return m - static_cast<double>(x) * std::log(m + policy.eps) +
           std::lgamma(static_cast<double>(x) + 1.0);
}

double poisson_nll_grad_entry(double m, count_t x, StabilizationPolicy policy) {
    if (x < 0) throw contract_error("poisson_nll_grad_entry: negative count");
    return 1.0 - static_cast<double>(x) / (m + policy.eps);
}

double ztp_nll_entry(double m, count_t x, StabilizationPolicy policy) {
    require_positive_count(x, "ztp_nll_entry");
    return log_expm1_stable(m, policy.eps) - static_cast<double>(x) * std::log(m + policy.eps) +
           std::lgamma(static_cast<double>(x) + 1.0);
}

double ztp_nll_grad_entry(double m, count_t x, StabilizationPolicy policy) {
    require_positive_count(x, "ztp_nll_grad_entry");
    return 1.0 / (-std::expm1(-m)) - static_cast<double>(x) / (m + policy.eps);
}

MaskedLossEvaluator::MaskedLossEvaluator(const SparseCountTensor& X, const ObservationSet& mask,
                                         LossKind kind, StabilizationPolicy policy)
    : shape_(X.shape()), kind_(kind), policy_(policy), mask_size_(mask.size()) {
    if (X.shape() != mask.shape())
        throw contract_error("MaskedLossEvaluator: tensor and mask shapes differ");
    order_ = shape_.order();
    for (index_t e : shape_.extents())
        if (e > std::numeric_limits<std::int32_t>::max())
            throw contract_error("MaskedLossEvaluator: extent too large for packed indices");

    full_poisson_ = mask.is_full() && kind_ == LossKind::Poisson;

    // Pair mask indices with counts. On the full-Poisson fast path only X's
    // support needs enumerating (the x-independent parts are handled in
    // closed form at evaluation time); otherwise a merge-join walks the two
    // sorted index lists.
    std::vector<index_t> linear;
    if (full_poisson_) {
        linear = X.linear_indices();
        xs_.assign(X.counts().begin(), X.counts().end());
    } else if (mask.is_full()) {
        // Zero-truncated over every index: legitimate only when X's support
        // covers the whole shape.
        linear.reserve(static_cast<size_t>(mask.size()));
        const auto& support = X.linear_indices();
        if (static_cast<index_t>(support.size()) != mask.size())
            require_positive_count(0, "masked objective");
        linear = support;
        xs_.assign(X.counts().begin(), X.counts().end());
    } else {
        linear.reserve(static_cast<size_t>(mask.size()));
        xs_.reserve(static_cast<size_t>(mask.size()));
        const auto& support = X.linear_indices();
        size_t s = 0;
        for (index_t member : mask.indices()) {
            while (s < support.size() && support[s] < member) ++s;
            count_t x = 0;
            if (s < support.size() && support[s] == member) x = X.counts()[s];
            if (kind_ == LossKind::ZeroTruncatedPoisson && x < 1)
                require_positive_count(x, "masked objective");
            linear.push_back(member);
            xs_.push_back(static_cast<double>(x));
        }
    }

    midx_.resize(linear.size() * static_cast<size_t>(order_));
    std::vector<index_t> idx(static_cast<size_t>(order_));
    for (size_t k = 0; k < linear.size(); ++k) {
        shape_.delinearize(linear[k], idx);
        for (int n = 0; n < order_; ++n)
            midx_[k * static_cast<size_t>(order_) + static_cast<size_t>(n)] =
                static_cast<std::int32_t>(idx[static_cast<size_t>(n)]);
    }
    log_fact_.resize(xs_.size());
    for (size_t k = 0; k < xs_.size(); ++k) log_fact_[k] = std::lgamma(xs_[k] + 1.0);
}

double MaskedLossEvaluator::value_and_grad_packed(int rank, const Eigen::VectorXd& weights,
                                                  const double* vars, double* grads) const {
    if (rank < 1 || weights.size() != rank)
        throw contract_error("MaskedLossEvaluator: rank/weights mismatch");
    const int N = order_;
    const size_t R = static_cast<size_t>(rank);
    const double eps = policy_.eps;
    const bool ztp = kind_ == LossKind::ZeroTruncatedPoisson;

    // Per-mode base offsets into the packed variable/gradient layout.
    std::vector<size_t> base(static_cast<size_t>(N));
    size_t total_vars = 0;
    for (int n = 0; n < N; ++n) {
        base[static_cast<size_t>(n)] = total_vars;
        total_vars += static_cast<size_t>(shape_.extent(n)) * R;
    }
    if (grads) std::memset(grads, 0, total_vars * sizeof(double));

    // prefix(n) = weights ∘ rows of modes < n; suffix(n) = rows of modes >= n.
    // The leave-one-out product for mode n is prefix(n) ∘ suffix(n+1).
    std::vector<double> prefix(static_cast<size_t>(N + 1) * R);
    std::vector<double> suffix(static_cast<size_t>(N + 1) * R);
    double total = 0.0;

    const size_t K = xs_.size();
    for (size_t k = 0; k < K; ++k) {
        const std::int32_t* mi = midx_.data() + k * static_cast<size_t>(N);
        for (size_t r = 0; r < R; ++r) prefix[r] = weights[static_cast<Eigen::Index>(r)];
        for (int n = 0; n < N; ++n) {
            const double* row =
                vars + base[static_cast<size_t>(n)] + static_cast<size_t>(mi[n]) * R;
            const double* prev = prefix.data() + static_cast<size_t>(n) * R;
            double* next = prefix.data() + static_cast<size_t>(n + 1) * R;
            for (size_t r = 0; r < R; ++r) next[r] = prev[r] * row[r];
        }
        double m = 0.0;
        {
            const double* last = prefix.data() + static_cast<size_t>(N) * R;
            for (size_t r = 0; r < R; ++r) m += last[r];
        }

        const double x = xs_[k];
        double value;
        double slope;
        if (ztp) {
            value = log_expm1_stable(m, eps) - x * std::log(m + eps) + log_fact_[k];
            slope = 1.0 / (-std::expm1(-m)) - x / (m + eps);
        } else if (full_poisson_) {
            // The +m / +1 parts of every entry (observed or not) are added in
            // closed form after the loop; only the x-dependent parts here.
            value = -x * std::log(m + eps) + log_fact_[k];
            slope = -x / (m + eps);
        } else if (x == 0.0) {
            value = m;
            slope = 1.0;
        } else {
            value = m - x * std::log(m + eps) + log_fact_[k];
            slope = 1.0 - x / (m + eps);
        }
        total += value;

        if (!grads) continue;
        // suffix(n) = rows of modes >= n, so the leave-one-out product for
        // mode n is prefix(n) ∘ suffix(n+1).
        double* suffix_end = suffix.data() + static_cast<size_t>(N) * R;
        for (size_t r = 0; r < R; ++r) suffix_end[r] = 1.0;
        for (int n = N - 1; n >= 0; --n) {
            const double* row =
                vars + base[static_cast<size_t>(n)] + static_cast<size_t>(mi[n]) * R;
            const double* above = suffix.data() + static_cast<size_t>(n + 1) * R;
            double* here = suffix.data() + static_cast<size_t>(n) * R;
            for (size_t r = 0; r < R; ++r) here[r] = above[r] * row[r];
        }
        for (int n = 0; n < N; ++n) {
            const double* pre = prefix.data() + static_cast<size_t>(n) * R;
            const double* suf = suffix.data() + static_cast<size_t>(n + 1) * R;
            double* g = grads + base[static_cast<size_t>(n)] + static_cast<size_t>(mi[n]) * R;
            for (size_t r = 0; r < R; ++r) g[r] += slope * pre[r] * suf[r];
        }
    }

    if (full_poisson_) {
        // sum_i m_i = sum_r w_r prod_n colsum_n[r]; its gradient with respect
        // to factor n is the same leave-one-out row everywhere.
        std::vector<double> colsum(static_cast<size_t>(N) * R, 0.0);
        for (int n = 0; n < N; ++n) {
            const index_t rows = shape_.extent(n);
            const double* A = vars + base[static_cast<size_t>(n)];
            double* cs = colsum.data() + static_cast<size_t>(n) * R;
            for (index_t i = 0; i < rows; ++i) {
                const double* row = A + static_cast<size_t>(i) * R;
                for (size_t r = 0; r < R; ++r) cs[r] += row[r];
            }
        }
        for (size_t r = 0; r < R; ++r) {
            double product = weights[static_cast<Eigen::Index>(r)];
            for (int n = 0; n < N; ++n) product *= colsum[static_cast<size_t>(n) * R + r];
            total += product;
        }
        if (grads) {
            std::vector<double> loo(R);
            for (int n = 0; n < N; ++n) {
                for (size_t r = 0; r < R; ++r) {
                    double product = weights[static_cast<Eigen::Index>(r)];
                    for (int m = 0; m < N; ++m)
                        if (m != n) product *= colsum[static_cast<size_t>(m) * R + r];
                    loo[r] = product;
                }
                double* G = grads + base[static_cast<size_t>(n)];
                const index_t rows = shape_.extent(n);
                for (index_t i = 0; i < rows; ++i) {
                    double* g = G + static_cast<size_t>(i) * R;
                    for (size_t r = 0; r < R; ++r) g[r] += loo[r];
                }
            }
        }
    }

    return total;
}

namespace {

// Packs a model's factor matrices into one contiguous buffer (row-major,
// mode after mode) — the evaluator's variable layout.
std::vector<double> pack_factors(const KruskalModel& model) {
    size_t total = 0;
    for (int n = 0; n < model.shape().order(); ++n)
        total += static_cast<size_t>(model.factor(n).size());
    std::vector<double> packed(total);
    size_t offset = 0;
    for (int n = 0; n < model.shape().order(); ++n) {
        const FactorMatrix& A = model.factor(n);
        std::memcpy(packed.data() + offset, A.data(), static_cast<size_t>(A.size()) * sizeof(double));
        offset += static_cast<size_t>(A.size());
    }
    return packed;
}

}  // namespace

double MaskedLossEvaluator::value(const KruskalModel& model) const {
    if (model.shape() != shape_)
        throw contract_error("MaskedLossEvaluator::value: model shape mismatch");
    const std::vector<double> packed = pack_factors(model);
    return value_and_grad_packed(model.rank(), model.weights(), packed.data(), nullptr);
}

double MaskedLossEvaluator::value_and_grad(const KruskalModel& model,
                                           std::vector<FactorMatrix>& grads) const {
    if (model.shape() != shape_)
        throw contract_error("MaskedLossEvaluator::value_and_grad: model shape mismatch");
    const std::vector<double> packed = pack_factors(model);
    std::vector<double> grad_flat(packed.size());
    const double value =
        value_and_grad_packed(model.rank(), model.weights(), packed.data(), grad_flat.data());
    grads.clear();
    size_t offset = 0;
    for (int n = 0; n < shape_.order(); ++n) {
        FactorMatrix G(shape_.extent(n), model.rank());
        std::memcpy(G.data(), grad_flat.data() + offset,
                    static_cast<size_t>(G.size()) * sizeof(double));
        offset += static_cast<size_t>(G.size());
        grads.push_back(std::move(G));
    }
    return value;
}

double masked_objective(const KruskalModel& model, const SparseCountTensor& X,
                        const ObservationSet& mask, LossKind kind, StabilizationPolicy policy) {
    MaskedLossEvaluator evaluator(X, mask, kind, policy);
    return evaluator.value(model);
}

std::vector<FactorMatrix> masked_objective_grad(const KruskalModel& model,
                                                const SparseCountTensor& X,
                                                const ObservationSet& mask, LossKind kind,
                                                StabilizationPolicy policy) {
    MaskedLossEvaluator evaluator(X, mask, kind, policy);
    std::vector<FactorMatrix> grads;
    evaluator.value_and_grad(model, grads);
    return grads;
}

}  // namespace ztpc
