#include "ztpc/sparse.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ztpc/errors.hpp"

namespace ztpc {

namespace {

// Sorts parallel (linear, count) arrays by linear index and rejects duplicates.
void sort_and_validate(const Shape& shape, std::vector<index_t>& linear,
                       std::vector<count_t>& counts) {
    if (linear.size() != counts.size())
        throw contract_error("SparseCountTensor: index/count array length mismatch");
    for (size_t k = 0; k < linear.size(); ++k) {
        if (linear[k] < 0 || linear[k] >= shape.num_entries())
            throw contract_error("SparseCountTensor: linear index out of range");
        if (counts[k] < 1)
            throw contract_error("SparseCountTensor: stored counts must be >= 1, got " +
                                 std::to_string(counts[k]));
    }
    std::vector<size_t> perm(linear.size());
    std::iota(perm.begin(), perm.end(), size_t{0});
    std::sort(perm.begin(), perm.end(),
              [&](size_t a, size_t b) { return linear[a] < linear[b]; });
    std::vector<index_t> sorted_linear(linear.size());
    std::vector<count_t> sorted_counts(counts.size());
    for (size_t k = 0; k < perm.size(); ++k) {
        sorted_linear[k] = linear[perm[k]];
        sorted_counts[k] = counts[perm[k]];
    }
    for (size_t k = 1; k < sorted_linear.size(); ++k)
        if (sorted_linear[k] == sorted_linear[k - 1])
            throw contract_error("SparseCountTensor: duplicate index at linear offset " +
                                 std::to_string(sorted_linear[k]));
    linear = std::move(sorted_linear);
    counts = std::move(sorted_counts);
}

}  // namespace

SparseCountTensor::SparseCountTensor(Shape shape) : shape_(std::move(shape)) {}

SparseCountTensor SparseCountTensor::from_entries(
    Shape shape, const std::vector<std::pair<std::vector<index_t>, count_t>>& entries) {
    std::vector<index_t> linear;
    std::vector<count_t> counts;
    linear.reserve(entries.size());
    counts.reserve(entries.size());
    for (const auto& [idx, count] : entries) {
        linear.push_back(shape.linearize(idx));
        counts.push_back(count);
    }
    sort_and_validate(shape, linear, counts);
    return SparseCountTensor(std::move(shape), std::move(linear), std::move(counts));
}

SparseCountTensor SparseCountTensor::from_linear(Shape shape, std::vector<index_t> linear,
                                                 std::vector<count_t> counts) {
    sort_and_validate(shape, linear, counts);
    return SparseCountTensor(std::move(shape), std::move(linear), std::move(counts));
}

count_t SparseCountTensor::value_at(index_t linear) const {
    auto it = std::lower_bound(linear_.begin(), linear_.end(), linear);
    if (it == linear_.end() || *it != linear) return 0;
    return counts_[static_cast<size_t>(it - linear_.begin())];
}

count_t SparseCountTensor::total_count() const {
    return std::accumulate(counts_.begin(), counts_.end(), count_t{0});
}

}  // namespace ztpc
