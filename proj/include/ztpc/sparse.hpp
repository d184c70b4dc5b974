#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ztpc/shape.hpp"

namespace ztpc {

using count_t = std::int64_t;

/// Sparse COO tensor of positive integer counts, stored sorted by row-major
/// linear index. Zeros are represented by absence; which absent entries were
/// actually *observed* as zero is tracked separately by ObservationSet.
/// Duplicate indices are a hard error at construction (they indicate a
/// malformed observation file for this problem class, not data to be summed).
class SparseCountTensor {
public:
    /// Empty tensor (no stored entries).
    explicit SparseCountTensor(Shape shape);

    /// From (multi-index, count) pairs in any order. Validates bounds,
    /// positivity (count >= 1) and uniqueness; sorts by linear index.
    static SparseCountTensor from_entries(
        Shape shape, const std::vector<std::pair<std::vector<index_t>, count_t>>& entries);

    /// From parallel (linear index, count) arrays in any order; same checks.
    static SparseCountTensor from_linear(Shape shape, std::vector<index_t> linear,
                                         std::vector<count_t> counts);

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] index_t nnz() const { return static_cast<index_t>(linear_.size()); }

    /// Linear indices, strictly increasing.
    [[nodiscard]] const std::vector<index_t>& linear_indices() const { return linear_; }
    /// Counts aligned with linear_indices(); every value >= 1.
    [[nodiscard]] const std::vector<count_t>& counts() const { return counts_; }

    /// Count at a linear index; absent entries read as 0.
    [[nodiscard]] count_t value_at(index_t linear) const;

    /// Sum of all stored counts.
    [[nodiscard]] count_t total_count() const;

private:
    SparseCountTensor(Shape shape, std::vector<index_t> linear, std::vector<count_t> counts)
        : shape_(std::move(shape)), linear_(std::move(linear)), counts_(std::move(counts)) {}

    Shape shape_;
    std::vector<index_t> linear_;
    std::vector<count_t> counts_;
};

/// Sparse COO tensor of real weights on the same linear-index layout; the
/// input format of the masked MTTKRP kernel. Indices must be sorted strictly
/// increasing (the producers in this library emit them that way).
struct SparseWeights {
    Shape shape;
    std::vector<index_t> linear;
    std::vector<double> values;
};

}  // namespace ztpc
