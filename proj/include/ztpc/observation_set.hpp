#pragma once

#include <utility>
#include <vector>

#include "ztpc/shape.hpp"
#include "ztpc/sparse.hpp"

namespace ztpc {

/// Sorted set of row-major linear indices marking the entries of a tensor
/// that were actually observed (trusted). The complete index set has an
/// implicit representation (no materialized index list) so that masks over
/// every entry of a large tensor cost no memory; `from_indices` promotes a
/// list covering the whole shape to that implicit form, making "all indices
/// listed" and "full" indistinguishable everywhere downstream.
class ObservationSet {
public:
    /// The empty set over `shape`.
    static ObservationSet empty(Shape shape);

    /// The complete index set over `shape`, represented implicitly.
    static ObservationSet full(Shape shape);

    /// From linear indices in any order; validates range and uniqueness.
    static ObservationSet from_indices(Shape shape, std::vector<index_t> indices);

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] index_t size() const {
        return is_full_ ? shape_.num_entries() : static_cast<index_t>(indices_.size());
    }
    [[nodiscard]] bool is_full() const { return is_full_; }
    [[nodiscard]] bool is_empty() const { return size() == 0; }

    /// k-th smallest member, k in [0, size()).
    [[nodiscard]] index_t index_at(index_t k) const {
        return is_full_ ? k : indices_[static_cast<size_t>(k)];
    }

    /// Materialized sorted index list; valid only when !is_full().
    [[nodiscard]] const std::vector<index_t>& indices() const;

    [[nodiscard]] bool contains(index_t linear) const;

    /// True when every member of `other` is also a member of this set.
    [[nodiscard]] bool contains_all(const ObservationSet& other) const;

private:
    ObservationSet(Shape shape, bool is_full, std::vector<index_t> indices)
        : shape_(std::move(shape)), is_full_(is_full), indices_(std::move(indices)) {}

    Shape shape_;
    bool is_full_ = false;
    std::vector<index_t> indices_;
};

/// Returns the subset of `mask` whose entries carry a nonzero count in `X`
/// (the intersection of the mask with X's support). Shapes must match.
[[nodiscard]] ObservationSet restrict_to_nonzeros(const SparseCountTensor& X,
                                                  const ObservationSet& mask);

}  // namespace ztpc
