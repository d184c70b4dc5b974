#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ztpc {

using index_t = std::int64_t;

/// Extents (I_1, ..., I_N) of an order-N tensor, with row-major linearization
/// helpers. Row-major means the LAST index varies fastest; files and RNG
/// reproducibility depend on this order, so it is fixed here once.
class Shape {
public:
    /// Validates every extent >= 1, order >= 1, and that the total element
    /// count fits in index_t without overflow.
    explicit Shape(std::vector<index_t> extents);

    [[nodiscard]] int order() const { return static_cast<int>(extents_.size()); }
    [[nodiscard]] index_t extent(int mode) const { return extents_[static_cast<size_t>(mode)]; }
    [[nodiscard]] const std::vector<index_t>& extents() const { return extents_; }

    /// Total number of entries I_1 * ... * I_N.
    [[nodiscard]] index_t num_entries() const { return num_entries_; }

    /// Row-major linear offset of a multi-index; throws contract_error when
    /// the index is out of bounds or has the wrong order.
    [[nodiscard]] index_t linearize(std::span<const index_t> idx) const;

    /// Inverse of linearize; writes order() coordinates into `idx_out`.
    void delinearize(index_t linear, std::span<index_t> idx_out) const;

    /// Convenience form returning a fresh vector.
    [[nodiscard]] std::vector<index_t> delinearize(index_t linear) const;

    [[nodiscard]] bool contains(std::span<const index_t> idx) const;

    /// Stride of each mode in the row-major order (stride of the last mode is 1).
    [[nodiscard]] const std::vector<index_t>& strides() const { return strides_; }

    bool operator==(const Shape& other) const { return extents_ == other.extents_; }
    bool operator!=(const Shape& other) const { return !(*this == other); }

private:
    std::vector<index_t> extents_;
    std::vector<index_t> strides_;
    index_t num_entries_ = 0;
};

}  // namespace ztpc
