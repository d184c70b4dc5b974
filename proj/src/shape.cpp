#include "ztpc/shape.hpp"

#include <limits>
#include <string>

#include "ztpc/errors.hpp"

namespace ztpc {

Shape::Shape(std::vector<index_t> extents) : extents_(std::move(extents)) {
    if (extents_.empty()) throw contract_error("Shape: order must be >= 1");
    num_entries_ = 1;
    for (index_t e : extents_) {
        if (e < 1) throw contract_error("Shape: every extent must be >= 1, got " + std::to_string(e));
        if (num_entries_ > std::numeric_limits<index_t>::max() / e)
            throw contract_error("Shape: total entry count overflows the index type");
        num_entries_ *= e;
    }
    strides_.assign(extents_.size(), 1);
    for (int n = static_cast<int>(extents_.size()) - 2; n >= 0; --n)
        strides_[static_cast<size_t>(n)] =
            strides_[static_cast<size_t>(n) + 1] * extents_[static_cast<size_t>(n) + 1];
}

index_t Shape::linearize(std::span<const index_t> idx) const {
    if (static_cast<int>(idx.size()) != order())
        throw contract_error("Shape::linearize: index order mismatch");
    index_t linear = 0;
    for (size_t n = 0; n < extents_.size(); ++n) {
        if (idx[n] < 0 || idx[n] >= extents_[n])
            throw contract_error("Shape::linearize: index out of bounds in mode " + std::to_string(n));
        linear += idx[n] * strides_[n];
    }
    return linear;
}

void Shape::delinearize(index_t linear, std::span<index_t> idx_out) const {
    if (linear < 0 || linear >= num_entries_)
        throw contract_error("Shape::delinearize: linear index out of range");
    if (static_cast<int>(idx_out.size()) != order())
        throw contract_error("Shape::delinearize: output span order mismatch");
    for (size_t n = 0; n < extents_.size(); ++n) {
        idx_out[n] = linear / strides_[n];
        linear -= idx_out[n] * strides_[n];
    }
}

std::vector<index_t> Shape::delinearize(index_t linear) const {
    std::vector<index_t> idx(static_cast<size_t>(order()));
    delinearize(linear, idx);
    return idx;
}

bool Shape::contains(std::span<const index_t> idx) const {
    if (static_cast<int>(idx.size()) != order()) return false;
    for (size_t n = 0; n < extents_.size(); ++n)
        if (idx[n] < 0 || idx[n] >= extents_[n]) return false;
    return true;
}

}  // namespace ztpc
