#include "ztpc/observation_set.hpp"

#include <algorithm>
#include <string>

#include "ztpc/errors.hpp"

namespace ztpc {

ObservationSet ObservationSet::empty(Shape shape) {
    return ObservationSet(std::move(shape), false, {});
}

ObservationSet ObservationSet::full(Shape shape) {
    return ObservationSet(std::move(shape), true, {});
}

ObservationSet ObservationSet::from_indices(Shape shape, std::vector<index_t> indices) {
    std::sort(indices.begin(), indices.end());
    for (size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] < 0 || indices[k] >= shape.num_entries())
            throw contract_error("ObservationSet: linear index out of range");
        if (k > 0 && indices[k] == indices[k - 1])
            throw contract_error("ObservationSet: duplicate index " + std::to_string(indices[k]));
    }
    if (static_cast<index_t>(indices.size()) == shape.num_entries())
        return full(std::move(shape));
    return ObservationSet(std::move(shape), false, std::move(indices));
}

const std::vector<index_t>& ObservationSet::indices() const {
    if (is_full_)
        throw contract_error(
            "ObservationSet::indices: the full set is implicit; iterate via index_at");
    return indices_;
}

bool ObservationSet::contains(index_t linear) const {
    if (linear < 0 || linear >= shape_.num_entries()) return false;
    if (is_full_) return true;
    return std::binary_search(indices_.begin(), indices_.end(), linear);
}

bool ObservationSet::contains_all(const ObservationSet& other) const {
    if (shape_ != other.shape_) return false;
    if (is_full_) return true;
    if (other.is_full_) return size() == shape_.num_entries();
    return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(),
                         other.indices_.end());
}

ObservationSet restrict_to_nonzeros(const SparseCountTensor& X, const ObservationSet& mask) {
    if (X.shape() != mask.shape())
        throw contract_error("restrict_to_nonzeros: tensor and mask shapes differ");
    const auto& support = X.linear_indices();
    if (mask.is_full())
        return ObservationSet::from_indices(X.shape(), support);
    std::vector<index_t> out;
    out.reserve(std::min(support.size(), static_cast<size_t>(mask.size())));
    std::set_intersection(support.begin(), support.end(), mask.indices().begin(),
                          mask.indices().end(), std::back_inserter(out));
    return ObservationSet::from_indices(X.shape(), std::move(out));
}

}  // namespace ztpc
