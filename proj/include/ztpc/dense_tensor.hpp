#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "ztpc/errors.hpp"
#include "ztpc/shape.hpp"

namespace ztpc {

/// Fully materialized real tensor, flat row-major storage (last index fastest).
class DenseTensor {
public:
    explicit DenseTensor(Shape shape, double fill = 0.0)
        : shape_(std::move(shape)),
          values_(static_cast<size_t>(shape_.num_entries()), fill) {}

    DenseTensor(Shape shape, std::vector<double> values)
        : shape_(std::move(shape)), values_(std::move(values)) {
        if (static_cast<index_t>(values_.size()) != shape_.num_entries())
            throw contract_error("DenseTensor: value count does not match shape");
    }

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::vector<double>& values() { return values_; }

    [[nodiscard]] double at_linear(index_t linear) const { return values_[static_cast<size_t>(linear)]; }
    double& at_linear(index_t linear) { return values_[static_cast<size_t>(linear)]; }

    [[nodiscard]] double at(std::span<const index_t> idx) const {
        return values_[static_cast<size_t>(shape_.linearize(idx))];
    }
    double& at(std::span<const index_t> idx) {
        return values_[static_cast<size_t>(shape_.linearize(idx))];
    }

    /// True when every stored value is finite.
    [[nodiscard]] bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    Shape shape_;
    std::vector<double> values_;
};

}  // namespace ztpc
