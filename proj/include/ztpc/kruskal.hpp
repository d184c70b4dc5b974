#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

#include "ztpc/dense_tensor.hpp"
#include "ztpc/shape.hpp"
#include "ztpc/sparse.hpp"

namespace ztpc {

/// Factor matrices are stored row-major so that the per-index factor rows
/// touched by entry evaluation are contiguous in memory.
using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Rank-R sum-of-outer-products tensor: weights lambda_1..lambda_R plus one
/// I_n x R factor matrix per mode. Entry (i_1,...,i_N) reconstructs as
/// sum_r lambda_r * prod_n factor[n](i_n, r).
class KruskalModel {
public:
    /// Validates factor row counts against the shape, column counts against
    /// the rank, nonnegative weights, and finiteness of all stored values.
    KruskalModel(Shape shape, Eigen::VectorXd weights, std::vector<FactorMatrix> factors);

    /// Convenience: unit weights.
    KruskalModel(Shape shape, int rank, std::vector<FactorMatrix> factors);

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] int rank() const { return static_cast<int>(weights_.size()); }
    [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }
    [[nodiscard]] const std::vector<FactorMatrix>& factors() const { return factors_; }
    [[nodiscard]] const FactorMatrix& factor(int mode) const {
        return factors_[static_cast<size_t>(mode)];
    }

    /// Reconstructed entry at a multi-index.
    [[nodiscard]] double entry(std::span<const index_t> idx) const;

    /// Reconstructed entry at a row-major linear index.
    [[nodiscard]] double entry_linear(index_t linear) const;

    /// Squared Frobenius norm of the reconstruction, via the Gram identity
    /// ||M||^2 = lambda^T (hadamard_n factor_n^T factor_n) lambda — no dense
    /// materialization at any shape.
    [[nodiscard]] double frobenius_norm_squared() const;

private:
    Shape shape_;
    Eigen::VectorXd weights_;
    std::vector<FactorMatrix> factors_;
};

/// Materializes every entry of the model. Throws resource_error when the
/// shape holds more than `max_entries` values.
[[nodiscard]] DenseTensor kruskal_to_dense(const KruskalModel& model,
                                           index_t max_entries = 100'000'000);

/// Masked matricized-tensor-times-Khatri-Rao-product: for the given mode n,
/// returns G with G(i_n, r) = sum over weight entries idx of
/// w_idx * prod_{m != n} factor_m(idx_m, r). The model's weights lambda are
/// NOT applied. Entries outside the weight support contribute nothing.
[[nodiscard]] FactorMatrix masked_mttkrp(int mode, const SparseWeights& weights,
                                         const KruskalModel& model);

/// <reconstruction of a, reconstruction of b> via per-mode cross-Gram
/// matrices: weights_a^T (hadamard_n A_n^T B_n) weights_b. Shapes must match.
[[nodiscard]] double kruskal_inner_product(const KruskalModel& a, const KruskalModel& b);

}  // namespace ztpc
