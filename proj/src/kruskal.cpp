#include "ztpc/kruskal.hpp"

#include <cmath>
#include <string>

#include "ztpc/errors.hpp"

namespace ztpc {

KruskalModel::KruskalModel(Shape shape, Eigen::VectorXd weights,
                           std::vector<FactorMatrix> factors)
    : shape_(std::move(shape)), weights_(std::move(weights)), factors_(std::move(factors)) {
    const int rank = static_cast<int>(weights_.size());
    if (rank < 1) throw contract_error("KruskalModel: rank must be >= 1");
    if (static_cast<int>(factors_.size()) != shape_.order())
        throw contract_error("KruskalModel: one factor matrix per mode required");
    for (int r = 0; r < rank; ++r) {
        if (!std::isfinite(weights_[r]) || weights_[r] < 0.0)
            throw contract_error("KruskalModel: weights must be finite and nonnegative");
    }
    for (int n = 0; n < shape_.order(); ++n) {
        const FactorMatrix& A = factors_[static_cast<size_t>(n)];
        if (A.rows() != shape_.extent(n) || A.cols() != rank)
            throw contract_error("KruskalModel: factor " + std::to_string(n) +
                                 " is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                                 ", expected " + std::to_string(shape_.extent(n)) + "x" +
                                 std::to_string(rank));
        if (!A.allFinite())
            throw contract_error("KruskalModel: factor " + std::to_string(n) +
                                 " contains non-finite values");
    }
}

KruskalModel::KruskalModel(Shape shape, int rank, std::vector<FactorMatrix> factors)
    : KruskalModel(std::move(shape), Eigen::VectorXd::Ones(rank), std::move(factors)) {}

double KruskalModel::entry(std::span<const index_t> idx) const {
    if (static_cast<int>(idx.size()) != shape_.order() || !shape_.contains(idx))
        throw contract_error("KruskalModel::entry: index out of bounds");
    const int R = rank();
    double total = 0.0;
    for (int r = 0; r < R; ++r) {
        double product = weights_[r];
        for (int n = 0; n < shape_.order(); ++n)
            product *= factors_[static_cast<size_t>(n)](idx[static_cast<size_t>(n)], r);
        total += product;
    }
    return total;
}

double KruskalModel::entry_linear(index_t linear) const {
    std::vector<index_t> idx(static_cast<size_t>(shape_.order()));
    shape_.delinearize(linear, idx);
    return entry(idx);
}

double KruskalModel::frobenius_norm_squared() const {
    return kruskal_inner_product(*this, *this);
}

DenseTensor kruskal_to_dense(const KruskalModel& model, index_t max_entries) {
    const Shape& shape = model.shape();
    if (shape.num_entries() > max_entries)
        throw resource_error("kruskal_to_dense: " + std::to_string(shape.num_entries()) +
                             " entries exceed the cap of " + std::to_string(max_entries));
    DenseTensor dense(shape);
    const int N = shape.order();
    const int R = model.rank();
    // Odometer walk in row-major order; per-mode running products over a
    // prefix of modes make each entry O(R) amortized instead of O(N R).
    std::vector<index_t> idx(static_cast<size_t>(N), 0);
    // partial(n, r) = lambda_r * prod_{m < n} factor_m(idx_m, r)
    FactorMatrix partial(N + 1, R);
    partial.row(0) = model.weights().transpose();
    for (int n = 0; n < N; ++n)
        partial.row(n + 1) =
            partial.row(n).cwiseProduct(model.factor(n).row(idx[static_cast<size_t>(n)]));
    for (index_t linear = 0;; ++linear) {
        dense.at_linear(linear) = partial.row(N).sum();
        // Advance the odometer (last mode fastest) and refresh the prefix
        // products from the lowest changed mode down.
        int n = N - 1;
        while (n >= 0 && ++idx[static_cast<size_t>(n)] == shape.extent(n)) {
            idx[static_cast<size_t>(n)] = 0;
            --n;
        }
        if (n < 0) break;
        for (int m = n; m < N; ++m)
            partial.row(m + 1) =
                partial.row(m).cwiseProduct(model.factor(m).row(idx[static_cast<size_t>(m)]));
    }
    return dense;
}

FactorMatrix masked_mttkrp(int mode, const SparseWeights& weights, const KruskalModel& model) {
    const Shape& shape = model.shape();
    if (weights.shape != shape)
        throw contract_error("masked_mttkrp: weight tensor shape does not match the model");
    if (mode < 0 || mode >= shape.order())
        throw contract_error("masked_mttkrp: invalid mode");
    if (weights.linear.size() != weights.values.size())
        throw contract_error("masked_mttkrp: index/value array length mismatch");
    const int N = shape.order();
    const int R = model.rank();
    FactorMatrix G = FactorMatrix::Zero(shape.extent(mode), R);
    std::vector<index_t> idx(static_cast<size_t>(N));
    Eigen::RowVectorXd product(R);
    for (size_t k = 0; k < weights.linear.size(); ++k) {
        const index_t linear = weights.linear[k];
        if (linear < 0 || linear >= shape.num_entries())
            throw contract_error("masked_mttkrp: linear index out of range");
        shape.delinearize(linear, idx);
        product.setConstant(weights.values[k]);
        for (int m = 0; m < N; ++m)
            if (m != mode) product = product.cwiseProduct(model.factor(m).row(idx[static_cast<size_t>(m)]));
        G.row(idx[static_cast<size_t>(mode)]) += product;
    }
    return G;
}

double kruskal_inner_product(const KruskalModel& a, const KruskalModel& b) {
    if (a.shape() != b.shape())
        throw contract_error("kruskal_inner_product: shapes differ");
    Eigen::MatrixXd cross = Eigen::MatrixXd::Ones(a.rank(), b.rank());
    for (int n = 0; n < a.shape().order(); ++n)
        cross = cross.cwiseProduct((a.factor(n).transpose() * b.factor(n)).eval());
    return a.weights().dot(cross * b.weights());
}

}  // namespace ztpc
