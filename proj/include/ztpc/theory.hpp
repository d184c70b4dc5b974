#pragma once

#include <cstdint>
#include <vector>

#include "ztpc/shape.hpp"

namespace ztpc {

/// KL divergence between Poisson distributions with means p and q:
/// p*log(p/q) - (p - q). Arguments must be strictly positive.
[[nodiscard]] double kl_poisson(double p, double q);

/// KL divergence between zero-truncated Poisson distributions with rates
/// p and q: p/(1-e^{-p}) * log(p/q) - (log(e^p - 1) - log(e^q - 1)),
/// evaluated through cancellation-free identities at every scale.
[[nodiscard]] double kl_ztp(double p, double q);

/// Error-amplification factor of the zero-truncated estimator relative to
/// the trusted-set baseline: ((4+b)e^b - 4) / (2(e^b - b - 1)), computed via
/// expm1 so small b (down to 1e-4 and below) does not cancel.
[[nodiscard]] double kappa(double beta);

/// The constant (e^b - b - 1)/(e^b - 1) relating the zero-truncated KL
/// divergence to the Poisson one; expm1-based for the same reason.
[[nodiscard]] double c_beta(double beta);

/// Whether the sampling-dimension requirement
/// min_n I_n >= (N-1) * log2(max_n I_n)^2 + 1 holds for the shape.
[[nodiscard]] bool dimension_requirement_met(const Shape& shape);

/// Which closed-form error-bound right-hand side to evaluate: the
/// zero-truncated or trusted-set (Poisson) estimator, under the nonnegative
/// or unconstrained CP rank measure.
enum class BoundKind { ZtpNncp, ZtpCp, PoissonNncp, PoissonCp };

[[nodiscard]] const char* to_string(BoundKind kind);

struct BoundInputs {
    Shape shape;
    double beta = 1.0;
    double alpha = 2.5;
    int rank_true = 1;       // rank of the underlying model
    int rank_est = 1;        // rank of the estimate
    index_t omega_size = 2;  // number of trusted indices (>= 2)
};

/// Closed-form high-probability bound on the squared relative estimation
/// error. The Poisson forms are
///   (128 a(a+1)/b^3) * (a(e^2-2) + 3 log2|omega|) * rank_term * sqrt(sum_n I_n)/sqrt(|omega|)
/// with rank_term = R + R_est for the nonnegative-rank variant and
/// (R sqrt(R))^{N-1} + (R_est sqrt(R_est))^{N-1} for the CP variant; the
/// zero-truncated forms are exactly kappa(beta) times the matching Poisson
/// form. Values above 1 are returned as-is (the bound is then vacuous).
[[nodiscard]] double theorem_bound(const BoundInputs& inputs, BoundKind kind);

struct KlBoundViolation {
    double p = 0.0;
    double q = 0.0;
    double margin = 0.0;      // LHS - RHS, negative past the slack
    bool truncated = false;   // which inequality was violated
};

struct KlBoundsReport {
    std::int64_t samples = 0;     // random pairs checked (corner probes extra)
    std::int64_t checked = 0;     // total inequality evaluations
    std::int64_t violations = 0;
    double worst_margin_poisson = 0.0;
    double worst_margin_ztp = 0.0;
    std::vector<KlBoundViolation> examples;  // first few violations, if any
    bool passed = false;
};

/// Samples (p, q) uniformly from [beta, alpha]^2 and checks two lower bounds
/// with 1e-12 absolute slack:
///   kl_poisson(p,q)              >= (p-q)^2 / (2 alpha)
///   (1-e^{-p}) * kl_ztp(p,q)     >= c_beta(beta) * (p-q)^2 / (2 alpha)
/// The deterministic corner pairs (beta, alpha) and (alpha, beta) are always
/// included. Draws are organized in fixed-size chunks with independent
/// substreams, so results do not depend on evaluation order.
[[nodiscard]] KlBoundsReport verify_kl_bounds(double beta, double alpha, std::int64_t samples,
                                              std::uint64_t seed);

}  // namespace ztpc
