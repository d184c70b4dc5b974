#include "ztpc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ztpc/errors.hpp"
#include "ztpc/rng.hpp"

namespace ztpc {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw contract_error(std::string(name) + " must be positive and finite, got " +
                             std::to_string(value));
}

// log(e^m - 1) = m + log1p(-e^{-m}): exact at large m, and log(expm1(m))
// below the switch point where expm1 is itself exact.
double log_expm1(double m) {
    if (m <= 30.0) return std::log(std::expm1(m));
    return m + std::log1p(-std::exp(-m));
}

}  // namespace

double kl_poisson(double p, double q) {
    require_positive(p, "kl_poisson: p");
    require_positive(q, "kl_poisson: q");
    // p*log(p/q) via log1p of the relative difference keeps p ~ q accurate.
    return p * std::log1p((p - q) / q) - (p - q);
}

double kl_ztp(double p, double q) {
    require_positive(p, "kl_ztp: p");
    require_positive(q, "kl_ztp: q");
    const double occupancy = -std::expm1(-p);  // 1 - e^{-p}
    return (p / occupancy) * std::log1p((p - q) / q) - (log_expm1(p) - log_expm1(q));
}

double kappa(double beta) {
    require_positive(beta, "kappa: beta");
    // Numerator (4+b)e^b - 4 as 4*expm1(b) + b*e^b; denominator e^b - b - 1
    // as expm1(b) - b: both cancellation-free for small b.
    const double em1 = std::expm1(beta);
    return (4.0 * em1 + beta * std::exp(beta)) / (2.0 * (em1 - beta));
}

double c_beta(double beta) {
    require_positive(beta, "c_beta: beta");
    const double em1 = std::expm1(beta);
    return (em1 - beta) / em1;
}

bool dimension_requirement_met(const Shape& shape) {
    const auto& extents = shape.extents();
    const auto [min_it, max_it] = std::minmax_element(extents.begin(), extents.end());
    const double log2_max = std::log2(static_cast<double>(*max_it));
    const double required = static_cast<double>(shape.order() - 1) * log2_max * log2_max + 1.0;
    return static_cast<double>(*min_it) >= required;
}

const char* to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::ZtpNncp: return "ztp-nncp";
        case BoundKind::ZtpCp: return "ztp-cp";
        case BoundKind::PoissonNncp: return "poisson-nncp";
        case BoundKind::PoissonCp: return "poisson-cp";
    }
    return "unknown";
}

double theorem_bound(const BoundInputs& inputs, BoundKind kind) {
    require_positive(inputs.beta, "theorem_bound: beta");
    if (!(inputs.beta <= inputs.alpha) || !std::isfinite(inputs.alpha))
        throw contract_error("theorem_bound: need beta <= alpha < inf");
    if (inputs.rank_true < 1 || inputs.rank_est < 1)
        throw contract_error("theorem_bound: ranks must be >= 1");
    if (inputs.omega_size < 2)
        throw contract_error("theorem_bound: omega_size must be >= 2");

    const bool truncated = kind == BoundKind::ZtpNncp || kind == BoundKind::ZtpCp;
    const bool nonneg_rank = kind == BoundKind::ZtpNncp || kind == BoundKind::PoissonNncp;

    double sum_extents = 0.0;
    for (index_t e : inputs.shape.extents()) sum_extents += static_cast<double>(e);

    const double R = inputs.rank_true;
    const double R_est = inputs.rank_est;
    double rank_term;
    if (nonneg_rank) {
        rank_term = R + R_est;
    } else {
        const double power = static_cast<double>(inputs.shape.order() - 1);
        rank_term = std::pow(R * std::sqrt(R), power) + std::pow(R_est * std::sqrt(R_est), power);
    }

    const double a = inputs.alpha;
    const double b = inputs.beta;
    const double omega = static_cast<double>(inputs.omega_size);
    const double base = 128.0 * a * (a + 1.0) / (b * b * b) *
                        (a * (std::exp(2.0) - 2.0) + 3.0 * std::log2(omega)) * rank_term *
                        std::sqrt(sum_extents) / std::sqrt(omega);
    return truncated ? kappa(b) * base : base;
}

KlBoundsReport verify_kl_bounds(double beta, double alpha, std::int64_t samples,
                                std::uint64_t seed) {
    require_positive(beta, "verify_kl_bounds: beta");
    if (!(beta <= alpha) || !std::isfinite(alpha))
        throw contract_error("verify_kl_bounds: need beta <= alpha < inf");
    if (samples < 1) throw contract_error("verify_kl_bounds: samples must be >= 1");

    constexpr double kSlack = 1e-12;
    constexpr std::int64_t kChunk = 1 << 16;
    constexpr size_t kMaxExamples = 16;

    KlBoundsReport report;
    report.samples = samples;
    report.worst_margin_poisson = std::numeric_limits<double>::infinity();
    report.worst_margin_ztp = std::numeric_limits<double>::infinity();
    const double cb = c_beta(beta);

    auto check_pair = [&](double p, double q) {
        const double gap_sq = (p - q) * (p - q);
        const double poisson_margin = kl_poisson(p, q) - gap_sq / (2.0 * alpha);
        const double ztp_margin =
            -std::expm1(-p) * kl_ztp(p, q) - cb * gap_sq / (2.0 * alpha);
        report.checked += 2;
        report.worst_margin_poisson = std::min(report.worst_margin_poisson, poisson_margin);
        report.worst_margin_ztp = std::min(report.worst_margin_ztp, ztp_margin);
        if (poisson_margin < -kSlack) {
            ++report.violations;
            if (report.examples.size() < kMaxExamples)
                report.examples.push_back({p, q, poisson_margin, false});
        }
        if (ztp_margin < -kSlack) {
            ++report.violations;
            if (report.examples.size() < kMaxExamples)
                report.examples.push_back({p, q, ztp_margin, true});
        }
    };

    check_pair(beta, alpha);
    check_pair(alpha, beta);

    // Fixed-size chunks with independent substreams: the draw sequence (and
    // therefore the report) is identical however the chunks are scheduled.
    const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
    std::int64_t remaining = samples;
    for (std::int64_t c = 0; c < chunks; ++c) {
        SubstreamRng rng(seed, "kl:" + std::to_string(c));
        const std::int64_t in_chunk = std::min<std::int64_t>(kChunk, remaining);
        remaining -= in_chunk;
        for (std::int64_t k = 0; k < in_chunk; ++k) {
            const double p = rng.uniform(beta, alpha);
            const double q = rng.uniform(beta, alpha);
            check_pair(p, q);
        }
    }

    report.passed = report.violations == 0;
    return report;
}

}  // namespace ztpc
