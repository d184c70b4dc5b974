#include "ztpc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "ztpc/errors.hpp"

namespace ztpc {

namespace {

// splitmix64 finalizer; decorrelates structured seed material.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view stream_name) {
    // FNV-1a over the name, folded with the root seed, then finalized.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream_name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h ^ mix64(seed));
}

double SubstreamRng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SubstreamRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::uint64_t SubstreamRng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw contract_error("SubstreamRng::uniform_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t raw = engine_();
        if (raw >= threshold) return raw % bound;
    }
}

std::int64_t SubstreamRng::poisson(double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw contract_error("SubstreamRng::poisson: mean must be positive and finite, got " +
                             std::to_string(mean));
    if (mean < 10.0) {
        // Inversion by sequential search through the cdf.
        std::int64_t k = 0;
        double pmf = std::exp(-mean);
        double cdf = pmf;
        const double u = uniform01();
        while (u > cdf) {
            ++k;
            pmf *= mean / static_cast<double>(k);
            cdf += pmf;
            if (k > 500) break;  // cdf saturated in floating point
        }
        return k;
    }
    // Transformed rejection with squeeze (PTRS, Hormann 1993). The dominating
    // distribution is G(u) = (2a/(0.5-|u|) + b)u + mean + 0.43 on [-0.5, 0.5].
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform01() - 0.5;
        const double v = uniform01();
        const double u_shifted = 0.5 - std::fabs(u);
        const auto k = static_cast<std::int64_t>(
            std::floor((2.0 * a / u_shifted + b) * u + mean + 0.43));
        // Immediate accept inside the rectangle under the acceptance curve.
        if (u_shifted >= 0.07 && v <= v_r) return k;
        // Immediate reject outside the squeeze.
        if (k < 0 || (u_shifted < 0.013 && v > u_shifted)) continue;
        // Full acceptance test: v <= alpha * pmf(k) / g(G^{-1}...) in logs.
        const double lhs = std::log(v * inv_alpha / (a / (u_shifted * u_shifted) + b));
        const double rhs = -mean + static_cast<double>(k) * log_mean -
                           std::lgamma(static_cast<double>(k) + 1.0);
        if (lhs <= rhs) return k;
    }
}

std::vector<index_t> sample_without_replacement(index_t population, index_t size,
                                                SubstreamRng& rng) {
    if (population < 0 || size < 0 || size > population)
        throw contract_error("sample_without_replacement: need 0 <= size <= population");
    // Floyd's algorithm: for j = n-k..n-1 insert a uniform draw from [0, j],
    // replacing collisions by j itself; yields every k-subset equally often.
    auto floyd = [&rng](index_t n, index_t k) {
        std::unordered_set<index_t> chosen;
        chosen.reserve(static_cast<size_t>(k) * 2);
        for (index_t j = n - k; j < n; ++j) {
            const auto t = static_cast<index_t>(
                rng.uniform_below(static_cast<std::uint64_t>(j) + 1));
            chosen.insert(chosen.contains(t) ? j : t);
        }
        std::vector<index_t> out(chosen.begin(), chosen.end());
        std::sort(out.begin(), out.end());
        return out;
    };
    if (size <= population / 2) return floyd(population, size);
    // Large requests: sample the complement and invert it.
    const std::vector<index_t> excluded = floyd(population, population - size);
    std::vector<index_t> out;
    out.reserve(static_cast<size_t>(size));
    size_t e = 0;
    for (index_t v = 0; v < population; ++v) {
        if (e < excluded.size() && excluded[e] == v) {
            ++e;
            continue;
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace ztpc
