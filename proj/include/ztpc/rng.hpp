#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ztpc/shape.hpp"

namespace ztpc {

/// Derives a child seed from a root seed and a stream name, so that logically
/// distinct random streams ("truth", "omega:3:1", ...) are independent and a
/// consumer can regenerate any one stream without drawing from the others.
[[nodiscard]] std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view stream_name);

/// Deterministic random stream: a mt19937_64 engine addressed by (seed, name).
/// All variate algorithms are implemented here rather than taken from
/// <random>'s distributions, whose outputs differ across standard libraries;
/// results are reproducible for a fixed build of this library.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::string_view stream_name)
        : engine_(derive_stream_seed(seed, stream_name)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform on [lo, hi].
    double uniform(double lo, double hi);

    /// Uniform integer on [0, bound), bias-free. bound must be positive.
    std::uint64_t uniform_below(std::uint64_t bound);

    /// Poisson variate with the given mean (> 0): inversion by sequential
    /// search below mean 10, transformed rejection (PTRS) above.
    std::int64_t poisson(double mean);

private:
    std::mt19937_64 engine_;
};

/// Uniformly random size-`size` subset of {0, ..., population-1}, returned
/// sorted ascending. Uses Floyd's algorithm (O(size) memory); when size
/// exceeds half the population the complement is sampled instead.
[[nodiscard]] std::vector<index_t> sample_without_replacement(index_t population, index_t size,
                                                              SubstreamRng& rng);

}  // namespace ztpc
