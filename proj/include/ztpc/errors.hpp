#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ztpc {

/// Violated API precondition: the caller passed arguments outside the
/// documented domain (bad shapes, mismatched sizes, out-of-range values).
struct contract_error : std::runtime_error {
    explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed external input: unparsable or inconsistent files, bad config.
struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// A hard resource limit was exceeded (e.g. dense materialization cap).
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// The minimizer observed a non-finite objective or gradient at a feasible
/// iterate; carries the offending point for diagnosis.
struct optimization_error : std::runtime_error {
    explicit optimization_error(const std::string& what, std::vector<double> iterate = {})
        : std::runtime_error(what), offending_iterate(std::move(iterate)) {}
    std::vector<double> offending_iterate;
};

}  // namespace ztpc
