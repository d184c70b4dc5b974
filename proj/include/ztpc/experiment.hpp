#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ztpc/estimators.hpp"
#include "ztpc/losses.hpp"
#include "ztpc/optimizer.hpp"
#include "ztpc/shape.hpp"

namespace ztpc {

/// Factorial sweep over trusted-set sizes: one ground truth per config, k
/// freshly sampled trusted sets per fraction, every method fit on every
/// replicate. Shapes are cubic (order x dim).
struct ExperimentConfig {
    int order = 3;
    index_t dim = 100;
    int rank = 5;
    double beta = 1.0;
    double alpha = 2.5;
    std::vector<double> omega_fractions;  // ascending, each in (0, 1]
    int replicates = 5;
    std::vector<EstimatorKind> methods;
    std::uint64_t seed = 0;
    OptimOptions optim{};
    StabilizationPolicy policy{};
};

/// Validates fraction ordering/range, replicates >= 1, nonempty methods,
/// and the generator parameter constraints.
void validate(const ExperimentConfig& cfg);

struct SweepRow {
    EstimatorKind method = EstimatorKind::Poisson;
    double omega_fraction = 0.0;
    double mean_rel_error = 0.0;
    double std_rel_error = 0.0;
    double mean_iterations = 0.0;
    std::int64_t flagged = 0;  // fits excluded from the statistics
};

struct SweepResult {
    std::vector<SweepRow> rows;  // sorted by (method, fraction)
};

/// Runs the sweep with up to `workers` concurrent (fraction, replicate)
/// tasks. Fully deterministic for a fixed config regardless of worker count:
/// every random stream is named by its (fraction index, replicate) and all
/// methods of a replicate share one initialization stream. Fits whose final
/// objective fails to reach the ground truth's objective (beyond the
/// func_tol allowance), and zero-truncated fits with no nonzero data, are
/// excluded from the mean/std and counted in `flagged`.
[[nodiscard]] SweepResult run_sweep(const ExperimentConfig& cfg, int workers = 1);

/// Structural checks a finished sweep must satisfy (finite statistics;
/// zero deviation when replicates == 1; trusted-set and all-indices methods
/// agreeing at fraction 1). Returns human-readable violations, empty if ok.
[[nodiscard]] std::vector<std::string> check_sweep_invariants(const SweepResult& result,
                                                              const ExperimentConfig& cfg);

/// CSV with header method,omega_fraction,mean_rel_error,std_rel_error,
/// mean_iterations,flagged; numbers carry 10 significant digits.
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
[[nodiscard]] SweepResult load_sweep_csv(const std::filesystem::path& path);

/// Companion gnuplot script plotting mean +/- deviation against fraction,
/// one series per method, reading the CSV at `csv_path`.
void write_gnuplot_script(const std::filesystem::path& csv_path,
                          const std::filesystem::path& script_path);

/// Config from a JSON file mirroring ExperimentConfig:
///   {"order":3,"dim":100,"rank":5,"beta":1.0,"alpha":2.5,
///    "omega_fractions":[0.05,0.3],"replicates":5,
///    "methods":["poisson","oracle","ztp"],"seed":1,
///    "optim":{"memory":5,"max_iters":500,"grad_tol":1e-6,
///             "func_tol":1e-10,"max_line_search":20},"eps":1e-10}
/// The optim block, eps, and seed are optional.
[[nodiscard]] ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace ztpc
