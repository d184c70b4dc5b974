#include "ztpc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "ztpc/errors.hpp"
#include "ztpc/problem_gen.hpp"
#include "ztpc/theory.hpp"

namespace ztpc {

namespace {

using nlohmann::json;

// One method's outcome on one replicate. Flagged fits are excluded from the
// statistics: the error bound only speaks about estimates that actually
// reached the ground truth's likelihood, so a stalled fit (or a
// zero-truncated fit with no nonzero data at all) must not contaminate the
// averages it is compared against.
struct CellOutcome {
    bool flagged = false;
    double rel_error = 0.0;
    int iterations = 0;
};

std::string stream_tag(const char* what, size_t fraction_idx, int replicate) {
    return std::string(what) + ":f" + std::to_string(fraction_idx) + ":r" +
           std::to_string(replicate);
}

index_t omega_size_for(const Shape& shape, double fraction) {
    const auto total = shape.num_entries();
    const auto wanted = static_cast<index_t>(std::llround(fraction * static_cast<double>(total)));
    return std::clamp<index_t>(wanted, 1, total);
}

// Mean and sample standard deviation (n-1 denominator, 0 when n < 2) of the
// unflagged outcomes of one (method, fraction) cell, plus the row itself.
SweepRow summarize_cell(EstimatorKind method, double fraction,
                        const std::vector<CellOutcome>& outcomes) {
    SweepRow row;
    row.method = method;
    row.omega_fraction = fraction;
    double err_sum = 0.0, iter_sum = 0.0;
    std::int64_t kept = 0;
    for (const auto& o : outcomes) {
        if (o.flagged) {
            ++row.flagged;
            continue;
        }
        err_sum += o.rel_error;
        iter_sum += o.iterations;
        ++kept;
    }
    if (kept == 0) {
        // Nothing survived; the row carries no statistic. NaN is deliberate —
        // check_sweep_invariants turns it into a reported violation instead
        // of letting a silent 0 masquerade as a perfect fit.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.mean_rel_error = row.std_rel_error = row.mean_iterations = nan;
        return row;
    }
    row.mean_rel_error = err_sum / static_cast<double>(kept);
    row.mean_iterations = iter_sum / static_cast<double>(kept);
    double ss = 0.0;
    for (const auto& o : outcomes) {
        if (o.flagged) continue;
        const double d = o.rel_error - row.mean_rel_error;
        ss += d * d;
    }
    row.std_rel_error = kept > 1 ? std::sqrt(ss / static_cast<double>(kept - 1)) : 0.0;
    return row;
}

std::string format_g10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

constexpr const char* kCsvHeader =
    "method,omega_fraction,mean_rel_error,std_rel_error,mean_iterations,flagged";

}  // namespace

void validate(const ExperimentConfig& cfg) {
    if (cfg.order < 1) throw contract_error("experiment config: order must be >= 1");
    if (cfg.dim < 1) throw contract_error("experiment config: dim must be >= 1");
    if (cfg.rank < 1) throw contract_error("experiment config: rank must be >= 1");
    if (!(cfg.beta > 0.0) || !(cfg.alpha >= cfg.beta) || !std::isfinite(cfg.alpha))
        throw contract_error("experiment config: need 0 < beta <= alpha, both finite");
    if (cfg.omega_fractions.empty())
        throw contract_error("experiment config: omega_fractions must be nonempty");
    for (size_t i = 0; i < cfg.omega_fractions.size(); ++i) {
        const double f = cfg.omega_fractions[i];
        if (!(f > 0.0) || f > 1.0)
            throw contract_error("experiment config: omega fractions must lie in (0, 1]");
        if (i > 0 && !(f > cfg.omega_fractions[i - 1]))
            throw contract_error("experiment config: omega fractions must be strictly ascending");
    }
    if (cfg.replicates < 1) throw contract_error("experiment config: replicates must be >= 1");
    if (cfg.methods.empty()) throw contract_error("experiment config: methods must be nonempty");
    for (size_t i = 0; i < cfg.methods.size(); ++i)
        for (size_t j = i + 1; j < cfg.methods.size(); ++j)
            if (cfg.methods[i] == cfg.methods[j])
                throw contract_error("experiment config: duplicate method");
    if (cfg.optim.max_iters < 1 || cfg.optim.memory < 1 || cfg.optim.max_line_search < 1)
        throw contract_error(
            "experiment config: optim.max_iters, optim.memory, and optim.max_line_search "
            "must be >= 1");
    if (!(cfg.optim.grad_tol > 0.0) || !(cfg.optim.func_tol > 0.0))
        throw contract_error("experiment config: optim tolerances must be positive");
    if (!(cfg.policy.eps > 0.0))
        throw contract_error("experiment config: eps must be positive");
}

SweepResult run_sweep(const ExperimentConfig& cfg, int workers) {
    validate(cfg);
    if (workers < 1) workers = 1;

    const Shape shape(std::vector<index_t>(static_cast<size_t>(cfg.order), cfg.dim));
    if (!dimension_requirement_met(shape))
        std::cerr << "run_sweep: shape " << cfg.dim << "^" << cfg.order
                  << " is below the dimension requirement; bounds may not apply\n";

    const GenConfig gen{shape, cfg.rank, cfg.beta, cfg.alpha, cfg.seed};
    validate(gen);

    // One ground truth for the whole sweep; every fraction and replicate
    // sees the same model, so rows differ only in what was observed.
    SubstreamRng truth_rng(cfg.seed, "truth");
    const KruskalModel truth = generate_truth(gen, truth_rng);

    const size_t n_fractions = cfg.omega_fractions.size();
    const size_t n_methods = cfg.methods.size();
    const size_t n_tasks = n_fractions * static_cast<size_t>(cfg.replicates);

    // grid[(fi * replicates + j) * n_methods + m] — slots are preassigned so
    // the result is identical no matter how tasks land on workers.
    std::vector<CellOutcome> grid(n_tasks * n_methods);

    auto run_task = [&](size_t task) {
        const size_t fi = task / static_cast<size_t>(cfg.replicates);
        const int j = static_cast<int>(task % static_cast<size_t>(cfg.replicates));
        const double fraction = cfg.omega_fractions[fi];

        SubstreamRng omega_rng(cfg.seed, stream_tag("omega", fi, j));
        const ObservationSet omega = sample_omega(shape, omega_size_for(shape, fraction), omega_rng);
        SubstreamRng counts_rng(cfg.seed, stream_tag("counts", fi, j));
        const SparseCountTensor counts = sample_counts(truth, omega, counts_rng);
        const ObservationSet gamma = restrict_to_nonzeros(counts, omega);

        // All methods of a replicate share one initialization stream, so
        // methods that end up minimizing the same objective (Poisson and
        // Oracle at fraction 1) walk the same iterate sequence.
        const std::uint64_t init_seed = derive_stream_seed(cfg.seed, stream_tag("init", fi, j));

        for (size_t m = 0; m < n_methods; ++m) {
            CellOutcome& out = grid[task * n_methods + m];
            FitSpec spec;
            spec.kind = cfg.methods[m];
            spec.rank = cfg.rank;
            spec.init_seed = init_seed;
            spec.optim = cfg.optim;
            spec.policy = cfg.policy;
            try {
                const FitResult res = fit(spec, counts, omega, &truth);
                const auto [mask, loss] = assemble_mask(spec.kind, shape, omega, gamma);
                const double truth_nll = masked_objective(truth, counts, mask, loss, cfg.policy);
                // The theory's hypothesis is that the estimate's likelihood
                // beats the truth's; a fit that stalled short of that is
                // outside its scope and gets flagged rather than averaged.
                if (!(res.final_nll <=
                      truth_nll + cfg.optim.func_tol * std::abs(truth_nll))) {
                    out.flagged = true;
                    continue;
                }
                out.rel_error = res.rel_error.value();
                out.iterations = res.iterations;
            } catch (const data_error&) {
                // Zero-truncated fit with no nonzero observation to learn
                // from; the replicate is unusable for this method.
                out.flagged = true;
            }
        }
    };

    if (workers == 1 || n_tasks <= 1) {
        for (size_t t = 0; t < n_tasks; ++t) run_task(t);
    } else {
        std::atomic<size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto worker = [&] {
            for (;;) {
                const size_t t = next.fetch_add(1);
                if (t >= n_tasks) return;
                try {
                    run_task(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const size_t n_workers = std::min<size_t>(static_cast<size_t>(workers), n_tasks);
        pool.reserve(n_workers);
        for (size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    SweepResult result;
    result.rows.reserve(n_methods * n_fractions);
    for (size_t m = 0; m < n_methods; ++m) {
        for (size_t fi = 0; fi < n_fractions; ++fi) {
            std::vector<CellOutcome> cell;
            cell.reserve(static_cast<size_t>(cfg.replicates));
            for (int j = 0; j < cfg.replicates; ++j)
                cell.push_back(grid[(fi * cfg.replicates + j) * n_methods + m]);
            result.rows.push_back(summarize_cell(cfg.methods[m], cfg.omega_fractions[fi], cell));
        }
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.method != b.method) return static_cast<int>(a.method) < static_cast<int>(b.method);
        return a.omega_fraction < b.omega_fraction;
    });
    return result;
}

std::vector<std::string> check_sweep_invariants(const SweepResult& result,
                                                const ExperimentConfig& cfg) {
    std::vector<std::string> violations;
    auto note = [&](const SweepRow& row, const std::string& why) {
        violations.push_back(std::string(to_string(row.method)) + " @ fraction " +
                             format_g10(row.omega_fraction) + ": " + why);
    };

    const size_t expected = cfg.methods.size() * cfg.omega_fractions.size();
    if (result.rows.size() != expected)
        violations.push_back("expected " + std::to_string(expected) + " rows, got " +
                             std::to_string(result.rows.size()));

    for (const auto& row : result.rows) {
        if (!std::isfinite(row.mean_rel_error) || row.mean_rel_error < 0.0)
            note(row, "mean_rel_error is not a finite nonnegative value");
        if (!std::isfinite(row.std_rel_error) || row.std_rel_error < 0.0)
            note(row, "std_rel_error is not a finite nonnegative value");
        if (!std::isfinite(row.mean_iterations) || row.mean_iterations < 0.0)
            note(row, "mean_iterations is not a finite nonnegative value");
        if (cfg.replicates == 1 && row.std_rel_error != 0.0)
            note(row, "std_rel_error must be 0 with a single replicate");
        if (row.flagged < 0 || row.flagged > cfg.replicates)
            note(row, "flagged count outside [0, replicates]");
    }

    // With every entry observed there are no false zeros, so the
    // all-indices and trusted-set methods minimize the same objective from
    // the same start and must land on the same statistics.
    const bool has_poisson = std::find(cfg.methods.begin(), cfg.methods.end(),
                                       EstimatorKind::Poisson) != cfg.methods.end();
    const bool has_oracle = std::find(cfg.methods.begin(), cfg.methods.end(),
                                      EstimatorKind::Oracle) != cfg.methods.end();
    if (has_poisson && has_oracle) {
        for (const auto& row : result.rows) {
            if (row.method != EstimatorKind::Poisson || row.omega_fraction != 1.0) continue;
            for (const auto& other : result.rows) {
                if (other.method != EstimatorKind::Oracle || other.omega_fraction != 1.0)
                    continue;
                if (!(std::abs(row.mean_rel_error - other.mean_rel_error) <= 1e-10))
                    violations.push_back(
                        "poisson and oracle mean errors differ at fraction 1 (" +
                        format_g10(row.mean_rel_error) + " vs " +
                        format_g10(other.mean_rel_error) + ")");
            }
        }
    }
    return violations;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open for writing: " + path.string());
    out << kCsvHeader << "\n";
    for (const auto& row : result.rows) {
        out << to_string(row.method) << ',' << format_g10(row.omega_fraction) << ','
            << format_g10(row.mean_rel_error) << ',' << format_g10(row.std_rel_error) << ','
            << format_g10(row.mean_iterations) << ',' << row.flagged << "\n";
    }
    if (!out) throw data_error("write failed: " + path.string());
}

SweepResult load_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open for reading: " + path.string());
    auto fail = [&](size_t line_no, const std::string& why) -> void {
        throw data_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };

    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) fail(1, "empty file (missing header)");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) fail(line_no, "unexpected header '" + line + "'");

    SweepResult result;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t start = 0;
        for (size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (fields.size() != 6) fail(line_no, "expected 6 comma-separated fields");

        SweepRow row;
        const auto method = estimator_from_string(fields[0]);
        if (!method) fail(line_no, "unknown method '" + fields[0] + "'");
        row.method = *method;

        auto parse_double = [&](const std::string& s, double& v) {
            const char* begin = s.data();
            const char* end = begin + s.size();
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc() || ptr != end)
                fail(line_no, "expected a real number, got '" + s + "'");
        };
        parse_double(fields[1], row.omega_fraction);
        parse_double(fields[2], row.mean_rel_error);
        parse_double(fields[3], row.std_rel_error);
        parse_double(fields[4], row.mean_iterations);
        auto [ptr, ec] = std::from_chars(fields[5].data(), fields[5].data() + fields[5].size(),
                                         row.flagged);
        if (ec != std::errc() || ptr != fields[5].data() + fields[5].size())
            fail(line_no, "expected an integer, got '" + fields[5] + "'");
        result.rows.push_back(row);
    }
    return result;
}

void write_gnuplot_script(const std::filesystem::path& csv_path,
                          const std::filesystem::path& script_path) {
    std::ofstream out(script_path);
    if (!out) throw data_error("cannot open for writing: " + script_path.string());

    std::filesystem::path png = csv_path;
    png.replace_extension(".png");
    const std::string csv = csv_path.filename().string();

    out << "# Plots mean relative error against the observed fraction, one\n"
           "# series per method, with sample-deviation error bars.\n"
           "# Usage: gnuplot " << script_path.filename().string() << "\n"
        << "set datafile separator ','\n"
        << "set terminal pngcairo size 900,600\n"
        << "set output '" << png.filename().string() << "'\n"
        << "set xlabel 'observed fraction of entries'\n"
        << "set ylabel 'mean relative error'\n"
        << "set key top right\n"
        << "set grid\n"
        << "plot \\\n";
    const char* methods[] = {"poisson", "oracle", "ztp"};
    for (size_t i = 0; i < 3; ++i) {
        out << "  '< grep \"^" << methods[i] << ",\" " << csv
            << "' using 2:3:4 with yerrorlines title '" << methods[i] << "'";
        out << (i + 1 < 3 ? ", \\\n" : "\n");
    }
    if (!out) throw data_error("write failed: " + script_path.string());
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open for reading: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw data_error(path.string() + ": " + e.what());
    }

    ExperimentConfig cfg;
    try {
        cfg.order = doc.at("order").get<int>();
        cfg.dim = doc.at("dim").get<index_t>();
        cfg.rank = doc.at("rank").get<int>();
        cfg.beta = doc.at("beta").get<double>();
        cfg.alpha = doc.at("alpha").get<double>();
        cfg.omega_fractions = doc.at("omega_fractions").get<std::vector<double>>();
        cfg.replicates = doc.at("replicates").get<int>();
        cfg.methods.clear();
        for (const auto& name : doc.at("methods")) {
            const auto kind = estimator_from_string(name.get<std::string>());
            if (!kind)
                throw data_error(path.string() + ": unknown method '" +
                                 name.get<std::string>() + "'");
            cfg.methods.push_back(*kind);
        }
        cfg.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("optim")) {
            const auto& o = doc.at("optim");
            cfg.optim.memory = o.value("memory", cfg.optim.memory);
            cfg.optim.max_iters = o.value("max_iters", cfg.optim.max_iters);
            cfg.optim.grad_tol = o.value("grad_tol", cfg.optim.grad_tol);
            cfg.optim.func_tol = o.value("func_tol", cfg.optim.func_tol);
            cfg.optim.max_line_search = o.value("max_line_search", cfg.optim.max_line_search);
        }
        cfg.policy.eps = doc.value("eps", cfg.policy.eps);
    } catch (const json::exception& e) {
        throw data_error(path.string() + ": " + e.what());
    }

    try {
        validate(cfg);
    } catch (const contract_error& e) {
        throw data_error(path.string() + ": " + e.what());
    }
    return cfg;
}

}  // namespace ztpc
