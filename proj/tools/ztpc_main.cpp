// Command-line front end: synthetic-problem generation, model fitting,
// closed-form bound evaluation, and factorial experiment sweeps. Each
// subcommand is a thin shell over the library; all science lives there.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ztpc/errors.hpp"
#include "ztpc/estimators.hpp"
#include "ztpc/experiment.hpp"
#include "ztpc/io.hpp"
#include "ztpc/problem_gen.hpp"
#include "ztpc/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenerateArgs {
    std::vector<ztpc::index_t> dims;
    int rank = 5;
    double beta = 1.0;
    double alpha = 2.5;
    double omega_frac = 1.0;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int run_generate(const GenerateArgs& args) {
    const ztpc::Shape shape(args.dims);
    if (!(args.omega_frac > 0.0) || args.omega_frac > 1.0)
        throw ztpc::contract_error("--omega-frac must lie in (0, 1]");
    const auto total = shape.num_entries();
    const auto omega_size = std::clamp<ztpc::index_t>(
        static_cast<ztpc::index_t>(std::llround(args.omega_frac * static_cast<double>(total))), 1,
        total);

    const ztpc::GenConfig cfg{shape, args.rank, args.beta, args.alpha, args.seed};
    const ztpc::ProblemInstance instance = ztpc::make_instance(cfg, omega_size);

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    ztpc::io::write_model(instance.truth, dir / "truth.json");
    ztpc::io::write_counts(instance.counts, dir / "counts.txt");
    ztpc::io::write_observation_set(instance.omega, dir / "omega.txt");
    ztpc::io::write_observation_set(instance.gamma, dir / "gamma.txt");

    std::cout << "wrote truth.json, counts.txt, omega.txt, gamma.txt to " << dir.string() << "\n"
              << "observed " << instance.omega.size() << " of " << total << " entries, "
              << instance.counts.nnz() << " nonzero\n";
    return 0;
}

struct FitArgs {
    std::string method = "ztp";
    std::string counts_path;
    std::string omega_path;
    int rank = 5;
    std::uint64_t seed = 0;
    int max_iters = 500;
    double tol = 1e-6;
    std::string truth_path;
    std::string out_path;
};

int run_fit(const FitArgs& args) {
    const auto kind = ztpc::estimator_from_string(args.method);
    if (!kind) throw ztpc::contract_error("unknown method '" + args.method + "'");

    const ztpc::SparseCountTensor counts = ztpc::io::read_counts(args.counts_path);
    const ztpc::ObservationSet omega =
        ztpc::io::read_observation_set(args.omega_path, counts.shape());

    std::optional<ztpc::KruskalModel> truth;
    if (!args.truth_path.empty()) truth = ztpc::io::read_model(args.truth_path);

    ztpc::FitSpec spec;
    spec.kind = *kind;
    spec.rank = args.rank;
    spec.init_seed = args.seed;
    spec.optim.max_iters = args.max_iters;
    spec.optim.grad_tol = args.tol;

    const ztpc::FitResult result =
        ztpc::fit(spec, counts, omega, truth ? &*truth : nullptr);

    json doc;
    doc["method"] = ztpc::to_string(*kind);
    doc["rank"] = args.rank;
    doc["seed"] = args.seed;
    doc["final_nll"] = result.final_nll;
    doc["iterations"] = result.iterations;
    doc["status"] = ztpc::to_string(result.status);
    if (result.rel_error) doc["rel_error"] = *result.rel_error;
    doc["model"] = json::parse(ztpc::io::model_to_json(result.model));

    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path);
        if (!out) throw ztpc::data_error("cannot open for writing: " + args.out_path);
        out << doc.dump(2) << "\n";
    }
    std::cout << "final_nll " << std::setprecision(17) << result.final_nll << "\n";
    if (result.rel_error) std::cout << "rel_error " << *result.rel_error << "\n";
    return 0;
}

struct BoundArgs {
    std::string kind = "ztp-nncp";
    std::vector<ztpc::index_t> dims;
    int rank = 5;
    int rank_est = -1;  // defaults to rank
    double beta = 1.0;
    double alpha = 2.5;
    ztpc::index_t omega_size = 2;
    bool warn_vacuous = false;
};

int run_theory_bound(const BoundArgs& args) {
    ztpc::BoundKind kind;
    if (args.kind == "ztp-nncp") kind = ztpc::BoundKind::ZtpNncp;
    else if (args.kind == "ztp-cp") kind = ztpc::BoundKind::ZtpCp;
    else if (args.kind == "poisson-nncp") kind = ztpc::BoundKind::PoissonNncp;
    else if (args.kind == "poisson-cp") kind = ztpc::BoundKind::PoissonCp;
    else throw ztpc::contract_error("unknown bound kind '" + args.kind + "'");

    ztpc::BoundInputs inputs{ztpc::Shape(args.dims), args.beta, args.alpha,
                             args.rank,              args.rank_est < 0 ? args.rank : args.rank_est,
                             args.omega_size};
    const double value = ztpc::theorem_bound(inputs, kind);

    json doc;
    doc["kind"] = ztpc::to_string(kind);
    doc["dims"] = args.dims;
    doc["beta"] = args.beta;
    doc["alpha"] = args.alpha;
    doc["rank"] = inputs.rank_true;
    doc["rank_est"] = inputs.rank_est;
    doc["omega_size"] = args.omega_size;
    doc["value"] = value;
    if (args.warn_vacuous && value >= 1.0) doc["vacuous"] = true;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int run_theory_verify_kl(double beta, double alpha, std::int64_t samples, std::uint64_t seed) {
    const ztpc::KlBoundsReport report = ztpc::verify_kl_bounds(beta, alpha, samples, seed);
    json doc;
    doc["beta"] = beta;
    doc["alpha"] = alpha;
    doc["samples"] = report.samples;
    doc["checked"] = report.checked;
    doc["violations"] = report.violations;
    doc["worst_margin_poisson"] = report.worst_margin_poisson;
    doc["worst_margin_ztp"] = report.worst_margin_ztp;
    doc["passed"] = report.passed;
    doc["examples"] = json::array();
    for (const auto& v : report.examples)
        doc["examples"].push_back(
            {{"p", v.p}, {"q", v.q}, {"margin", v.margin}, {"truncated", v.truncated}});
    std::cout << doc.dump(2) << "\n";
    return report.passed ? 0 : 1;
}

struct ExperimentArgs {
    std::string config_path;
    std::string out_path = "results.csv";
    int workers = 1;
    bool full_scale = false;
};

fs::path with_suffix(const fs::path& base, const std::string& tag) {
    fs::path p = base;
    const std::string stem = p.stem().string();
    const std::string ext = p.extension().string();
    p.replace_filename(stem + tag + ext);
    return p;
}

int run_experiment(const ExperimentArgs& args) {
    ztpc::ExperimentConfig base = ztpc::load_experiment_config(args.config_path);

    // Full scale widens the run to fifty replicates per fraction and a sweep
    // over three cube sizes, one CSV per size.
    std::vector<std::pair<ztpc::ExperimentConfig, fs::path>> runs;
    if (args.full_scale) {
        for (ztpc::index_t dim : {ztpc::index_t{50}, ztpc::index_t{100}, ztpc::index_t{200}}) {
            ztpc::ExperimentConfig cfg = base;
            cfg.dim = dim;
            cfg.replicates = 50;
            runs.emplace_back(cfg, with_suffix(args.out_path, "_I" + std::to_string(dim)));
        }
    } else {
        runs.emplace_back(base, fs::path(args.out_path));
    }

    bool all_ok = true;
    for (const auto& [cfg, csv_path] : runs) {
        const ztpc::SweepResult result = ztpc::run_sweep(cfg, args.workers);
        ztpc::write_sweep_csv(result, csv_path);
        fs::path script = csv_path;
        script.replace_extension(".gp");
        ztpc::write_gnuplot_script(csv_path, script);
        std::cout << "wrote " << csv_path.string() << " (" << result.rows.size()
                  << " rows) and " << script.string() << "\n";

        const auto violations = ztpc::check_sweep_invariants(result, cfg);
        for (const auto& v : violations) std::cerr << "invariant violated: " << v << "\n";
        all_ok = all_ok && violations.empty();
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank Poisson tensor estimation from zero-inflated counts"};
    app.require_subcommand(1);

    GenerateArgs gen_args;
    auto* gen = app.add_subcommand("generate", "Write a synthetic problem instance to a directory");
    gen->add_option("--dims", gen_args.dims, "tensor extents, e.g. 30,30,30")
        ->required()
        ->delimiter(',');
    gen->add_option("--rank", gen_args.rank, "ground-truth rank")->required();
    gen->add_option("--beta", gen_args.beta, "smallest model entry");
    gen->add_option("--alpha", gen_args.alpha, "largest model entry");
    gen->add_option("--omega-frac", gen_args.omega_frac, "fraction of entries observed, (0,1]");
    gen->add_option("--seed", gen_args.seed, "root random seed");
    gen->add_option("--out", gen_args.out_dir, "output directory")->required();

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a low-rank model to counts");
    fit_cmd->add_option("--method", fit_args.method, "poisson, oracle, or ztp")
        ->required()
        ->check(CLI::IsMember({"poisson", "oracle", "ztp"}));
    fit_cmd->add_option("--counts", fit_args.counts_path, "counts file")->required();
    fit_cmd->add_option("--omega", fit_args.omega_path, "trusted-index file")->required();
    fit_cmd->add_option("--rank", fit_args.rank, "estimation rank")->required();
    fit_cmd->add_option("--seed", fit_args.seed, "initialization seed");
    fit_cmd->add_option("--max-iters", fit_args.max_iters, "iteration cap");
    fit_cmd->add_option("--tol", fit_args.tol, "projected-gradient tolerance");
    fit_cmd->add_option("--truth", fit_args.truth_path, "ground-truth model (adds rel_error)");
    fit_cmd->add_option("--out", fit_args.out_path, "result JSON file");

    auto* theory = app.add_subcommand("theory", "Closed-form constants and bounds");
    theory->require_subcommand(1);

    double kappa_beta = 1.0;
    auto* kappa_cmd = theory->add_subcommand("kappa", "Error-amplification factor");
    kappa_cmd->add_option("--beta", kappa_beta, "smallest model entry")->required();

    BoundArgs bound_args;
    auto* bound_cmd = theory->add_subcommand("bound", "Relative-error bound right-hand side");
    bound_cmd
        ->add_option("--kind", bound_args.kind, "ztp-nncp, ztp-cp, poisson-nncp, or poisson-cp")
        ->check(CLI::IsMember({"ztp-nncp", "ztp-cp", "poisson-nncp", "poisson-cp"}));
    bound_cmd->add_option("--dims", bound_args.dims, "tensor extents")->required()->delimiter(',');
    bound_cmd->add_option("--rank", bound_args.rank, "true rank")->required();
    bound_cmd->add_option("--rank-est", bound_args.rank_est, "estimation rank (defaults to --rank)");
    bound_cmd->add_option("--beta", bound_args.beta, "smallest model entry");
    bound_cmd->add_option("--alpha", bound_args.alpha, "largest model entry");
    bound_cmd->add_option("--omega-size", bound_args.omega_size, "trusted-set size")->required();
    bound_cmd->add_flag("--warn-vacuous", bound_args.warn_vacuous,
                        "mark outputs whose right-hand side is >= 1");

    double kl_beta = 1.0, kl_alpha = 2.5;
    std::int64_t kl_samples = 100000;
    std::uint64_t kl_seed = 0;
    auto* verify_cmd = theory->add_subcommand("verify-kl", "Spot-check KL lower bounds");
    verify_cmd->add_option("--beta", kl_beta, "lower entry bound")->required();
    verify_cmd->add_option("--alpha", kl_alpha, "upper entry bound")->required();
    verify_cmd->add_option("--samples", kl_samples, "random pairs to test");
    verify_cmd->add_option("--seed", kl_seed, "root random seed");

    ExperimentArgs exp_args;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a factorial sweep from a JSON config");
    exp_cmd->add_option("--config", exp_args.config_path, "experiment config JSON")->required();
    exp_cmd->add_option("--out", exp_args.out_path, "output CSV path");
    exp_cmd->add_option("--workers", exp_args.workers, "concurrent replicate fits");
    exp_cmd->add_flag("--full-scale", exp_args.full_scale,
                      "50 replicates over cube sizes 50, 100, 200 (hours of compute)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return run_generate(gen_args);
        if (*fit_cmd) return run_fit(fit_args);
        if (*kappa_cmd) {
            const double k = ztpc::kappa(kappa_beta);
            json doc{{"beta", kappa_beta}, {"kappa", k}, {"sqrt_kappa", std::sqrt(k)}};
            std::cout << doc.dump(2) << "\n";
            return 0;
        }
        if (*bound_cmd) return run_theory_bound(bound_args);
        if (*verify_cmd) return run_theory_verify_kl(kl_beta, kl_alpha, kl_samples, kl_seed);
        if (*exp_cmd) return run_experiment(exp_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
