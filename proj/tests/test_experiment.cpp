#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ztpc/errors.hpp"
#include "ztpc/experiment.hpp"

using namespace ztpc;
namespace fs = std::filesystem;

namespace {

// Temporary directory torn down with the test.
struct ScratchDir {
    fs::path path;
    ScratchDir() {
        path = fs::temp_directory_path() /
               ("ztpc-exp-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~ScratchDir() { std::error_code ec; fs::remove_all(path, ec); }
    static int& counter() { static int c = 0; return c; }
};

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.order = 3;
    cfg.dim = 6;
    cfg.rank = 2;
    cfg.beta = 1.0;
    cfg.alpha = 2.5;
    cfg.omega_fractions = {0.5, 1.0};
    cfg.replicates = 2;
    cfg.methods = {EstimatorKind::Poisson, EstimatorKind::Oracle, EstimatorKind::Ztp};
    cfg.seed = 3;
    cfg.optim.max_iters = 80;
    return cfg;
}

bool rows_identical(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        const auto& x = a[i];
        const auto& y = b[i];
        const bool same =
            x.method == y.method && x.omega_fraction == y.omega_fraction &&
            x.mean_rel_error == y.mean_rel_error && x.std_rel_error == y.std_rel_error &&
            x.mean_iterations == y.mean_iterations && x.flagged == y.flagged;
        if (!same) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("experiment config validation") {
    auto cfg = tiny_config();
    CHECK_NOTHROW(validate(cfg));

    SUBCASE("fractions must be ascending and inside (0, 1]") {
        cfg.omega_fractions = {1.0, 0.5};
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg.omega_fractions = {0.5, 0.5};
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg.omega_fractions = {0.0, 0.5};
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg.omega_fractions = {0.5, 1.5};
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg.omega_fractions = {};
        CHECK_THROWS_AS(validate(cfg), contract_error);
    }
    SUBCASE("methods must be present and unique") {
        cfg.methods = {};
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg.methods = {EstimatorKind::Ztp, EstimatorKind::Ztp};
        CHECK_THROWS_AS(validate(cfg), contract_error);
    }
    SUBCASE("counting parameters must be sane") {
        cfg.replicates = 0;
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg = tiny_config();
        cfg.rank = 0;
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg = tiny_config();
        cfg.order = 0;
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg = tiny_config();
        cfg.beta = 3.0;  // above alpha
        CHECK_THROWS_AS(validate(cfg), contract_error);
        cfg = tiny_config();
        cfg.optim.grad_tol = 0.0;
        CHECK_THROWS_AS(validate(cfg), contract_error);
    }
}

TEST_CASE("run_sweep: structure, invariants, and determinism on a toy problem") {
    const auto cfg = tiny_config();
    const auto result = run_sweep(cfg);

    REQUIRE(result.rows.size() == 6);  // 3 methods x 2 fractions

    // Rows arrive sorted by (method, fraction).
    for (size_t i = 0; i + 1 < result.rows.size(); ++i) {
        const auto& a = result.rows[i];
        const auto& b = result.rows[i + 1];
        const bool ordered = a.method < b.method ||
                             (a.method == b.method && a.omega_fraction < b.omega_fraction);
        CHECK(ordered);
    }

    CHECK(check_sweep_invariants(result, cfg).empty());

    // With everything trusted there are no false zeros, so the all-indices
    // and trusted-set methods solve the same problem from the same start.
    const SweepRow* poisson_full = nullptr;
    const SweepRow* oracle_full = nullptr;
    for (const auto& row : result.rows) {
        if (row.omega_fraction != 1.0) continue;
        if (row.method == EstimatorKind::Poisson) poisson_full = &row;
        if (row.method == EstimatorKind::Oracle) oracle_full = &row;
    }
    REQUIRE(poisson_full != nullptr);
    REQUIRE(oracle_full != nullptr);
    CHECK(poisson_full->mean_rel_error == oracle_full->mean_rel_error);
    CHECK(poisson_full->mean_iterations == oracle_full->mean_iterations);

    SUBCASE("same config, same rows, run to run") {
        const auto again = run_sweep(cfg);
        CHECK(rows_identical(result.rows, again.rows));
    }
    SUBCASE("worker count does not leak into the results") {
        const auto threaded = run_sweep(cfg, 2);
        CHECK(rows_identical(result.rows, threaded.rows));
    }
    SUBCASE("a single replicate reports zero deviation") {
        auto one = tiny_config();
        one.replicates = 1;
        one.omega_fractions = {1.0};
        one.methods = {EstimatorKind::Oracle};
        const auto r = run_sweep(one);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].std_rel_error == 0.0);
        CHECK(check_sweep_invariants(r, one).empty());
    }
}

TEST_CASE("sweep CSV: exact header, stable bytes, faithful round trip") {
    ScratchDir dir;
    const auto csv = dir.path / "sweep.csv";

    const auto cfg = tiny_config();
    const auto result = run_sweep(cfg);
    write_sweep_csv(result, csv);

    SUBCASE("header is the documented six-column line") {
        std::ifstream in(csv);
        std::string first;
        REQUIRE(std::getline(in, first));
        CHECK(first ==
              "method,omega_fraction,mean_rel_error,std_rel_error,mean_iterations,flagged");
    }
    SUBCASE("load_sweep_csv recovers every field") {
        const auto loaded = load_sweep_csv(csv);
        REQUIRE(loaded.rows.size() == result.rows.size());
        for (size_t i = 0; i < loaded.rows.size(); ++i) {
            CHECK(loaded.rows[i].method == result.rows[i].method);
            CHECK(loaded.rows[i].omega_fraction ==
                  doctest::Approx(result.rows[i].omega_fraction).epsilon(1e-9));
            CHECK(loaded.rows[i].mean_rel_error ==
                  doctest::Approx(result.rows[i].mean_rel_error).epsilon(1e-9));
            CHECK(loaded.rows[i].std_rel_error ==
                  doctest::Approx(result.rows[i].std_rel_error).epsilon(1e-9));
            CHECK(loaded.rows[i].mean_iterations ==
                  doctest::Approx(result.rows[i].mean_iterations).epsilon(1e-9));
            CHECK(loaded.rows[i].flagged == result.rows[i].flagged);
        }
    }
    SUBCASE("two writes of the same result are byte-identical") {
        const auto other = dir.path / "sweep2.csv";
        write_sweep_csv(result, other);
        std::ifstream a(csv, std::ios::binary), b(other, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
        CHECK(!sa.empty());
    }
    SUBCASE("an empty result still writes the header") {
        const auto empty_csv = dir.path / "empty.csv";
        write_sweep_csv(SweepResult{}, empty_csv);
        const auto loaded = load_sweep_csv(empty_csv);
        CHECK(loaded.rows.empty());
    }
}

TEST_CASE("sweep CSV: malformed files are data errors") {
    ScratchDir dir;
    auto write_file = [&](const std::string& name, const std::string& body) {
        const auto p = dir.path / name;
        std::ofstream(p) << body;
        return p;
    };

    const auto good_header =
        "method,omega_fraction,mean_rel_error,std_rel_error,mean_iterations,flagged\n";

    CHECK_THROWS_AS((void)load_sweep_csv(dir.path / "missing.csv"), data_error);
    CHECK_THROWS_AS((void)load_sweep_csv(write_file("bad_header.csv", "a,b,c\n")), data_error);
    CHECK_THROWS_AS(
        (void)load_sweep_csv(write_file("short_row.csv",
                                        std::string(good_header) + "poisson,0.5,0.1\n")),
        data_error);
    CHECK_THROWS_AS(
        (void)load_sweep_csv(write_file(
            "bad_method.csv", std::string(good_header) + "bogus,0.5,0.1,0.0,10,0\n")),
        data_error);
    CHECK_THROWS_AS(
        (void)load_sweep_csv(write_file(
            "bad_number.csv", std::string(good_header) + "poisson,zero,0.1,0.0,10,0\n")),
        data_error);
}

TEST_CASE("gnuplot companion script mentions the CSV and every method") {
    ScratchDir dir;
    const auto csv = dir.path / "rows.csv";
    const auto gp = dir.path / "rows.gp";
    write_gnuplot_script(csv, gp);

    std::ifstream in(gp);
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(body.find("plot") != std::string::npos);
    CHECK(body.find("rows.csv") != std::string::npos);
    CHECK(body.find("poisson") != std::string::npos);
    CHECK(body.find("oracle") != std::string::npos);
    CHECK(body.find("ztp") != std::string::npos);
    CHECK(body.find("yerror") != std::string::npos);
}

TEST_CASE("experiment config files") {
    ScratchDir dir;
    auto write_file = [&](const std::string& name, const std::string& body) {
        const auto p = dir.path / name;
        std::ofstream(p) << body;
        return p;
    };

    SUBCASE("full round trip with optional blocks") {
        const auto p = write_file("cfg.json", R"({
            "order": 3, "dim": 20, "rank": 4, "beta": 0.5, "alpha": 3.0,
            "omega_fractions": [0.1, 0.4, 1.0], "replicates": 7,
            "methods": ["oracle", "ztp"], "seed": 99,
            "optim": {"max_iters": 250, "grad_tol": 1e-5},
            "eps": 1e-9
        })");
        const auto cfg = load_experiment_config(p);
        CHECK(cfg.order == 3);
        CHECK(cfg.dim == 20);
        CHECK(cfg.rank == 4);
        CHECK(cfg.beta == 0.5);
        CHECK(cfg.alpha == 3.0);
        CHECK(cfg.omega_fractions == std::vector<double>{0.1, 0.4, 1.0});
        CHECK(cfg.replicates == 7);
        CHECK(cfg.methods ==
              std::vector<EstimatorKind>{EstimatorKind::Oracle, EstimatorKind::Ztp});
        CHECK(cfg.seed == 99);
        CHECK(cfg.optim.max_iters == 250);
        CHECK(cfg.optim.grad_tol == 1e-5);
        CHECK(cfg.optim.func_tol == OptimOptions{}.func_tol);  // untouched default
        CHECK(cfg.policy.eps == 1e-9);
    }
    SUBCASE("optional fields fall back to defaults") {
        const auto p = write_file("minimal.json", R"({
            "order": 3, "dim": 10, "rank": 2, "beta": 1.0, "alpha": 2.5,
            "omega_fractions": [0.5], "replicates": 1, "methods": ["poisson"]
        })");
        const auto cfg = load_experiment_config(p);
        CHECK(cfg.seed == 0);
        CHECK(cfg.optim.max_iters == OptimOptions{}.max_iters);
        CHECK(cfg.policy.eps == StabilizationPolicy{}.eps);
    }
    SUBCASE("malformed files are data errors") {
        CHECK_THROWS_AS((void)load_experiment_config(dir.path / "nope.json"), data_error);
        CHECK_THROWS_AS((void)load_experiment_config(write_file("syntax.json", "{oops")),
                        data_error);
        CHECK_THROWS_AS(
            (void)load_experiment_config(write_file("missing.json", R"({"order": 3})")),
            data_error);
        CHECK_THROWS_AS((void)load_experiment_config(write_file("method.json", R"({
            "order": 3, "dim": 10, "rank": 2, "beta": 1.0, "alpha": 2.5,
            "omega_fractions": [0.5], "replicates": 1, "methods": ["bogus"]
        })")),
                        data_error);
        // Structurally valid JSON whose values break the config contract is
        // still bad input from the loader's point of view.
        CHECK_THROWS_AS((void)load_experiment_config(write_file("descending.json", R"({
            "order": 3, "dim": 10, "rank": 2, "beta": 1.0, "alpha": 2.5,
            "omega_fractions": [0.9, 0.2], "replicates": 1, "methods": ["poisson"]
        })")),
                        data_error);
    }
}
