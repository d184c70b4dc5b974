#include <doctest.h>

#include <cmath>
#include <limits>

#include "ztpc/errors.hpp"
#include "ztpc/optimizer.hpp"

using namespace ztpc;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

ObjectiveGradFn quadratic(const Eigen::VectorXd& center) {
    return [center](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        grad = 2.0 * (x - center);
        return (x - center).squaredNorm();
    };
}

// The classic banana-valley function; a weak optimizer stalls on it.
double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const double a = x[0], b = x[1];
    grad[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
    grad[1] = 200.0 * (b - a * a);
    return (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a);
}

}  // namespace

TEST_CASE("minimize: unconstrained quadratic converges to its center") {
    Eigen::VectorXd center(3);
    center << 1.0, -2.0, 0.5;
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3);

    const auto res = minimize(quadratic(center), x0, Box{-kInf, kInf});
    CHECK(res.status == OptimStatus::GradTol);
    CHECK((res.solution - center).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(res.objective < 1e-12);
}

TEST_CASE("minimize: rosenbrock valley reaches (1, 1)") {
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    OptimOptions opts;
    opts.max_iters = 400;
    opts.func_tol = 1e-16;  // don't let the flat valley end the run early

    const auto res = minimize(rosenbrock, x0, Box{-2.0, 2.0}, opts);
    CHECK(res.status == OptimStatus::GradTol);
    CHECK(res.solution[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(res.solution[1] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(res.iterations < 400);
}

TEST_CASE("minimize: active bound is identified exactly") {
    // min (x + 2)^2 over x >= 0 sits at the boundary with a nonzero interior
    // gradient; the projected gradient there is zero.
    Eigen::VectorXd center(1);
    center << -2.0;
    Eigen::VectorXd x0(1);
    x0 << 3.0;

    const auto res = minimize(quadratic(center), x0, Box{0.0, kInf});
    CHECK(res.status == OptimStatus::GradTol);
    CHECK(res.solution[0] == 0.0);  // exactly on the bound, not merely near it
}

TEST_CASE("minimize: infeasible start is clamped into the box") {
    Eigen::VectorXd center(2);
    center << 0.5, 0.5;
    Eigen::VectorXd x0(2);
    x0 << -10.0, 10.0;

    const auto res = minimize(quadratic(center), x0, Box{0.0, 1.0});
    CHECK(res.solution[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(res.solution[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("minimize: iteration cap reports MaxIters") {
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    OptimOptions opts;
    opts.max_iters = 3;

    const auto res = minimize(rosenbrock, x0, Box{-2.0, 2.0}, opts);
    CHECK(res.status == OptimStatus::MaxIters);
    CHECK(res.iterations == 3);
}

TEST_CASE("minimize: objective trace starts at f(x0) and never increases") {
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    Eigen::VectorXd g(2);
    const double f0 = rosenbrock(x0, g);

    const auto res = minimize(rosenbrock, x0, Box{-2.0, 2.0});
    REQUIRE(!res.objective_trace.empty());
    CHECK(res.objective_trace.front() == f0);
    for (size_t i = 1; i < res.objective_trace.size(); ++i)
        CHECK(res.objective_trace[i] <= res.objective_trace[i - 1]);
    CHECK(res.objective_trace.back() == res.objective);
}

TEST_CASE("minimize: deterministic across repeated runs") {
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    const auto a = minimize(rosenbrock, x0, Box{-2.0, 2.0});
    const auto b = minimize(rosenbrock, x0, Box{-2.0, 2.0});
    CHECK(a.objective == b.objective);
    CHECK((a.solution.array() == b.solution.array()).all());
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("minimize: a gradient pointing uphill ends in LineSearchFailure") {
    // Adversarial callback: the reported gradient is the negation of the true
    // one, so every proposed direction increases the objective and no amount
    // of backtracking can satisfy the decrease condition.
    auto liar = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        grad = -2.0 * x;
        return x.squaredNorm();
    };
    Eigen::VectorXd x0(1);
    x0 << 1.0;

    const auto res = minimize(liar, x0, Box{-kInf, kInf});
    CHECK(res.status == OptimStatus::LineSearchFailure);
    CHECK(res.solution[0] == 1.0);  // never moved
}

TEST_CASE("minimize: non-finite objective raises with the offending point") {
    auto exploding = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        grad = Eigen::VectorXd::Ones(x.size());
        return x[0] < 0.5 ? x[0] : std::numeric_limits<double>::quiet_NaN();
    };
    Eigen::VectorXd x0(1);
    x0 << 2.0;  // NaN right at the start

    CHECK_THROWS_AS((void)minimize(exploding, x0, Box{-kInf, kInf}), optimization_error);
    try {
        (void)minimize(exploding, x0, Box{-kInf, kInf});
    } catch (const optimization_error& e) {
        REQUIRE(e.offending_iterate.size() == 1);
        CHECK(e.offending_iterate[0] == 2.0);
    }
}

TEST_CASE("minimize: relative-progress tolerance stops the iteration") {
    // With an absurdly loose func_tol every accepted step counts as
    // insufficient progress, so the run stops right after the first one.
    Eigen::VectorXd center = Eigen::VectorXd::Constant(2, 0.3);
    OptimOptions opts;
    opts.func_tol = 10.0;

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
    const auto res = minimize(quadratic(center), x0, Box{-kInf, kInf}, opts);
    CHECK(res.status == OptimStatus::FuncTol);
    CHECK(res.iterations == 1);
}

TEST_CASE("minimize: nonsensical options are rejected") {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
    const auto objective = quadratic(Eigen::VectorXd::Zero(1));
    OptimOptions opts;
    opts.grad_tol = 0.0;
    CHECK_THROWS_AS((void)minimize(objective, x0, Box{}, opts), contract_error);
    opts = {};
    opts.max_iters = 0;
    CHECK_THROWS_AS((void)minimize(objective, x0, Box{}, opts), contract_error);
}

TEST_CASE("optimizer status names are stable") {
    CHECK(std::string(to_string(OptimStatus::GradTol)) == "grad_tol");
    CHECK(std::string(to_string(OptimStatus::FuncTol)) == "func_tol");
    CHECK(std::string(to_string(OptimStatus::MaxIters)) == "max_iters");
    CHECK(std::string(to_string(OptimStatus::LineSearchFailure)) == "line_search_failure");
}

TEST_CASE("project clamps elementwise") {
    Eigen::VectorXd x(3);
    x << -5.0, 0.5, 5.0;
    const auto p = project(x, Box{0.0, 1.0});
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.5);
    CHECK(p[2] == 1.0);
}
