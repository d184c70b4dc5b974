#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <vector>

namespace ztpc {

/// Uniform box constraint applied to every variable.
struct Box {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

struct OptimOptions {
    int memory = 5;                // number of curvature pairs retained
    int max_iters = 500;
    double grad_tol = 1e-6;        // infinity norm of the projected gradient
    double func_tol = 1e-10;       // relative per-iteration objective decrease
    int max_line_search = 20;      // backtracking halvings per direction
};

enum class OptimStatus { GradTol, FuncTol, MaxIters, LineSearchFailure };

[[nodiscard]] const char* to_string(OptimStatus status);

struct OptimResult {
    Eigen::VectorXd solution;           // box-feasible
    double objective = 0.0;             // callback value at solution
    int iterations = 0;                 // accepted steps
    OptimStatus status = OptimStatus::MaxIters;
    std::vector<double> objective_trace;  // objective after each accepted step,
                                          // starting with the initial point
};

/// Objective callback: returns f(x) and writes the gradient into `grad`
/// (already sized to x). Must be deterministic and finite at every
/// box-feasible point; non-finite output aborts with optimization_error.
using ObjectiveGradFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Elementwise clamp of x into the box.
[[nodiscard]] Eigen::VectorXd project(Eigen::VectorXd x, const Box& box);

/// Bound-constrained minimization: projected gradient identifies the active
/// bounds, limited-memory BFGS curvature shapes the step on the free
/// variables, and a backtracking Armijo search (with projection) enforces
/// monotone descent. Deterministic for identical inputs. An infeasible x0 is
/// clamped into the box with a warning on stderr.
[[nodiscard]] OptimResult minimize(const ObjectiveGradFn& objective, Eigen::VectorXd x0,
                                   const Box& box, const OptimOptions& options = {});

}  // namespace ztpc
