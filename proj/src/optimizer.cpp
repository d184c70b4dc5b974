#include "ztpc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iostream>

#include "ztpc/errors.hpp"

namespace ztpc {

namespace {

constexpr double kArmijoC1 = 1e-4;

struct CurvaturePair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;  // 1 / s.dot(y)
};

// Standard two-loop recursion: approximates H*g using the stored pairs, with
// the initial Hessian gamma*I scaled from the most recent pair.
Eigen::VectorXd two_loop(const std::deque<CurvaturePair>& pairs, const Eigen::VectorXd& g) {
    Eigen::VectorXd q = g;
    std::vector<double> alpha(pairs.size());
    for (size_t i = pairs.size(); i-- > 0;) {
        alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
        q -= alpha[i] * pairs[i].y;
    }
    const CurvaturePair& newest = pairs.back();
    q *= newest.s.dot(newest.y) / newest.y.squaredNorm();
    for (size_t i = 0; i < pairs.size(); ++i) {
        const double beta = pairs[i].rho * pairs[i].y.dot(q);
        q += (alpha[i] - beta) * pairs[i].s;
    }
    return q;
}

void check_finite(double f, const Eigen::VectorXd& g, const Eigen::VectorXd& x) {
    if (std::isfinite(f) && g.allFinite()) return;
    throw optimization_error("minimize: objective callback returned a non-finite value or gradient",
                             std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace

const char* to_string(OptimStatus status) {
    switch (status) {
        case OptimStatus::GradTol: return "grad_tol";
        case OptimStatus::FuncTol: return "func_tol";
        case OptimStatus::MaxIters: return "max_iters";
        case OptimStatus::LineSearchFailure: return "line_search_failure";
    }
    return "unknown";
}

Eigen::VectorXd project(Eigen::VectorXd x, const Box& box) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box.lower, box.upper);
    return x;
}

OptimResult minimize(const ObjectiveGradFn& objective, Eigen::VectorXd x0, const Box& box,
                     const OptimOptions& options) {
    if (!objective) throw contract_error("minimize: empty objective callback");
    if (x0.size() == 0) throw contract_error("minimize: empty starting point");
    if (!(box.lower <= box.upper)) throw contract_error("minimize: box.lower > box.upper");
    if (options.memory < 1 || options.max_iters < 1 || options.max_line_search < 1 ||
        !(options.grad_tol > 0.0) || !(options.func_tol > 0.0))
        throw contract_error("minimize: options must all be positive");

    Eigen::VectorXd x = project(x0, box);
    if (x != x0)
        std::cerr << "minimize: starting point was outside the box and has been clamped\n";

    Eigen::VectorXd g(x.size());
    Eigen::VectorXd g_trial(x.size());
    double f = objective(x, g);
    check_finite(f, g, x);

    OptimResult result;
    result.objective_trace.push_back(f);
    result.status = OptimStatus::MaxIters;

    std::deque<CurvaturePair> pairs;

    for (int iter = 1; iter <= options.max_iters; ++iter) {
        const Eigen::VectorXd pg = x - project(x - g, box);
        if (pg.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
            result.status = OptimStatus::GradTol;
            break;
        }

        // Variables pinned at a bound with the gradient pushing outward are
        // frozen for this iteration; curvature steps act on the rest.
        Eigen::VectorXd masked_g = g;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const bool at_lower = x[i] <= box.lower && g[i] > 0.0;
            const bool at_upper = x[i] >= box.upper && g[i] < 0.0;
            if (at_lower || at_upper) masked_g[i] = 0.0;
        }

        bool accepted = false;
        Eigen::VectorXd x_trial;
        double f_trial = 0.0;
        // Two attempts: the quasi-Newton direction, then (after discarding
        // the memory) steepest projected descent.
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            Eigen::VectorXd d;
            if (!pairs.empty()) {
                d = -two_loop(pairs, masked_g);
                for (Eigen::Index i = 0; i < x.size(); ++i)
                    if (masked_g[i] == 0.0 && g[i] != 0.0) d[i] = 0.0;
                if (g.dot(d) >= 0.0) {
                    // Not a descent direction; fall back within this attempt.
                    pairs.clear();
                    d = -pg;
                }
            } else {
                d = -pg;
            }

            double step = pairs.empty() ? std::min(1.0, 1.0 / (1.0 + d.lpNorm<Eigen::Infinity>()))
                                        : 1.0;
            for (int ls = 0; ls < options.max_line_search; ++ls, step *= 0.5) {
                x_trial = project(x + step * d, box);
                const Eigen::VectorXd actual_step = x_trial - x;
                const double slope = g.dot(actual_step);
                if (slope >= 0.0) continue;  // projection absorbed the descent
                f_trial = objective(x_trial, g_trial);
                check_finite(f_trial, g_trial, x_trial);
                if (f_trial <= f + kArmijoC1 * slope) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) pairs.clear();  // retry once from steepest descent
        }

        if (!accepted) {
            result.status = OptimStatus::LineSearchFailure;
            break;
        }

        const Eigen::VectorXd s = x_trial - x;
        const Eigen::VectorXd y = g_trial - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            pairs.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
        }

        const double f_prev = f;
        x = std::move(x_trial);
        f = f_trial;
        g.swap(g_trial);
        result.iterations = iter;
        result.objective_trace.push_back(f);

        if (f_prev - f <= options.func_tol * std::max({std::fabs(f_prev), std::fabs(f), 1.0})) {
            result.status = OptimStatus::FuncTol;
            break;
        }
    }

    result.solution = std::move(x);
    result.objective = f;
    return result;
}

}  // namespace ztpc
