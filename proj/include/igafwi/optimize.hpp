//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <deque>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "igafwi/errors.hpp"

namespace igafwi {

struct LbfgsOptions {
    int memory = 10;
    double lower = 1e-5;
    double upper = 1.0;
    int max_iterations = 10;
    double tol_projected_gradient = 0.0; // 0 disables the test
    double tol_chi_relative = 0.0;       // relative decrease over 2 iterations
    double armijo_c = 1e-4;
    int max_line_search = 20;
};

enum class StepStatus { accepted, no_progress };

struct Converged {
    bool done = false;
    std::string reason;
};

/// Bounded limited-memory quasi-Newton minimizer: two-loop recursion on the
/// stored curvature pairs, search direction projected onto the feasible
/// box, backtracking Armijo line search, iterates clipped to the bounds.
/// With empty memory the first step is projected steepest descent scaled
/// by 1 / ||grad||_inf.
class BoxLbfgs {
public:
    using Evaluator = std::function<std::pair<double, Eigen::VectorXd>(const Eigen::VectorXd&)>;

    struct StepResult {
        Eigen::VectorXd x;
        double chi = 0.0;
        Eigen::VectorXd grad;
        double step_length = 0.0;
        int n_evals = 0;
        StepStatus status = StepStatus::accepted;
    };

    explicit BoxLbfgs(LbfgsOptions opts) : opts_(opts) {}

    const LbfgsOptions& options() const { return opts_; }
    int iteration() const { return k_; }

    /// One quasi-Newton update from (x, chi, grad). The evaluator is called
    /// for line-search trial points; the accepted point's value and
    /// gradient are returned so the caller need not re-evaluate.
    StepResult step(const Eigen::VectorXd& x, double chi, const Eigen::VectorXd& grad,
                    const Evaluator& evaluator);

    /// Convergence test over the recorded chi history and the current
    /// projected-gradient norm.
    Converged converged(double projected_gradient_norm) const;

    /// Infinity norm of the gradient projected on the active set at x.
    double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) const;

    void record_chi(double chi) { chi_history_.push_back(chi); }

private:
    Eigen::VectorXd clip(Eigen::VectorXd v) const;
    Eigen::VectorXd search_direction(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) const;

    LbfgsOptions opts_;
    int k_ = 0;
    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs_; // (s, y)
    std::vector<double> chi_history_;
};

} // namespace igafwi
