//
// Project igafwi - Copyright 2026 the igafwi authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "igafwi/optimize.hpp"

#include <cmath>

namespace igafwi {

Eigen::VectorXd BoxLbfgs::clip(Eigen::VectorXd v) const {
    return v.cwiseMax(opts_.lower).cwiseMin(opts_.upper);
}

double BoxLbfgs::projected_gradient_norm(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& grad) const {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double g = grad[i];
        if (x[i] <= opts_.lower && g > 0.0) g = 0.0;
        if (x[i] >= opts_.upper && g < 0.0) g = 0.0;
        norm = std::max(norm, std::abs(g));
    }
    return norm;
}

Eigen::VectorXd BoxLbfgs::search_direction(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& grad) const {
    Eigen::VectorXd d;
    if (pairs_.empty()) {
        const double gmax = grad.cwiseAbs().maxCoeff();
        d = gmax > 0.0 ? Eigen::VectorXd(-grad / gmax) : Eigen::VectorXd(-grad);
    } else {
        // Two-loop recursion.
        const int m = static_cast<int>(pairs_.size());
        Eigen::VectorXd q = grad;
        std::vector<double> alpha(m), rho(m);
        for (int i = m - 1; i >= 0; --i) {
            const auto& [s, y] = pairs_[i];
            rho[i] = 1.0 / y.dot(s);
            alpha[i] = rho[i] * s.dot(q);
            q -= alpha[i] * y;
        }
        const auto& [s_last, y_last] = pairs_.back();
        const double gamma0 = s_last.dot(y_last) / y_last.dot(y_last);
        q *= gamma0;
        for (int i = 0; i < m; ++i) {
            const auto& [s, y] = pairs_[i];
            const double beta = rho[i] * y.dot(q);
            q += (alpha[i] - beta) * s;
        }
        d = -q;
    }
    // Zero components pushing against an active bound.
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] <= opts_.lower && d[i] < 0.0) d[i] = 0.0;
        if (x[i] >= opts_.upper && d[i] > 0.0) d[i] = 0.0;
    }
    return d;
}

BoxLbfgs::StepResult BoxLbfgs::step(const Eigen::VectorXd& x, double chi,
                                    const Eigen::VectorXd& grad, const Evaluator& evaluator) {
    if (!grad.allFinite())
        throw std::invalid_argument("BoxLbfgs::step: gradient contains non-finite values");

    StepResult res;
    res.n_evals = 0;

    Eigen::VectorXd d = search_direction(x, grad);
    double slope = grad.dot(d);
    if (slope >= 0.0) {
        // Fall back to projected steepest descent when the quasi-Newton
        // direction is not a descent direction.
        const double gmax = grad.cwiseAbs().maxCoeff();
        d = gmax > 0.0 ? Eigen::VectorXd(-grad / gmax) : Eigen::VectorXd(-grad);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] <= opts_.lower && d[i] < 0.0) d[i] = 0.0;
            if (x[i] >= opts_.upper && d[i] > 0.0) d[i] = 0.0;
        }
        slope = grad.dot(d);
    }

    double t = 1.0;
    for (int trial = 0; trial < opts_.max_line_search; ++trial, t *= 0.5) {
        Eigen::VectorXd x_trial = clip(x + t * d);
        auto [chi_trial, grad_trial] = evaluator(x_trial);
        ++res.n_evals;
        if (chi_trial <= chi + opts_.armijo_c * t * slope) {
            Eigen::VectorXd s = x_trial - x;
            Eigen::VectorXd y = grad_trial - grad;
            const double sy = s.dot(y);
            if (sy > 1e-12 * s.norm() * y.norm()) {
                pairs_.emplace_back(std::move(s), std::move(y));
                if (static_cast<int>(pairs_.size()) > opts_.memory) pairs_.pop_front();
            }
            ++k_;
            chi_history_.push_back(chi_trial);
            res.x = std::move(x_trial);
            res.chi = chi_trial;
            res.grad = std::move(grad_trial);
            res.step_length = t;
            res.status = StepStatus::accepted;
            return res;
        }
    }

    ++k_;
    res.x = x;
    res.chi = chi;
    res.grad = grad;
    res.step_length = 0.0;
    res.status = StepStatus::no_progress;
    return res;
}

Converged BoxLbfgs::converged(double projected_gradient_norm) const {
    if (k_ >= opts_.max_iterations) return {true, "budget"};
    if (projected_gradient_norm <= opts_.tol_projected_gradient) return {true, "stationary"};
    if (opts_.tol_chi_relative > 0.0 && chi_history_.size() >= 3) {
        const double a = chi_history_[chi_history_.size() - 3];
        const double c = chi_history_.back();
        if (a > 0.0 && (a - c) / a < opts_.tol_chi_relative) return {true, "chi-stall"};
    }
    return {false, ""};
}

} // namespace igafwi
