#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace multicrop {

struct GradCheckOptions {
    double step = 1e-6;        // h_i = step * max(1, |theta_i|)
    double abs_tol = 1e-8;     // near-zero components pass on absolute error
    int max_coords = 0;        // 0 = check every coordinate, else a random subset
    std::uint64_t seed = 0;    // subset selection seed
};

struct GradCheckReport {
    double max_rel_err = 0.0;  // |analytic - fd| / max(1, |analytic|, |fd|)
    double max_abs_err = 0.0;
    Eigen::Index worst_index = -1;
    Eigen::Index coords_checked = 0;

    bool ok(double rel_tol) const { return max_rel_err <= rel_tol; }
};

/// Central finite differences of fn against a supplied analytic gradient.
/// Components with err <= abs_tol are treated as matching regardless of
/// their relative error.
GradCheckReport grad_check(const std::function<double(const Eigen::VectorXd&)>& fn,
                           const Eigen::VectorXd& analytic_grad, const Eigen::VectorXd& params,
                           const GradCheckOptions& opts = {});

}  // namespace multicrop
