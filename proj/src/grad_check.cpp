#include "multicrop/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "multicrop/rng.hpp"
#include "multicrop/types.hpp"

namespace multicrop {

GradCheckReport grad_check(const std::function<double(const Eigen::VectorXd&)>& fn,
                           const Eigen::VectorXd& analytic_grad, const Eigen::VectorXd& params,
                           const GradCheckOptions& opts) {
    if (analytic_grad.size() != params.size())
        throw ShapeError("gradient length does not match parameter length");

    std::vector<Eigen::Index> coords(static_cast<std::size_t>(params.size()));
    std::iota(coords.begin(), coords.end(), Eigen::Index{0});
    if (opts.max_coords > 0 && opts.max_coords < params.size()) {
        // Fisher-Yates prefix with the counter rng, then truncate.
        CounterRng rng(opts.seed);
        for (int i = 0; i < opts.max_coords; ++i) {
            const auto j = i + static_cast<Eigen::Index>(rng.next_u64() %
                                                        static_cast<std::uint64_t>(coords.size() - i));
            std::swap(coords[static_cast<std::size_t>(i)], coords[static_cast<std::size_t>(j)]);
        }
        coords.resize(static_cast<std::size_t>(opts.max_coords));
    }

    GradCheckReport report;
    Eigen::VectorXd theta = params;
    for (const Eigen::Index i : coords) {
        const double h = opts.step * std::max(1.0, std::abs(params[i]));
        const double saved = theta[i];
        theta[i] = saved + h;
        const double f_plus = fn(theta);
        theta[i] = saved - h;
        const double f_minus = fn(theta);
        theta[i] = saved;
        if (!std::isfinite(f_plus) || !std::isfinite(f_minus))
            throw NumericalError("non-finite function value during finite differencing");
        const double fd = (f_plus - f_minus) / (2.0 * h);
        const double a = analytic_grad[i];
        const double err = std::abs(a - fd);
        const double rel = err <= opts.abs_tol
                               ? 0.0
                               : err / std::max({1.0, std::abs(a), std::abs(fd)});
        if (err > report.max_abs_err) report.max_abs_err = err;
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_index = i;
        }
        ++report.coords_checked;
    }
    return report;
}

}  // namespace multicrop
