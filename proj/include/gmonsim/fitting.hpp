#ifndef GMONSIM_FITTING_HPP
#define GMONSIM_FITTING_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "gmonsim/errors.hpp"

namespace gmonsim {

struct LMOptions {
    int max_iterations = 300;
    double ftol = 1e-14;  // relative decrease of the sum of squares
    double xtol = 1e-12;  // relative step size
    double initial_damping = 1e-3;
    double fd_step = 1e-6; // central-difference step, relative to max(|x|, 1)
};

struct LMResult {
    Eigen::VectorXd x;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped least squares with a central-difference Jacobian.  Callers scale
/// parameters to order one; a residual function may signal an infeasible
/// point by returning non-finite entries.
inline LMResult levenberg_marquardt(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd x0, const LMOptions& opt = {}) {
    const auto n = x0.size();
    auto safe_eval = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r = f(x);
        if (!r.allFinite()) r.setConstant(r.size() ? r.size() : 1, 1e12);
        return r;
    };
    Eigen::VectorXd r = safe_eval(x0);
    double rss = r.squaredNorm();
    double damping = opt.initial_damping;
    LMResult res;
    res.x = x0;

    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it + 1;
        Eigen::MatrixXd jac(r.size(), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = opt.fd_step * std::max(std::abs(res.x[j]), 1.0);
            Eigen::VectorXd xp = res.x, xm = res.x;
            xp[j] += h;
            xm[j] -= h;
            jac.col(j) = (safe_eval(xp) - safe_eval(xm)) / (2.0 * h);
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool stepped = false;
        for (int tries = 0; tries < 12 && !stepped; ++tries) {
            Eigen::MatrixXd m = jtj;
            for (Eigen::Index j = 0; j < n; ++j) m(j, j) += damping * std::max(jtj(j, j), 1e-12);
            const Eigen::VectorXd step = m.ldlt().solve(-g);
            const Eigen::VectorXd x_new = res.x + step;
            const Eigen::VectorXd r_new = safe_eval(x_new);
            const double rss_new = r_new.squaredNorm();
            if (rss_new < rss) {
                const double rel_step = step.norm() / std::max(res.x.norm(), 1e-12);
                const double rel_decrease = (rss - rss_new) / std::max(rss, 1e-300);
                res.x = x_new;
                r = r_new;
                rss = rss_new;
                damping = std::max(damping / 3.0, 1e-12);
                stepped = true;
                if (rel_step < opt.xtol || rel_decrease < opt.ftol) {
                    res.rss = rss;
                    res.converged = true;
                    return res;
                }
            } else {
                damping *= 10.0;
            }
        }
        if (!stepped) {
            res.rss = rss;
            res.converged = true; // local minimum: no improving step at any damping
            return res;
        }
    }
    res.rss = rss;
    res.converged = false;
    return res;
}

} // namespace gmonsim

#endif
