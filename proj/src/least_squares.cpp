#include "tcups/least_squares.hpp"

#include <cmath>

namespace tcups::lsq {

Result solve(const Problem& problem, Eigen::VectorXd p, const Options& options) {
    Result out;
    Eigen::VectorXd r = problem.residuals(p);
    double cost = r.squaredNorm();
    double lambda = options.initial_damping;
    const Eigen::Index n = p.size();

    for (int it = 1; it <= options.max_iterations; ++it) {
        out.iterations = it;
        const Eigen::MatrixXd jac = problem.jacobian(p);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        Eigen::VectorXd diag = jtj.diagonal();
        for (Eigen::Index k = 0; k < n; ++k) diag[k] = std::max(diag[k], 1e-300);

        bool accepted = false;
        Eigen::VectorXd step;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal() += lambda * diag;
            step = damped.ldlt().solve(-grad);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = p + step;
            const Eigen::VectorXd rt = problem.residuals(trial);
            const double trial_cost = rt.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                p = trial;
                r = rt;
                cost = trial_cost;
                lambda = std::max(lambda * 0.1, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        const double scale = p.norm() + options.parameter_tolerance;
        if (!accepted || step.norm() <= options.parameter_tolerance * scale) {
            // No downhill step left (at a minimum to machine precision) or the
            // step fell below tolerance.
            out.converged = true;
            break;
        }
    }

    const Eigen::MatrixXd jac = problem.jacobian(p);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    out.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse();
    out.params = p;
    out.chi_squared = cost;
    return out;
}

Eigen::MatrixXd numeric_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& p, double relative_step) {
    const Eigen::VectorXd r0 = residuals(p);
    Eigen::MatrixXd jac(r0.size(), p.size());
    // Five-point stencil; the step scales with |p|, which is coarse for location parameters.
    auto at = [&](Eigen::Index k, double d) {
        Eigen::VectorXd q = p;
        q[k] += d;
        return residuals(q);
    };
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double h = relative_step * std::max(1.0, std::abs(p[k]));
        jac.col(k) = (8.0 * (at(k, h) - at(k, -h)) - (at(k, 2 * h) - at(k, -2 * h))) / (12.0 * h);
    }
    return jac;
}

}  // namespace tcups::lsq
