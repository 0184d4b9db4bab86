#pragma once

// Damped (Levenberg-Marquardt) nonlinear least squares on small parameter
// vectors, with Marquardt diagonal scaling.

#include <Eigen/Dense>
#include <functional>

namespace tcups::lsq {

// Weighted residual vector r(p) (already divided by the data sigma) and its
// Jacobian dr/dp.
struct Problem {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residuals;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

struct Options {
    int max_iterations = 200;
    double parameter_tolerance = 1e-10;  // relative step size
    double initial_damping = 1e-3;
};

struct Result {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // (J^T J)^-1 at the optimum, unscaled
    double chi_squared = 0.0;    // sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

Result solve(const Problem& problem, Eigen::VectorXd start, const Options& options = {});

// Fourth-order central-difference Jacobian, used to cross-check analytic derivatives.
Eigen::MatrixXd numeric_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& p, double relative_step = 1e-6);

}  // namespace tcups::lsq
