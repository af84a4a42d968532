#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace chacs {

struct InnerConfig {
    int max_inner = 200;
    double gradient_tol = 1e-10;
    double initial_damping = 1e-3;
};

/// Residual model for least squares: fills r(x) and, when `jacobian` is not
/// null, dr/dx. May throw DivergenceError for points it cannot evaluate.
using ResidualModel =
    std::function<void(std::span<const double> x, Eigen::VectorXd& residual, Eigen::MatrixXd* jacobian)>;

struct LeastSquaresReport {
    std::vector<double> x;
    /// ||r||^2 at the start point and after each accepted step.
    std::vector<double> objective_history;
    int iterations = 0;
    bool gradient_converged = false;
};

/// Levenberg damped Gauss-Newton on ||r(x)||^2.
///
/// Damping is multiplied by 10 on a rejected step and by 0.1 on an accepted
/// one. A trial point that throws DivergenceError or yields a non-finite
/// residual is rejected like any other. Throws SolverStall (carrying the last
/// accepted iterate) when the start point cannot be evaluated or when the
/// damping saturates while every recent trial diverged.
LeastSquaresReport levenberg_marquardt(const ResidualModel& model, std::span<const double> x0,
                                       const InnerConfig& config);

} // namespace chacs
