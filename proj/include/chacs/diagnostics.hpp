#pragma once

#include "chacs/dictionary.hpp"
#include "chacs/slave.hpp"

#include <Eigen/Dense>

#include <span>

namespace chacs {

/// Central-difference estimate of d zbar / d alpha_bar, one column per
/// coefficient. Used to audit the sensitivity recursion.
Eigen::MatrixXd finite_difference_jacobian(const MeasurementRecord& record, const Dictionary& dict,
                                           std::span<const double> alpha_bar, double step = 1e-6);

struct JacobianComparison {
    /// max |J - J_fd| / (rel_tol |J_fd| + abs_floor); <= 1 means every entry passes.
    double worst_ratio = 0.0;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0; // over entries with |J_fd| above the absolute floor
};

JacobianComparison compare_jacobians(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference,
                                     double rel_tol = 1e-5, double abs_floor = 1e-8);

} // namespace chacs
