#include "chacs/diagnostics.hpp"

#include "chacs/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace chacs {

Eigen::MatrixXd finite_difference_jacobian(const MeasurementRecord& record, const Dictionary& dict,
                                           std::span<const double> alpha_bar, double step)
{
    if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    const auto rows = static_cast<Eigen::Index>(record.m);
    const auto cols = static_cast<Eigen::Index>(alpha_bar.size());
    Eigen::MatrixXd jac(rows, cols);
    std::vector<double> probe(alpha_bar.begin(), alpha_bar.end());
    for (Eigen::Index k = 0; k < cols; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        probe[kk] = alpha_bar[kk] + step;
        const std::vector<double> plus = run_excited_slave(record, probe, dict).zbar;
        probe[kk] = alpha_bar[kk] - step;
        const std::vector<double> minus = run_excited_slave(record, probe, dict).zbar;
        probe[kk] = alpha_bar[kk];
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            jac(i, k) = (plus[ii] - minus[ii]) / (2.0 * step);
        }
    }
    return jac;
}

JacobianComparison compare_jacobians(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference,
                                     double rel_tol, double abs_floor)
{
    if (analytic.rows() != reference.rows() || analytic.cols() != reference.cols())
        throw DimensionMismatch("compare_jacobians: shape mismatch");
    JacobianComparison out;
    for (Eigen::Index i = 0; i < analytic.rows(); ++i)
        for (Eigen::Index k = 0; k < analytic.cols(); ++k) {
            const double ref = reference(i, k);
            const double err = std::abs(analytic(i, k) - ref);
            out.max_abs_error = std::max(out.max_abs_error, err);
            if (std::abs(ref) > abs_floor) out.max_rel_error = std::max(out.max_rel_error, err / std::abs(ref));
            out.worst_ratio = std::max(out.worst_ratio, err / (rel_tol * std::abs(ref) + abs_floor));
        }
    return out;
}

} // namespace chacs
