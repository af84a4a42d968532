#pragma once

#include "chacs/dictionary.hpp"
#include "chacs/levenberg_marquardt.hpp"
#include "chacs/slave.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace chacs {

/// Knobs of the reweighted solver. Defaults: mu = 1e-6, eps = 1e-14 and a
/// 1e-5 relative-change stopping rule.
struct IRNLSConfig {
    double mu = 1e-6;
    double eps = 1e-14;
    double outer_tol = 1e-5;
    int max_outer = 50;
    InnerConfig inner;

    void validate() const;
};

/// w_k = (alpha_k^2 + eps)^(-1/2); bounded above by eps^(-1/2).
struct Weights {
    std::vector<double> w;
};

Weights compute_weights(std::span<const double> alpha_bar, double eps);

struct RegularizedResiduals {
    /// [z - zbar ; sqrt(mu w) .* alpha_bar], length M + N.
    Eigen::VectorXd residual;
    /// d residual / d alpha_bar: [-dzbar/dalpha ; diag(sqrt(mu w))].
    Eigen::MatrixXd jacobian;
};

/// ||residual||^2 = sum |z - zbar|^2 + mu * sum w_k alpha_k^2.
RegularizedResiduals build_regularized_residuals(const MeasurementRecord& record, const Dictionary& dict,
                                                 std::span<const double> alpha_bar, const Weights& weights,
                                                 double mu, bool with_jacobian = true);

/// Data misfit plus mu * ||alpha||_1.
double l1_objective(const MeasurementRecord& record, const Dictionary& dict, std::span<const double> alpha_bar,
                    double mu);

struct InnerSolve {
    std::vector<double> alpha;
    std::vector<double> objective_history;
    int iterations = 0;
    bool gradient_converged = false;
};

/// Minimise the weighted, regularised misfit for fixed weights with
/// Levenberg-Marquardt, starting from alpha_start.
InnerSolve inner_weighted_nls(const MeasurementRecord& record, const Dictionary& dict, const Weights& weights,
                              double mu, std::span<const double> alpha_start, const InnerConfig& inner);

struct ReconstructionResult {
    std::vector<double> alpha_hat;
    /// Data misfit + mu ||alpha||_1 after each outer iteration.
    std::vector<double> objective_history;
    int outer_iterations = 0;
    bool converged = false;
    double final_relative_change = 0.0;
};

/// Uniform [-1, 1]^N start drawn from `seed`.
std::vector<double> random_start(std::size_t n, std::uint64_t seed);

/// Iteratively reweighted nonlinear least squares from a random start.
/// Each outer pass recomputes all N weights, re-solves the weighted problem,
/// and stops once ||alpha_{j+1} - alpha_j|| / ||alpha_j|| <= outer_tol.
ReconstructionResult irnls_reconstruct(const MeasurementRecord& record, const Dictionary& dict,
                                       const IRNLSConfig& config, std::uint64_t seed);

/// Same loop from a caller-supplied start.
ReconstructionResult irnls_reconstruct_from(const MeasurementRecord& record, const Dictionary& dict,
                                            const IRNLSConfig& config, std::span<const double> alpha_start);

} // namespace chacs
