#pragma once

#include "chacs/dictionary.hpp"
#include "chacs/irnls.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace chacs {

/// Random-tap FIR filter h_0..h_{L-1}.
struct RancsFilter {
    std::vector<double> taps;

    std::size_t length() const noexcept { return taps.size(); }
};

/// i.i.d. N(0, 1) taps.
RancsFilter generate_random_taps(std::size_t length, std::uint64_t seed);

/// Causal, zero-initial-state convolution followed by block-end downsampling:
///   out_n = sum_l h_l s_{n-l},   z_m = out_{lambda(m+1)-1},  m = 0..M-1.
std::vector<double> fir_measure(std::span<const double> signal, const RancsFilter& filter, std::size_t lambda);

struct LinearMeasurement {
    Eigen::MatrixXd matrix; // M x N, maps coefficients to measurements
    std::vector<double> z;
};

/// Column k is fir_measure applied to atom k.
Eigen::MatrixXd build_measurement_matrix(const RancsFilter& filter, const Dictionary& dict, std::size_t n,
                                         std::size_t lambda);

LinearMeasurement make_linear_measurement(const RancsFilter& filter, const Dictionary& dict,
                                          const Signal& signal, std::size_t lambda);

struct LinearIrlsResult {
    std::vector<double> alpha_hat;
    /// ||z - A alpha||^2 + mu ||alpha||_1 after each outer iteration.
    std::vector<double> objective_history;
    /// ||z - A alpha||^2 + 2 mu sum sqrt(alpha^2 + eps); non-increasing.
    std::vector<double> majorized_history;
    int outer_iterations = 0;
    bool converged = false;
    double final_relative_change = 0.0;
    /// Set when a weighted normal system had to be ridge-stabilised.
    bool ridge_fallback = false;
};

/// Reweighted linear least squares. Starts from unit weights, then each pass
/// solves min ||z - A a||^2 + mu sum w_k a_k^2 in closed form with
/// w = compute_weights(previous, eps), stopping on the same relative-change
/// rule as the nonlinear solver.
LinearIrlsResult irls_linear_reconstruct(const Eigen::MatrixXd& a, std::span<const double> z,
                                         const IRNLSConfig& config);

} // namespace chacs
