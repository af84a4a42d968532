#pragma once

#include "chacs/henon.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chacs {

/// Orthonormal real Fourier basis of length N (N even, N >= 4).
///
/// Column layout (0-based): 0 is the constant atom 1/sqrt(N); for
/// j = 1..N/2-1, columns 2j-1 and 2j are sqrt(2/N) cos(2 pi j n / N) and
/// sqrt(2/N) sin(2 pi j n / N); column N-1 is the Nyquist atom (-1)^n / sqrt(N).
class Dictionary {
public:
    explicit Dictionary(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    const Eigen::MatrixXd& atoms() const noexcept { return atoms_; }
    /// Digital frequency of column k, in [0, 0.5].
    double frequency(std::size_t k) const;

private:
    std::size_t n_;
    Eigen::MatrixXd atoms_;
};

Dictionary build_real_fourier_dictionary(std::size_t n);

enum class Distribution { Gaussian, Bernoulli };

std::string_view to_string(Distribution d) noexcept;
/// Accepts "gaussian" or "bernoulli"; throws InvalidArgument otherwise.
Distribution parse_distribution(std::string_view name);

struct SparseCoefficients {
    std::vector<double> alpha;
    std::vector<std::size_t> support; // ascending
    Distribution distribution = Distribution::Gaussian;

    std::size_t sparsity() const noexcept { return support.size(); }
};

/// K atoms drawn uniformly without replacement; values N(0,1) or +/-1.
SparseCoefficients sample_sparse_coefficients(std::size_t n, std::size_t k,
                                              Distribution distribution, std::uint64_t seed);

struct Signal {
    std::vector<double> samples;
    double scale = 1.0;
};

/// samples = scale * atoms * alpha
Signal synthesize_signal(const Dictionary& dict, std::span<const double> alpha, double scale = 1.0);

/// atoms^T * samples. Exact coefficients of the (scaled) signal.
std::vector<double> analyze_signal(const Dictionary& dict, std::span<const double> samples);

inline constexpr double kDefaultTargetAmplitude = 0.1;

/// Protocol scale c = target_amplitude / max|s_raw|, halved (at most 20 times)
/// until the excited map passes check_chaotic. Zero coefficients give c = target.
/// Throws ScalingFailure when no candidate keeps the orbit bounded.
double choose_scale(const Dictionary& dict, std::span<const double> alpha, const HenonParams& params,
                    const PlanarState& init, double target_amplitude = kDefaultTargetAmplitude,
                    const ChaosCheckOptions& check = {});

} // namespace chacs
