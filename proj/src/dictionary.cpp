#include "chacs/dictionary.hpp"

#include "chacs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace chacs {

Dictionary::Dictionary(std::size_t n) : n_(n)
{
    if (n < 4 || n % 2 != 0)
        throw InvalidArgument("dictionary length must be even and >= 4, got " + std::to_string(n));

    const double dn = static_cast<double>(n);
    const double edge = 1.0 / std::sqrt(dn);
    const double mid = std::sqrt(2.0 / dn);
    atoms_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        atoms_(row, 0) = edge;
        for (std::size_t j = 1; j < n / 2; ++j) {
            // Reduce j*t mod n first so the phase stays exact for large n.
            const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * t) % n) / dn;
            atoms_(row, static_cast<Eigen::Index>(2 * j - 1)) = mid * std::cos(phase);
            atoms_(row, static_cast<Eigen::Index>(2 * j)) = mid * std::sin(phase);
        }
        atoms_(row, static_cast<Eigen::Index>(n - 1)) = (t % 2 == 0) ? edge : -edge;
    }
}

double Dictionary::frequency(std::size_t k) const
{
    if (k >= n_) throw InvalidArgument("atom index out of range");
    if (k == 0) return 0.0;
    if (k == n_ - 1) return 0.5;
    return static_cast<double>((k + 1) / 2) / static_cast<double>(n_);
}

Dictionary build_real_fourier_dictionary(std::size_t n) { return Dictionary(n); }

std::string_view to_string(Distribution d) noexcept
{
    return d == Distribution::Gaussian ? "gaussian" : "bernoulli";
}

Distribution parse_distribution(std::string_view name)
{
    if (name == "gaussian") return Distribution::Gaussian;
    if (name == "bernoulli") return Distribution::Bernoulli;
    throw InvalidArgument("unknown distribution '" + std::string(name) + "' (expected gaussian or bernoulli)");
}

SparseCoefficients sample_sparse_coefficients(std::size_t n, std::size_t k, Distribution distribution,
                                              std::uint64_t seed)
{
    if (k > n)
        throw InvalidArgument("sparsity K=" + std::to_string(k) + " exceeds length N=" + std::to_string(n));

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), std::size_t{0});

    SparseCoefficients out;
    out.distribution = distribution;
    out.alpha.assign(n, 0.0);
    out.support.reserve(k);
    std::sample(indices.begin(), indices.end(), std::back_inserter(out.support), k, rng);

    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t idx : out.support)
        out.alpha[idx] = distribution == Distribution::Gaussian ? normal(rng) : (coin(rng) ? 1.0 : -1.0);
    return out;
}

Signal synthesize_signal(const Dictionary& dict, std::span<const double> alpha, double scale)
{
    if (alpha.size() != dict.size())
        throw DimensionMismatch("synthesize_signal: coefficient length " + std::to_string(alpha.size()) +
                                " != dictionary length " + std::to_string(dict.size()));
    const Eigen::Map<const Eigen::VectorXd> a(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
    const Eigen::VectorXd s = scale * (dict.atoms() * a);
    return Signal{std::vector<double>(s.data(), s.data() + s.size()), scale};
}

std::vector<double> analyze_signal(const Dictionary& dict, std::span<const double> samples)
{
    if (samples.size() != dict.size())
        throw DimensionMismatch("analyze_signal: signal length " + std::to_string(samples.size()) +
                                " != dictionary length " + std::to_string(dict.size()));
    const Eigen::Map<const Eigen::VectorXd> s(samples.data(), static_cast<Eigen::Index>(samples.size()));
    const Eigen::VectorXd a = dict.atoms().transpose() * s;
    return {a.data(), a.data() + a.size()};
}

double choose_scale(const Dictionary& dict, std::span<const double> alpha, const HenonParams& params,
                    const PlanarState& init, double target_amplitude, const ChaosCheckOptions& check)
{
    if (!(target_amplitude > 0.0) || !std::isfinite(target_amplitude))
        throw InvalidArgument("target amplitude must be positive");

    const Signal raw = synthesize_signal(dict, alpha, 1.0);
    double peak = 0.0;
    for (double v : raw.samples) peak = std::max(peak, std::abs(v));
    // No peak to normalise; treat the raw signal as unit-peak so the solver still
    // sees a realistic excitation scale.
    if (peak == 0.0) return target_amplitude;

    constexpr int kMaxHalvings = 20;
    std::vector<double> scaled(raw.samples.size());
    double c = target_amplitude / peak;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, c *= 0.5) {
        std::transform(raw.samples.begin(), raw.samples.end(), scaled.begin(),
                       [c](double v) { return c * v; });
        if (check_chaotic(params, init, std::span<const double>(scaled), check).bounded) return c;
    }
    throw ScalingFailure("choose_scale: excited map still escapes after 20 halvings");
}

} // namespace chacs
