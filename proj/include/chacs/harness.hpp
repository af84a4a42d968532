#pragma once

#include "chacs/dictionary.hpp"
#include "chacs/henon.hpp"
#include "chacs/irnls.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chacs {

enum class Method { ChaCS, RanCS };

std::string_view to_string(Method m) noexcept;

/// sum (s - s_hat)^2 / sum s^2. Throws InvalidArgument on a zero reference
/// or on a length mismatch.
double relative_error(std::span<const double> s_true, std::span<const double> s_hat);

/// Shared pipeline settings for single trials and sweeps.
struct TrialSettings {
    std::size_t n = 128;
    HenonParams params{};
    PlanarState init{0.25, 0.25};
    double target_amplitude = kDefaultTargetAmplitude;
    IRNLSConfig solver{};
};

struct TrialRecord {
    Method method = Method::ChaCS;
    Distribution distribution = Distribution::Gaussian;
    std::size_t k = 0;
    std::size_t lambda = 1;
    std::size_t filter_length = 0; // RanCS only
    std::size_t realization = 0;
    std::uint64_t seed = 0;
    double err = 0.0; // +inf marks a failed trial
    int outer_iterations = 0;
    bool converged = false;
    double wall_time = 0.0; // seconds
};

/// Distinct, reproducible sub-seed for one stage of a trial.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Sample coefficients, scale, excite the Henon map, reconstruct by IRNLS and
/// score the synthesized estimate. Numerical failures yield err = +inf.
TrialRecord run_chacs_trial(const TrialSettings& settings, std::size_t k, std::size_t lambda,
                            Distribution distribution, std::uint64_t seed);

/// Same pipeline with a random FIR front end and linear IRLS.
TrialRecord run_rancs_trial(const TrialSettings& settings, std::size_t k, std::size_t lambda,
                            std::size_t filter_length, Distribution distribution, std::uint64_t seed);

/// Median with +inf ordered last; even counts average the two central values.
double median_error(std::span<const double> errs);

struct SweepKey {
    Method method = Method::ChaCS;
    Distribution distribution = Distribution::Gaussian;
    std::size_t lambda = 1;
    std::size_t k = 0;
    std::size_t filter_length = 0;

    friend bool operator==(const SweepKey&, const SweepKey&) = default;
};

/// Per-trial seed from (master seed, key, realization index).
std::uint64_t trial_seed(std::uint64_t master_seed, const SweepKey& key, std::size_t realization);

struct SweepGrid {
    Method method = Method::ChaCS;
    std::vector<Distribution> distributions{Distribution::Gaussian};
    std::vector<std::size_t> lambdas{2};
    std::vector<std::size_t> ks{5, 15, 25};
    std::vector<std::size_t> filter_lengths{}; // required for RanCS, ignored for ChaCS

    std::vector<SweepKey> keys() const;
};

struct SweepOptions {
    std::size_t realizations = 20;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;
    /// Timings make the trial CSV non-reproducible; off by default (column = 0).
    bool record_wall_time = false;
};

struct SummaryRow {
    SweepKey key;
    std::size_t realizations = 0;
    double median_err = 0.0;
};

struct SweepTable {
    std::vector<TrialRecord> trials; // ordered by key, then realization
    std::vector<SummaryRow> summary; // one row per key, grid order
};

/// Runs every (key, realization) trial, in parallel when threads > 1, and
/// aggregates medians. Trial failures are recorded, never rethrown.
SweepTable run_sweep(const SweepGrid& grid, const TrialSettings& settings, const SweepOptions& options);

/// Recomputes the summary block from trial rows.
std::vector<SummaryRow> summarize(std::span<const TrialRecord> trials);

inline constexpr std::string_view kTrialCsvHeader =
    "method,distribution,lambda,K,L,realization,seed,err,outer_iterations,converged,wall_time_s";
inline constexpr std::string_view kSummaryCsvHeader = "method,distribution,lambda,K,L,realizations,median_err";

void write_trials_csv(std::ostream& os, std::span<const TrialRecord> trials);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);

} // namespace chacs
