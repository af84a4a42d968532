#include "chacs/harness.hpp"

#include "chacs/error.hpp"
#include "chacs/io.hpp"
#include "chacs/rancs.hpp"
#include "chacs/slave.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace chacs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum SubSeed : std::uint64_t { kCoefficients = 1, kStart = 2, kTaps = 3 };

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive: combine(h, v) != combine(v, h).
std::uint64_t combine(std::uint64_t h, std::uint64_t v)
{
    return splitmix64(h ^ (splitmix64(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

double energy(std::span<const double> s)
{
    double e = 0.0;
    for (double v : s) e += v * v;
    return e;
}

// Relative error, or the absolute energy of the estimate for an all-zero truth.
double score(std::span<const double> truth, std::span<const double> estimate)
{
    if (energy(truth) == 0.0) return energy(estimate);
    return relative_error(truth, estimate);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::string_view to_string(Method m) noexcept { return m == Method::ChaCS ? "chacs" : "rancs"; }

double relative_error(std::span<const double> s_true, std::span<const double> s_hat)
{
    if (s_true.size() != s_hat.size()) throw DimensionMismatch("relative_error: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s_true.size(); ++i) {
        const double d = s_true[i] - s_hat[i];
        num += d * d;
        den += s_true[i] * s_true[i];
    }
    if (den == 0.0) throw InvalidArgument("relative_error: reference signal is identically zero");
    return num / den;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return combine(splitmix64(seed), stream); }

TrialRecord run_chacs_trial(const TrialSettings& settings, std::size_t k, std::size_t lambda,
                            Distribution distribution, std::uint64_t seed)
{
    TrialRecord rec;
    rec.method = Method::ChaCS;
    rec.distribution = distribution;
    rec.k = k;
    rec.lambda = lambda;
    rec.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    const Dictionary dict(settings.n);
    const SparseCoefficients coeffs =
        sample_sparse_coefficients(settings.n, k, distribution, derive_seed(seed, kCoefficients));
    try {
        const double scale =
            choose_scale(dict, coeffs.alpha, settings.params, settings.init, settings.target_amplitude);
        const Signal signal = synthesize_signal(dict, coeffs.alpha, scale);
        const MeasurementRecord record = measure(settings.params, settings.init, signal, lambda);
        const ReconstructionResult result =
            irnls_reconstruct(record, dict, settings.solver, derive_seed(seed, kStart));
        const Signal estimate = synthesize_signal(dict, result.alpha_hat, scale);
        rec.err = score(signal.samples, estimate.samples);
        rec.outer_iterations = result.outer_iterations;
        rec.converged = result.converged;
    } catch (const NumericalError&) {
        rec.err = kInf;
        rec.converged = false;
    }
    if (!std::isfinite(rec.err)) {
        rec.err = kInf;
        rec.converged = false;
    }
    rec.wall_time = seconds_since(t0);
    return rec;
}

TrialRecord run_rancs_trial(const TrialSettings& settings, std::size_t k, std::size_t lambda,
                            std::size_t filter_length, Distribution distribution, std::uint64_t seed)
{
    TrialRecord rec;
    rec.method = Method::RanCS;
    rec.distribution = distribution;
    rec.k = k;
    rec.lambda = lambda;
    rec.filter_length = filter_length;
    rec.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    const Dictionary dict(settings.n);
    const SparseCoefficients coeffs =
        sample_sparse_coefficients(settings.n, k, distribution, derive_seed(seed, kCoefficients));
    const RancsFilter filter = generate_random_taps(filter_length, derive_seed(seed, kTaps));
    try {
        const Signal signal = synthesize_signal(dict, coeffs.alpha, 1.0);
        const LinearMeasurement meas = make_linear_measurement(filter, dict, signal, lambda);
        const LinearIrlsResult result = irls_linear_reconstruct(meas.matrix, meas.z, settings.solver);
        const Signal estimate = synthesize_signal(dict, result.alpha_hat, 1.0);
        rec.err = score(signal.samples, estimate.samples);
        rec.outer_iterations = result.outer_iterations;
        rec.converged = result.converged;
    } catch (const NumericalError&) {
        rec.err = kInf;
        rec.converged = false;
    }
    if (!std::isfinite(rec.err)) {
        rec.err = kInf;
        rec.converged = false;
    }
    rec.wall_time = seconds_since(t0);
    return rec;
}

double median_error(std::span<const double> errs)
{
    if (errs.empty()) throw InvalidArgument("median_error: no values");
    std::vector<double> sorted(errs.begin(), errs.end());
    // NaN is treated like a failure and sorts last with +inf.
    for (double& v : sorted)
        if (std::isnan(v)) v = kInf;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    const double lo = sorted[n / 2 - 1];
    const double hi = sorted[n / 2];
    if (std::isinf(hi)) return kInf;
    return 0.5 * (lo + hi);
}

std::uint64_t trial_seed(std::uint64_t master_seed, const SweepKey& key, std::size_t realization)
{
    std::uint64_t h = splitmix64(master_seed);
    h = combine(h, static_cast<std::uint64_t>(key.method));
    h = combine(h, static_cast<std::uint64_t>(key.distribution));
    h = combine(h, key.lambda);
    h = combine(h, key.k);
    h = combine(h, key.filter_length);
    return combine(h, realization);
}

std::vector<SweepKey> SweepGrid::keys() const
{
    std::vector<std::size_t> lengths = filter_lengths;
    if (method == Method::ChaCS) lengths = {0};
    else if (lengths.empty()) throw InvalidArgument("RanCS sweep needs at least one filter length");

    std::vector<SweepKey> out;
    for (Distribution d : distributions)
        for (std::size_t lambda : lambdas)
            for (std::size_t k : ks)
                for (std::size_t l : lengths) out.push_back(SweepKey{method, d, lambda, k, l});
    return out;
}

std::vector<SummaryRow> summarize(std::span<const TrialRecord> trials)
{
    std::vector<SummaryRow> rows;
    std::vector<std::vector<double>> errs;
    for (const TrialRecord& t : trials) {
        const SweepKey key{t.method, t.distribution, t.lambda, t.k, t.filter_length};
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) { return r.key == key; });
        if (it == rows.end()) {
            rows.push_back(SummaryRow{key, 0, 0.0});
            errs.emplace_back();
            it = rows.end() - 1;
        }
        const auto idx = static_cast<std::size_t>(it - rows.begin());
        errs[idx].push_back(t.err);
        ++it->realizations;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].median_err = median_error(errs[i]);
    return rows;
}

SweepTable run_sweep(const SweepGrid& grid, const TrialSettings& settings, const SweepOptions& options)
{
    if (options.realizations < 1) throw InvalidArgument("sweep needs at least one realization");
    settings.solver.validate();
    for (std::size_t lambda : grid.lambdas)
        if (lambda < 1 || lambda > settings.n) throw InvalidArgument("sweep lambda out of range");
    for (std::size_t k : grid.ks)
        if (k > settings.n) throw InvalidArgument("sweep sparsity exceeds N");

    const std::vector<SweepKey> keys = grid.keys();
    const std::size_t total = keys.size() * options.realizations;
    SweepTable table;
    table.trials.resize(total);

    const auto run_one = [&](std::size_t index) {
        const SweepKey& key = keys[index / options.realizations];
        const std::size_t r = index % options.realizations;
        const std::uint64_t seed = trial_seed(options.master_seed, key, r);
        TrialRecord rec;
        try {
            rec = key.method == Method::ChaCS
                      ? run_chacs_trial(settings, key.k, key.lambda, key.distribution, seed)
                      : run_rancs_trial(settings, key.k, key.lambda, key.filter_length, key.distribution, seed);
        } catch (const std::exception&) {
            rec = TrialRecord{key.method, key.distribution, key.k, key.lambda, key.filter_length, r, seed,
                              kInf,       0,                false, 0.0};
        }
        rec.realization = r;
        if (!options.record_wall_time) rec.wall_time = 0.0;
        table.trials[index] = rec;
    };

    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1 || total <= 1) {
        for (std::size_t i = 0; i < total; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, total));
        for (unsigned t = 0; t < count; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < total; i = next++) run_one(i);
            });
    }

    table.summary = summarize(table.trials);
    return table;
}

void write_trials_csv(std::ostream& os, std::span<const TrialRecord> trials)
{
    os << kTrialCsvHeader << '\n';
    for (const TrialRecord& t : trials) {
        os << to_string(t.method) << ',' << to_string(t.distribution) << ',' << t.lambda << ',' << t.k << ','
           << t.filter_length << ',' << t.realization << ',' << t.seed << ',' << format_real(t.err) << ','
           << t.outer_iterations << ',' << (t.converged ? "true" : "false") << ',' << format_real(t.wall_time)
           << '\n';
    }
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows)
{
    os << kSummaryCsvHeader << '\n';
    for (const SummaryRow& r : rows) {
        os << to_string(r.key.method) << ',' << to_string(r.key.distribution) << ',' << r.key.lambda << ','
           << r.key.k << ',' << r.key.filter_length << ',' << r.realizations << ',' << format_real(r.median_err)
           << '\n';
    }
}

} // namespace chacs
