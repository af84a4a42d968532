// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "chacs/diagnostics.hpp"
#include "chacs/error.hpp"
#include "chacs/harness.hpp"
#include "chacs/io.hpp"
#include "chacs/rancs.hpp"
#include "chacs/slave.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace chacs;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Verdict()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        v.pass = false;
        v.detail += " [over budget]";
    }
    if (!v.pass) ++failures;
    std::printf("%s %2d %-28s %s (%.2f s / %.0f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs,
                budget_s);
    std::fflush(stdout);
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const HenonParams kParams{1.4, 0.3};
const PlanarState kInit{0.25, 0.25};

MeasurementRecord measured(const Dictionary& d, const SparseCoefficients& c, std::size_t lambda, Signal* out = nullptr)
{
    const Signal s = synthesize_signal(d, c.alpha, choose_scale(d, c.alpha, kParams, kInit));
    if (out) *out = s;
    return measure(kParams, kInit, s, lambda);
}

// Sweeps shared by criteria 5, 6 and 8.
SweepTable chacs_table, rancs_table;

double summary_median(const SweepTable& t, Distribution dist, std::size_t k)
{
    for (const auto& row : t.summary)
        if (row.key.distribution == dist && row.key.k == k) return row.median_err;
    throw std::runtime_error("missing summary row");
}

} // namespace

int main()
{
    criterion(1, "impulsive synchronization", 1.0, [] {
        const Trajectory master = run_master(kParams, kInit, 2000);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 0.0;
        for (std::size_t lambda = 1; lambda <= 4; ++lambda)
            for (int i = 0; i < 10; ++i) {
                const PlanarState init{u(rng), 0.3 * u(rng)};
                const SyncRun run = run_impulsive_slave_free(master, lambda, kParams, init);
                for (std::size_t n = 500; n < run.error.size(); ++n) worst = std::max(worst, run.error[n]);
            }
        return Verdict{worst < 1e-8, "max |x error| for n >= 500: " + fmt(worst)};
    });

    criterion(2, "sensitivity Jacobian", 5.0, [] {
        const Dictionary d(32);
        const MeasurementRecord rec = measured(d, sample_sparse_coefficients(32, 5, Distribution::Gaussian, 2), 2);
        double worst = 0.0;
        for (std::uint64_t p = 0; p < 5; ++p) {
            const auto alpha = random_start(32, derive_seed(p, 9));
            const SlaveRun run = run_excited_slave(rec, alpha, d, {.jacobian = true});
            worst = std::max(worst, compare_jacobians(*run.jacobian, finite_difference_jacobian(rec, d, alpha, 1e-6))
                                        .worst_ratio);
        }
        return Verdict{worst <= 1.0, "worst err / (1e-5 |fd| + 1e-8): " + fmt(worst)};
    });

    criterion(3, "zero residual at truth", 5.0, [] {
        const Dictionary d(128);
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 10; ++i) {
            const auto c = sample_sparse_coefficients(128, 1 + 3 * i, i % 2 ? Distribution::Bernoulli
                                                                              : Distribution::Gaussian,
                                                      derive_seed(i, 1));
            const MeasurementRecord rec = measured(d, c, 2);
            const SlaveRun run = run_excited_slave(rec, c.alpha, d);
            for (std::size_t m = 0; m < rec.m; ++m) worst = std::max(worst, std::abs(rec.z[m] - run.zbar[m]));
        }
        return Verdict{worst < 1e-10, "max |z - zbar|: " + fmt(worst)};
    });

    criterion(4, "single-instance recovery", 600.0, [] {
        const Dictionary d(128);
        const auto c = sample_sparse_coefficients(128, 15, Distribution::Gaussian, derive_seed(2024, 1));
        Signal s;
        const MeasurementRecord rec = measured(d, c, 2, &s);
        double best = INFINITY;
        int below = 0;
        for (std::uint64_t r = 0; r < 10; ++r) {
            double err = INFINITY;
            try {
                const auto res = irnls_reconstruct(rec, d, IRNLSConfig{}, derive_seed(r, 2));
                err = relative_error(s.samples, synthesize_signal(d, res.alpha_hat, s.scale).samples);
            } catch (const NumericalError&) {
            }
            best = std::min(best, err);
            if (err < 1e-3) ++below;
        }
        return Verdict{below >= 1 && best < 1e-4,
                       "best Err " + fmt(best) + ", restarts below 1e-3: " + std::to_string(below) + "/10"};
    });

    criterion(5, "sparsity trend", 45 * 60.0, [] {
        SweepGrid grid;
        grid.distributions = {Distribution::Gaussian, Distribution::Bernoulli};
        SweepOptions opts;
        opts.threads = std::max(1u, std::thread::hardware_concurrency());
        chacs_table = run_sweep(grid, TrialSettings{}, opts);
        const double m5 = summary_median(chacs_table, Distribution::Gaussian, 5);
        const double m15 = summary_median(chacs_table, Distribution::Gaussian, 15);
        const double m25 = summary_median(chacs_table, Distribution::Gaussian, 25);
        return Verdict{m5 < m15 && m15 < m25,
                       "median Err K=5/15/25: " + fmt(m5) + " / " + fmt(m15) + " / " + fmt(m25)};
    });

    criterion(6, "Gaussian vs Bernoulli", 1.0, [] {
        const double g = summary_median(chacs_table, Distribution::Gaussian, 15);
        const double b = summary_median(chacs_table, Distribution::Bernoulli, 15);
        return Verdict{g <= b, "K=15 median Err gaussian " + fmt(g) + ", bernoulli " + fmt(b)};
    });

    criterion(7, "RanCS exact recovery", 120.0, [] {
        SweepGrid grid;
        grid.method = Method::RanCS;
        grid.ks = {5, 15};
        grid.filter_lengths = {64};
        SweepOptions opts;
        opts.threads = std::max(1u, std::thread::hardware_concurrency());
        rancs_table = run_sweep(grid, TrialSettings{}, opts);
        const double m = summary_median(rancs_table, Distribution::Gaussian, 5);
        return Verdict{m < 1e-6, "K=5 L=64 median Err " + fmt(m)};
    });

    criterion(8, "ChaCS vs RanCS (soft)", 1.0, [] {
        const double c = summary_median(chacs_table, Distribution::Gaussian, 15);
        const double r = summary_median(rancs_table, Distribution::Gaussian, 15);
        return Verdict{c <= r, "K=15 median Err chacs " + fmt(c) + ", rancs(L=64) " + fmt(r)};
    });

    criterion(9, "dictionary properties", 1.0, [] {
        double gram_dev = 0.0, round_trip = 0.0;
        for (std::size_t n : {4u, 64u, 128u}) {
            const Dictionary d(n);
            const Eigen::MatrixXd g = d.atoms().transpose() * d.atoms();
            gram_dev = std::max(gram_dev, (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
            for (std::uint64_t s = 0; s < 5; ++s) {
                const auto alpha = random_start(n, s);
                const auto back = analyze_signal(d, synthesize_signal(d, alpha).samples);
                for (std::size_t k = 0; k < n; ++k) round_trip = std::max(round_trip, std::abs(back[k] - alpha[k]));
            }
        }
        return Verdict{gram_dev < 1e-10 && round_trip < 1e-10,
                       "Gram deviation " + fmt(gram_dev) + ", round trip " + fmt(round_trip)};
    });

    criterion(10, "chaos diagnostics", 30.0, [] {
        const ChaosReport free = check_chaotic(kParams, kInit);
        const Dictionary d(128);
        int bounded = 0, first_try = 0;
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto c = sample_sparse_coefficients(128, 15, Distribution::Gaussian, derive_seed(s, 1));
            const Signal raw = synthesize_signal(d, c.alpha);
            double peak = 0.0;
            for (double v : raw.samples) peak = std::max(peak, std::abs(v));
            const double scale = choose_scale(d, c.alpha, kParams, kInit, 0.1);
            if (scale == 0.1 / peak) ++first_try;
            const Signal sig = synthesize_signal(d, c.alpha, scale);
            if (check_chaotic(kParams, kInit, std::span<const double>(sig.samples)).bounded) ++bounded;
        }
        const bool ok = free.bounded && std::abs(free.lyapunov_estimate - 0.42) <= 0.05 && bounded == 50;
        return Verdict{ok, "lyapunov " + fmt(free.lyapunov_estimate) + ", scaled runs bounded " +
                               std::to_string(bounded) + "/50 (accepted at full 0.1 amplitude: " +
                               std::to_string(first_try) + "/50)"};
    });

    criterion(11, "sweep determinism", 60.0, [] {
        const auto csv = [](Method m, unsigned threads) {
            SweepGrid grid;
            grid.method = m;
            grid.ks = {3, 8};
            if (m == Method::RanCS) grid.filter_lengths = {16};
            TrialSettings settings;
            settings.n = 64;
            SweepOptions opts;
            opts.realizations = 4;
            opts.master_seed = 17;
            opts.threads = threads;
            const SweepTable t = run_sweep(grid, settings, opts);
            std::ostringstream os;
            write_trials_csv(os, t.trials);
            write_summary_csv(os, t.summary);
            return os.str();
        };
        const bool ok = csv(Method::ChaCS, 1) == csv(Method::ChaCS, 1) && csv(Method::ChaCS, 1) == csv(Method::ChaCS, 2) &&
                        csv(Method::RanCS, 1) == csv(Method::RanCS, 2);
        return Verdict{ok, ok ? "trial and summary CSV byte-identical" : "CSV output differs between runs"};
    });

    std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
