#include "chacs/dictionary.hpp"
#include "chacs/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace chacs;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_SUITE("dictionary")
{
    TEST_CASE("N = 4 Gram matrix is the identity")
    {
        const Dictionary d(4);
        const Eigen::MatrixXd gram = d.atoms().transpose() * d.atoms();
        CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("orthonormal for a range of even lengths")
    {
        for (std::size_t n : {4u, 6u, 8u, 16u, 30u, 64u, 128u, 256u}) {
            const Dictionary d(n);
            const Eigen::MatrixXd gram = d.atoms().transpose() * d.atoms();
            CHECK((gram - Eigen::MatrixXd::Identity(d.atoms().cols(), d.atoms().cols())).cwiseAbs().maxCoeff() <
                  1e-10);
        }
    }

    TEST_CASE("constant atom is 1/sqrt(N)")
    {
        const Dictionary d(128);
        for (Eigen::Index t = 0; t < 128; ++t) CHECK(d.atoms()(t, 0) == doctest::Approx(0.08838834764831845));
    }

    TEST_CASE("atom layout: cos/sin pairs and alternating Nyquist column")
    {
        const Dictionary d(8);
        const double mid = std::sqrt(2.0 / 8.0);
        for (Eigen::Index t = 0; t < 8; ++t) {
            CHECK(d.atoms()(t, 1) == doctest::Approx(mid * std::cos(2 * M_PI * t / 8.0)));
            CHECK(d.atoms()(t, 2) == doctest::Approx(mid * std::sin(2 * M_PI * t / 8.0)));
            CHECK(d.atoms()(t, 7) == doctest::Approx((t % 2 == 0 ? 1.0 : -1.0) / std::sqrt(8.0)));
        }
    }

    TEST_CASE("frequencies cover [0, 0.5]")
    {
        const Dictionary d(128);
        double lo = 1.0, hi = 0.0;
        for (std::size_t k = 0; k < 128; ++k) {
            const double f = d.frequency(k);
            CHECK(f >= 0.0);
            CHECK(f <= 0.5);
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        CHECK(lo == 0.0);
        CHECK(hi == 0.5);
    }

    TEST_CASE("odd or tiny lengths are rejected")
    {
        CHECK_THROWS_AS(Dictionary(7), InvalidArgument);
        CHECK_THROWS_AS(Dictionary(2), InvalidArgument);
        CHECK_THROWS_AS(build_real_fourier_dictionary(0), InvalidArgument);
    }
}

TEST_SUITE("sample_sparse_coefficients")
{
    TEST_CASE("K = 0 gives the zero vector")
    {
        const auto c = sample_sparse_coefficients(32, 0, Distribution::Gaussian, 1);
        CHECK(c.support.empty());
        CHECK(std::all_of(c.alpha.begin(), c.alpha.end(), [](double v) { return v == 0.0; }));
    }

    TEST_CASE("Bernoulli nonzeros are +/-1")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto c = sample_sparse_coefficients(64, 17, Distribution::Bernoulli, seed);
            for (std::size_t k : c.support) CHECK(std::abs(c.alpha[k]) == 1.0);
        }
    }

    TEST_CASE("support has exactly K distinct in-range indices and alpha vanishes off it")
    {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const std::size_t k = seed % 40;
            const auto c = sample_sparse_coefficients(64, k, seed % 2 ? Distribution::Bernoulli : Distribution::Gaussian,
                                                      seed);
            REQUIRE(c.sparsity() == k);
            const std::set<std::size_t> uniq(c.support.begin(), c.support.end());
            CHECK(uniq.size() == k);
            CHECK(std::is_sorted(c.support.begin(), c.support.end()));
            for (std::size_t i = 0; i < 64; ++i)
                if (!uniq.count(i)) CHECK(c.alpha[i] == 0.0);
        }
    }

    TEST_CASE("same seed reproduces, different seeds differ")
    {
        const auto a = sample_sparse_coefficients(128, 15, Distribution::Gaussian, 99);
        const auto b = sample_sparse_coefficients(128, 15, Distribution::Gaussian, 99);
        const auto c = sample_sparse_coefficients(128, 15, Distribution::Gaussian, 100);
        CHECK(a.alpha == b.alpha);
        CHECK(a.support == b.support);
        CHECK(a.alpha != c.alpha);
    }

    TEST_CASE("K > N is rejected")
    {
        CHECK_THROWS_AS(sample_sparse_coefficients(8, 9, Distribution::Gaussian, 0), InvalidArgument);
    }

    TEST_CASE("support positions are roughly uniform")
    {
        std::vector<int> hits(16, 0);
        for (std::uint64_t seed = 0; seed < 4000; ++seed)
            for (std::size_t k : sample_sparse_coefficients(16, 2, Distribution::Gaussian, seed).support) ++hits[k];
        // 8000 draws over 16 slots: 500 expected, sd about 21.
        for (int h : hits) CHECK(std::abs(h - 500) < 110);
    }
}

TEST_SUITE("synthesize / analyze")
{
    TEST_CASE("unit coefficient on the constant atom")
    {
        const Dictionary d(16);
        std::vector<double> alpha(16, 0.0);
        alpha[0] = 1.0;
        const Signal s = synthesize_signal(d, alpha, 1.0);
        for (double v : s.samples) CHECK(v == doctest::Approx(0.25));
    }

    TEST_CASE("zero coefficients give a zero signal and back")
    {
        const Dictionary d(16);
        const Signal s = synthesize_signal(d, std::vector<double>(16, 0.0), 3.0);
        CHECK(std::all_of(s.samples.begin(), s.samples.end(), [](double v) { return v == 0.0; }));
        const auto a = analyze_signal(d, s.samples);
        CHECK(std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; }));
    }

    TEST_CASE("analysing a single atom isolates it")
    {
        const Dictionary d(32);
        for (Eigen::Index k = 0; k < 32; ++k) {
            std::vector<double> atom(32);
            for (Eigen::Index t = 0; t < 32; ++t) atom[static_cast<std::size_t>(t)] = d.atoms()(t, k);
            const auto a = analyze_signal(d, atom);
            for (Eigen::Index j = 0; j < 32; ++j) {
                if (j == k) CHECK(a[static_cast<std::size_t>(j)] == doctest::Approx(1.0).epsilon(1e-12));
                else CHECK(std::abs(a[static_cast<std::size_t>(j)]) <= 1e-12);
            }
        }
    }

    TEST_CASE("analyze inverts synthesize on random coefficients")
    {
        for (std::size_t n : {4u, 64u, 128u})
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const Dictionary d(n);
                const auto alpha = oracle::uniform_vector(n, seed, -3.0, 3.0);
                const auto back = analyze_signal(d, synthesize_signal(d, alpha, 1.0).samples);
                CHECK(max_abs_diff(alpha, back) < 1e-10);
            }
    }

    TEST_CASE("scale multiplies the samples")
    {
        const Dictionary d(32);
        const auto alpha = oracle::uniform_vector(32, 5);
        const Signal s1 = synthesize_signal(d, alpha, 1.0);
        const Signal s3 = synthesize_signal(d, alpha, 0.3);
        CHECK(s3.scale == 0.3);
        for (std::size_t i = 0; i < 32; ++i) CHECK(s3.samples[i] == doctest::Approx(0.3 * s1.samples[i]));
    }

    TEST_CASE("length mismatches are rejected")
    {
        const Dictionary d(16);
        CHECK_THROWS_AS(synthesize_signal(d, std::vector<double>(8, 0.0)), DimensionMismatch);
        CHECK_THROWS_AS(analyze_signal(d, std::vector<double>(17, 0.0)), DimensionMismatch);
    }
}

TEST_SUITE("choose_scale")
{
    TEST_CASE("peak 2 with target 0.1 gives 0.05 when the first candidate is accepted")
    {
        const Dictionary d(16);
        std::vector<double> alpha(16, 0.0);
        alpha[0] = 2.0 * std::sqrt(16.0); // constant raw signal of height 2
        const double c = choose_scale(d, alpha, {1.4, 0.3}, {0.25, 0.25}, 0.1);
        // Either the first candidate or one of its halvings.
        const double ratio = 0.05 / c;
        CHECK(std::abs(ratio - std::exp2(std::round(std::log2(ratio)))) < 1e-12);
        CHECK(c <= 0.05);
    }

    TEST_CASE("first candidate is target / peak when the map tolerates it")
    {
        const Dictionary d(16);
        std::vector<double> alpha(16, 0.0);
        alpha[0] = 2.0 * std::sqrt(16.0);
        // A tiny target is always accepted on the first try.
        CHECK(choose_scale(d, alpha, {1.4, 0.3}, {0.25, 0.25}, 2e-3) == doctest::Approx(1e-3).epsilon(1e-14));
    }

    TEST_CASE("scaled output always passes the chaos check")
    {
        const Dictionary d(128);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto c = sample_sparse_coefficients(128, 15, Distribution::Gaussian, seed);
            const double scale = choose_scale(d, c.alpha, {1.4, 0.3}, {0.25, 0.25});
            const Signal s = synthesize_signal(d, c.alpha, scale);
            CHECK(check_chaotic({1.4, 0.3}, {0.25, 0.25}, std::span<const double>(s.samples)).bounded);
        }
    }

    TEST_CASE("zero coefficients take the target as scale")
    {
        const Dictionary d(32);
        CHECK(choose_scale(d, std::vector<double>(32, 0.0), {1.4, 0.3}, {0.25, 0.25}) == 0.1);
        CHECK(choose_scale(d, std::vector<double>(32, 0.0), {1.4, 0.3}, {0.25, 0.25}, 0.03) == 0.03);
    }

    TEST_CASE("a map that escapes at any amplitude fails after the halving budget")
    {
        const Dictionary d(16);
        std::vector<double> alpha(16, 0.0);
        alpha[3] = 1.0;
        // Starting far outside the basin escapes regardless of the drive.
        CHECK_THROWS_AS(choose_scale(d, alpha, {1.4, 0.3}, {5.0, 5.0}), ScalingFailure);
        CHECK_THROWS_AS(choose_scale(d, alpha, {1.4, 0.3}, {0.0, 0.0}, -1.0), InvalidArgument);
    }
}
