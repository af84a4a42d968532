#include "chacs/rancs.hpp"

#include "chacs/error.hpp"

#include <cmath>
#include <random>

namespace chacs {

RancsFilter generate_random_taps(std::size_t length, std::uint64_t seed)
{
    if (length == 0) throw InvalidArgument("filter length must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    RancsFilter filter;
    filter.taps.resize(length);
    for (double& h : filter.taps) h = normal(rng);
    return filter;
}

std::vector<double> fir_measure(std::span<const double> signal, const RancsFilter& filter, std::size_t lambda)
{
    if (lambda == 0) throw InvalidArgument("fir_measure: lambda must be >= 1");
    if (filter.taps.empty()) throw InvalidArgument("fir_measure: empty filter");
    const std::size_t n = signal.size();
    if (lambda > n)
        throw EmptyMeasurement("fir_measure: lambda " + std::to_string(lambda) + " exceeds signal length " +
                               std::to_string(n));

    const std::size_t m_count = n / lambda;
    std::vector<double> z(m_count, 0.0);
    for (std::size_t m = 0; m < m_count; ++m) {
        const std::size_t t = lambda * (m + 1) - 1;
        double acc = 0.0;
        for (std::size_t l = 0; l < filter.taps.size() && l <= t; ++l) acc += filter.taps[l] * signal[t - l];
        z[m] = acc;
    }
    return z;
}

Eigen::MatrixXd build_measurement_matrix(const RancsFilter& filter, const Dictionary& dict, std::size_t n,
                                         std::size_t lambda)
{
    if (dict.size() != n)
        throw DimensionMismatch("build_measurement_matrix: dictionary length " + std::to_string(dict.size()) +
                                " != N " + std::to_string(n));
    if (lambda == 0) throw InvalidArgument("build_measurement_matrix: lambda must be >= 1");
    if (lambda > n) throw EmptyMeasurement("build_measurement_matrix: lambda exceeds N");

    const auto rows = static_cast<Eigen::Index>(n / lambda);
    const auto cols = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a(rows, cols);
    std::vector<double> atom(n);
    for (Eigen::Index k = 0; k < cols; ++k) {
        for (std::size_t t = 0; t < n; ++t) atom[t] = dict.atoms()(static_cast<Eigen::Index>(t), k);
        const std::vector<double> col = fir_measure(atom, filter, lambda);
        for (Eigen::Index i = 0; i < rows; ++i) a(i, k) = col[static_cast<std::size_t>(i)];
    }
    return a;
}

LinearMeasurement make_linear_measurement(const RancsFilter& filter, const Dictionary& dict, const Signal& signal,
                                          std::size_t lambda)
{
    LinearMeasurement out;
    out.matrix = build_measurement_matrix(filter, dict, signal.samples.size(), lambda);
    // The dictionary maps unit coefficients; fold the signal scale into A.
    out.matrix *= signal.scale;
    out.z = fir_measure(signal.samples, filter, lambda);
    return out;
}

namespace {

struct WeightedSolve {
    Eigen::VectorXd alpha;
    bool ridge = false;
};

// argmin ||z - A x||^2 + mu sum x_k^2 / d_k via x = D A^T (A D A^T + mu I)^{-1} z,
// an M x M system that stays well conditioned when some d_k are tiny.
WeightedSolve solve_weighted(const Eigen::MatrixXd& a, const Eigen::VectorXd& z, const Eigen::VectorXd& d,
                             double mu)
{
    const Eigen::MatrixXd ad = a * d.asDiagonal();
    Eigen::MatrixXd gram = ad * a.transpose();
    gram.diagonal().array() += mu;

    WeightedSolve out;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        gram.diagonal().array() += 1e-12;
        llt.compute(gram);
        out.ridge = true;
        if (llt.info() != Eigen::Success)
            throw NumericalError("irls_linear_reconstruct: weighted normal system is not positive definite");
    }
    out.alpha = ad.transpose() * llt.solve(z);
    return out;
}

double data_misfit(const Eigen::MatrixXd& a, const Eigen::VectorXd& z, const Eigen::VectorXd& x)
{
    return (z - a * x).squaredNorm();
}

} // namespace

LinearIrlsResult irls_linear_reconstruct(const Eigen::MatrixXd& a, std::span<const double> z,
                                         const IRNLSConfig& config)
{
    config.validate();
    if (static_cast<std::size_t>(a.rows()) != z.size())
        throw DimensionMismatch("irls_linear_reconstruct: matrix rows do not match measurement count");
    if (a.rows() == 0) throw EmptyMeasurement("irls_linear_reconstruct: no measurements");

    const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
    const auto n = a.cols();

    const auto record = [&](LinearIrlsResult& res, const Eigen::VectorXd& x) {
        const double misfit = data_misfit(a, zv, x);
        res.objective_history.push_back(misfit + config.mu * x.lpNorm<1>());
        res.majorized_history.push_back(misfit +
                                        2.0 * config.mu * (x.array().square() + config.eps).sqrt().sum());
    };

    LinearIrlsResult result;
    WeightedSolve first = solve_weighted(a, zv, Eigen::VectorXd::Ones(n), config.mu);
    Eigen::VectorXd current = std::move(first.alpha);
    result.ridge_fallback = first.ridge;
    result.outer_iterations = 1;
    record(result, current);

    for (int j = 1; j < config.max_outer; ++j) {
        const Eigen::VectorXd d = (current.array().square() + config.eps).sqrt();
        WeightedSolve next = solve_weighted(a, zv, d, config.mu);
        result.ridge_fallback = result.ridge_fallback || next.ridge;

        const double base = current.norm();
        const double diff = (next.alpha - current).norm();
        const double change = base > 0.0 ? diff / base : diff;
        current = std::move(next.alpha);
        result.outer_iterations = j + 1;
        result.final_relative_change = change;
        record(result, current);
        if (change <= config.outer_tol) {
            result.converged = true;
            break;
        }
    }
    result.alpha_hat.assign(current.data(), current.data() + current.size());
    return result;
}

} // namespace chacs
