#include "chacs/irnls.hpp"

#include "chacs/error.hpp"

#include <cmath>
#include <random>

namespace chacs {

void IRNLSConfig::validate() const
{
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidArgument("mu must be finite and >= 0");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be > 0");
    if (!(outer_tol > 0.0)) throw InvalidArgument("outer tolerance must be > 0");
    if (max_outer < 1) throw InvalidArgument("max_outer must be >= 1");
    if (inner.max_inner < 1) throw InvalidArgument("max_inner must be >= 1");
    if (!(inner.gradient_tol > 0.0)) throw InvalidArgument("gradient tolerance must be > 0");
    if (!(inner.initial_damping > 0.0)) throw InvalidArgument("initial damping must be > 0");
}

Weights compute_weights(std::span<const double> alpha_bar, double eps)
{
    if (!(eps > 0.0)) throw InvalidArgument("compute_weights: eps must be > 0");
    Weights out;
    out.w.reserve(alpha_bar.size());
    for (double a : alpha_bar) out.w.push_back(1.0 / std::sqrt(a * a + eps));
    return out;
}

RegularizedResiduals build_regularized_residuals(const MeasurementRecord& record, const Dictionary& dict,
                                                 std::span<const double> alpha_bar, const Weights& weights,
                                                 double mu, bool with_jacobian)
{
    const std::size_t n = alpha_bar.size();
    if (weights.w.size() != n)
        throw DimensionMismatch("build_regularized_residuals: weight length does not match coefficients");

    const SlaveRun run = run_excited_slave(record, alpha_bar, dict, {.jacobian = with_jacobian});
    const auto m = static_cast<Eigen::Index>(record.m);
    const auto nn = static_cast<Eigen::Index>(n);

    RegularizedResiduals out;
    out.residual.resize(m + nn);
    for (Eigen::Index i = 0; i < m; ++i)
        out.residual(i) = record.z[static_cast<std::size_t>(i)] - run.zbar[static_cast<std::size_t>(i)];
    Eigen::VectorXd root(nn);
    for (Eigen::Index k = 0; k < nn; ++k) {
        root(k) = std::sqrt(mu * weights.w[static_cast<std::size_t>(k)]);
        out.residual(m + k) = root(k) * alpha_bar[static_cast<std::size_t>(k)];
    }
    if (with_jacobian) {
        out.jacobian.setZero(m + nn, nn);
        out.jacobian.topRows(m) = -*run.jacobian;
        out.jacobian.bottomRows(nn).diagonal() = root;
    }
    return out;
}

double l1_objective(const MeasurementRecord& record, const Dictionary& dict, std::span<const double> alpha_bar,
                    double mu)
{
    const SlaveRun run = run_excited_slave(record, alpha_bar, dict);
    double misfit = 0.0;
    for (std::size_t i = 0; i < record.m; ++i) {
        const double d = record.z[i] - run.zbar[i];
        misfit += d * d;
    }
    double l1 = 0.0;
    for (double a : alpha_bar) l1 += std::abs(a);
    return misfit + mu * l1;
}

InnerSolve inner_weighted_nls(const MeasurementRecord& record, const Dictionary& dict, const Weights& weights,
                              double mu, std::span<const double> alpha_start, const InnerConfig& inner)
{
    for (double a : alpha_start)
        if (!std::isfinite(a)) throw InvalidArgument("inner_weighted_nls: non-finite start");

    const ResidualModel model = [&](std::span<const double> x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
        RegularizedResiduals rr = build_regularized_residuals(record, dict, x, weights, mu, jac != nullptr);
        r = std::move(rr.residual);
        if (jac) *jac = std::move(rr.jacobian);
    };
    LeastSquaresReport lm = levenberg_marquardt(model, alpha_start, inner);
    return InnerSolve{std::move(lm.x), std::move(lm.objective_history), lm.iterations, lm.gradient_converged};
}

std::vector<double> random_start(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> out(n);
    for (double& v : out) v = uniform(rng);
    return out;
}

ReconstructionResult irnls_reconstruct(const MeasurementRecord& record, const Dictionary& dict,
                                       const IRNLSConfig& config, std::uint64_t seed)
{
    const std::vector<double> start = random_start(record.n, seed);
    return irnls_reconstruct_from(record, dict, config, start);
}

ReconstructionResult irnls_reconstruct_from(const MeasurementRecord& record, const Dictionary& dict,
                                            const IRNLSConfig& config, std::span<const double> alpha_start)
{
    config.validate();
    record.validate();
    if (alpha_start.size() != record.n)
        throw DimensionMismatch("irnls_reconstruct: start length does not match record length");

    ReconstructionResult result;
    std::vector<double> current(alpha_start.begin(), alpha_start.end());
    for (int j = 0; j < config.max_outer; ++j) {
        const Weights weights = compute_weights(current, config.eps);
        InnerSolve solve;
        try {
            solve = inner_weighted_nls(record, dict, weights, config.mu, current, config.inner);
        } catch (const SolverStall& stall) {
            throw SolverStall("irnls_reconstruct: inner solve stalled at outer iteration " + std::to_string(j + 1),
                              stall.last_iterate());
        }

        double diff = 0.0, base = 0.0;
        for (std::size_t k = 0; k < current.size(); ++k) {
            const double d = solve.alpha[k] - current[k];
            diff += d * d;
            base += current[k] * current[k];
        }
        // A zero iterate has no relative scale; fall back to the absolute change.
        const double change = base > 0.0 ? std::sqrt(diff / base) : std::sqrt(diff);

        current = std::move(solve.alpha);
        result.outer_iterations = j + 1;
        result.final_relative_change = change;
        result.objective_history.push_back(l1_objective(record, dict, current, config.mu));
        if (change <= config.outer_tol) {
            result.converged = true;
            break;
        }
    }
    result.alpha_hat = std::move(current);
    return result;
}

} // namespace chacs
