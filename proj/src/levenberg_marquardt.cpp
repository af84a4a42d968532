#include "chacs/levenberg_marquardt.hpp"

#include "chacs/error.hpp"

#include <algorithm>
#include <cmath>

namespace chacs {

namespace {

constexpr double kMinDamping = 1e-15;
constexpr double kMaxDamping = 1e16;
// Relative step length below which no further progress is representable.
constexpr double kStepTol = 1e-15;

bool try_evaluate(const ResidualModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac)
{
    try {
        model(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), r, jac);
    } catch (const DivergenceError&) {
        return false;
    }
    if (!r.allFinite()) return false;
    if (jac && !jac->allFinite()) return false;
    return true;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

LeastSquaresReport levenberg_marquardt(const ResidualModel& model, std::span<const double> x0,
                                       const InnerConfig& config)
{
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    if (!try_evaluate(model, x, r, &jac))
        throw SolverStall("levenberg_marquardt: start point cannot be evaluated", to_vector(x));

    LeastSquaresReport report;
    double f = r.squaredNorm();
    report.objective_history.push_back(f);

    double damping = config.initial_damping;
    bool all_rejections_diverged = true;
    int rejections = 0; // since the last accepted step
    Eigen::VectorXd r_trial;

    Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::VectorXd grad = jac.transpose() * r;

    while (report.iterations < config.max_inner) {
        if (grad.lpNorm<Eigen::Infinity>() < config.gradient_tol) {
            report.gradient_converged = true;
            break;
        }
        ++report.iterations;

        Eigen::MatrixXd system = normal;
        system.diagonal().array() += damping;
        const Eigen::VectorXd step = system.ldlt().solve(-grad);
        if (!step.allFinite()) {
            damping *= 10.0;
            ++rejections;
            all_rejections_diverged = false;
            if (damping > kMaxDamping) break;
            continue;
        }
        if (step.norm() <= kStepTol * (x.norm() + kStepTol)) {
            if (rejections > 0 && all_rejections_diverged)
                throw SolverStall("levenberg_marquardt: every trial step diverged", to_vector(x));
            break;
        }

        const Eigen::VectorXd x_trial = x + step;
        bool diverged = !try_evaluate(model, x_trial, r_trial, nullptr);
        const double f_trial = diverged ? 0.0 : r_trial.squaredNorm();
        if (!diverged && f_trial < f) {
            x = x_trial;
            // Re-evaluate with the Jacobian only for accepted points.
            if (!try_evaluate(model, x, r, &jac))
                throw SolverStall("levenberg_marquardt: accepted point failed re-evaluation", to_vector(x));
            f = r.squaredNorm();
            report.objective_history.push_back(f);
            normal.noalias() = jac.transpose() * jac;
            grad.noalias() = jac.transpose() * r;
            damping = std::max(damping * 0.1, kMinDamping);
            all_rejections_diverged = true;
            rejections = 0;
            continue;
        }

        ++rejections;
        if (!diverged) all_rejections_diverged = false;
        damping *= 10.0;
        if (damping > kMaxDamping) {
            if (all_rejections_diverged)
                throw SolverStall("levenberg_marquardt: every trial step diverged", to_vector(x));
            break;
        }
    }
    report.x = to_vector(x);
    return report;
}

} // namespace chacs
