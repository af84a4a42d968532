#include "chacs/henon.hpp"

#include "chacs/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace chacs {

std::vector<double> Trajectory::xs() const
{
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.x);
    return out;
}

std::vector<double> Trajectory::ys() const
{
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.y);
    return out;
}

PlanarState henon_step(const PlanarState& state, const HenonParams& params, double excitation)
{
    const PlanarState next{1.0 - params.a * state.x * state.x + state.y,
                           params.b * state.x + excitation};
    if (!std::isfinite(next.x) || !std::isfinite(next.y))
        throw DivergenceError("henon_step produced a non-finite state", -1);
    return next;
}

namespace {

void check_bound(const PlanarState& s, std::size_t n, const char* what)
{
    if (!(std::abs(s.x) <= kDivergenceBound) || !std::isfinite(s.y))
        throw DivergenceError(std::string(what) + ": |x| exceeded divergence bound", static_cast<long>(n));
}

} // namespace

Trajectory run_master(const HenonParams& params, const PlanarState& init, std::size_t steps)
{
    Trajectory traj;
    traj.states.reserve(steps + 1);
    traj.states.push_back(init);
    PlanarState s = init;
    for (std::size_t n = 0; n < steps; ++n) {
        s = henon_step(s, params);
        check_bound(s, n + 1, "run_master");
        traj.states.push_back(s);
    }
    return traj;
}

Trajectory run_excited_master(const HenonParams& params, const PlanarState& init,
                              std::span<const double> excitation)
{
    if (excitation.empty())
        throw InvalidArgument("run_excited_master: signal must have at least one sample");
    Trajectory traj;
    traj.states.reserve(excitation.size() + 1);
    traj.states.push_back(init);
    PlanarState s = init;
    for (std::size_t n = 0; n < excitation.size(); ++n) {
        s = henon_step(s, params, excitation[n]);
        check_bound(s, n + 1, "run_excited_master");
        traj.states.push_back(s);
    }
    return traj;
}

std::vector<double> downsample(const Trajectory& traj, std::size_t lambda, std::size_t n)
{
    if (lambda == 0) throw InvalidArgument("downsample: lambda must be >= 1");
    if (lambda > n)
        throw EmptyMeasurement("downsample: lambda " + std::to_string(lambda) +
                               " exceeds signal length " + std::to_string(n));
    if (traj.size() < n + 1)
        throw DimensionMismatch("downsample: trajectory shorter than N + 1 states");
    const std::size_t m_count = measurement_count(n, lambda);
    std::vector<double> z;
    z.reserve(m_count);
    for (std::size_t m = 1; m <= m_count; ++m) z.push_back(traj[lambda * m].x);
    return z;
}

SyncRun run_impulsive_slave_free(const Trajectory& master, std::size_t lambda,
                                 const HenonParams& params, const PlanarState& slave_init)
{
    if (lambda == 0) throw InvalidArgument("run_impulsive_slave_free: lambda must be >= 1");
    SyncRun run;
    if (master.size() == 0) return run;
    run.slave.states.reserve(master.size());
    run.error.reserve(master.size());

    PlanarState s = slave_init;
    for (std::size_t n = 0;; ++n) {
        run.error.push_back(std::abs(master[n].x - s.x));
        if (n > 0 && n % lambda == 0) s.x = master[n].x;
        run.slave.states.push_back(s);
        if (n + 1 == master.size()) break;
        s = henon_step(s, params);
        check_bound(s, n + 1, "run_impulsive_slave_free");
    }
    return run;
}

ChaosReport check_chaotic(const HenonParams& params, const PlanarState& init,
                          std::optional<std::span<const double>> excitation,
                          const ChaosCheckOptions& options)
{
    const auto drive = [&](std::size_t n) {
        if (!excitation || excitation->empty()) return 0.0;
        return (*excitation)[n % excitation->size()];
    };

    ChaosReport report;
    PlanarState s = init;
    // Tangent vector, renormalised every step.
    double tx = 1.0, ty = 0.0;
    double log_growth = 0.0;
    const std::size_t total = options.transient + options.steps;
    for (std::size_t n = 0; n < total; ++n) {
        const double jx = -2.0 * params.a * s.x * tx + ty;
        const double jy = params.b * tx;
        s = PlanarState{1.0 - params.a * s.x * s.x + s.y, params.b * s.x + drive(n)};
        if (!(std::abs(s.x) <= kDivergenceBound) || !std::isfinite(s.y)) {
            report.bounded = false;
            report.lyapunov_estimate = std::numeric_limits<double>::quiet_NaN();
            return report;
        }
        const double norm = std::hypot(jx, jy);
        if (norm == 0.0) {
            report.bounded = true;
            report.lyapunov_estimate = -std::numeric_limits<double>::infinity();
            return report;
        }
        tx = jx / norm;
        ty = jy / norm;
        if (n >= options.transient) log_growth += std::log(norm);
    }
    report.bounded = true;
    report.lyapunov_estimate = options.steps > 0 ? log_growth / static_cast<double>(options.steps) : 0.0;
    return report;
}

} // namespace chacs
