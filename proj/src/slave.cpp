#include "chacs/slave.hpp"

#include "chacs/error.hpp"

#include <cmath>
#include <string>

namespace chacs {

void MeasurementRecord::validate() const
{
    if (lambda == 0) throw InvalidArgument("measurement record: lambda must be >= 1");
    if (m != measurement_count(n, lambda))
        throw InvalidArgument("measurement record: m=" + std::to_string(m) + " but floor(n/lambda)=" +
                              std::to_string(measurement_count(n, lambda)));
    if (m == 0) throw EmptyMeasurement("measurement record: no measurements");
    if (z.size() != m)
        throw DimensionMismatch("measurement record: z has " + std::to_string(z.size()) + " entries, expected " +
                                std::to_string(m));
    for (double v : z)
        if (!std::isfinite(v)) throw InvalidArgument("measurement record: non-finite measurement");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("measurement record: scale must be positive");
    if (!std::isfinite(params.a) || !std::isfinite(params.b) || !std::isfinite(initial.x) ||
        !std::isfinite(initial.y))
        throw InvalidArgument("measurement record: non-finite parameters or initial state");
}

MeasurementRecord measure(const HenonParams& params, const PlanarState& init, const Signal& signal,
                          std::size_t lambda)
{
    const Trajectory traj = run_excited_master(params, init, signal.samples);
    MeasurementRecord record;
    record.params = params;
    record.lambda = lambda;
    record.n = signal.samples.size();
    record.initial = init;
    record.scale = signal.scale;
    record.z = downsample(traj, lambda, record.n);
    record.m = record.z.size();
    return record;
}

SlaveRun run_excited_slave(const MeasurementRecord& record, std::span<const double> alpha_bar,
                           const Dictionary& dict, SlaveOptions options)
{
    const std::size_t n = record.n;
    if (dict.size() != n)
        throw DimensionMismatch("run_excited_slave: dictionary length " + std::to_string(dict.size()) +
                                " != record length " + std::to_string(n));
    if (alpha_bar.size() != n)
        throw DimensionMismatch("run_excited_slave: coefficient length " + std::to_string(alpha_bar.size()) +
                                " != record length " + std::to_string(n));
    if (record.z.size() != record.m || record.m != measurement_count(n, record.lambda))
        throw DimensionMismatch("run_excited_slave: inconsistent measurement record");

    const double a = record.params.a;
    const double b = record.params.b;
    const auto nn = static_cast<Eigen::Index>(n);
    const Eigen::Map<const Eigen::VectorXd> coeffs(alpha_bar.data(), nn);
    const Eigen::VectorXd drive = record.scale * (dict.atoms() * coeffs);

    SlaveRun run;
    run.zbar.reserve(record.m);

    Eigen::VectorXd u, v;
    if (options.jacobian) {
        run.jacobian.emplace(static_cast<Eigen::Index>(record.m), nn);
        u = Eigen::VectorXd::Zero(nn);
        v = Eigen::VectorXd::Zero(nn);
    }
    if (options.trajectory) {
        run.trajectory.emplace();
        run.trajectory->states.reserve(n + 1);
        run.trajectory->states.push_back(record.initial);
    }

    PlanarState s = record.initial;
    for (std::size_t t = 0; t < n; ++t) {
        const PlanarState next{1.0 - a * s.x * s.x + s.y, b * s.x + drive(static_cast<Eigen::Index>(t))};
        if (!(std::abs(next.x) <= kDivergenceBound) || !std::isfinite(next.y))
            throw DivergenceError("run_excited_slave: |x| exceeded divergence bound", static_cast<long>(t + 1));
        if (options.jacobian) {
            // u_{t+1} uses v_t, v_{t+1} uses u_t: update v from the old u first.
            Eigen::VectorXd u_next = (-2.0 * a * s.x) * u + v;
            v = b * u + record.scale * dict.atoms().row(static_cast<Eigen::Index>(t)).transpose();
            u = std::move(u_next);
        }
        s = next;

        const std::size_t step = t + 1;
        if (step % record.lambda == 0 && step / record.lambda <= record.m) {
            const std::size_t m = step / record.lambda - 1;
            run.zbar.push_back(s.x);
            s.x = record.z[m];
            if (options.jacobian) {
                run.jacobian->row(static_cast<Eigen::Index>(m)) = u.transpose();
                u.setZero();
            }
        }
        if (options.trajectory) run.trajectory->states.push_back(s);
    }
    return run;
}

} // namespace chacs
