#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace chacs {

/// Orbits with |x| above this are treated as escaped. The (1.4, 0.3)
/// attractor stays inside |x| < 1.8.
inline constexpr double kDivergenceBound = 10.0;

struct HenonParams {
    double a = 1.4;
    double b = 0.3;
};

struct PlanarState {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PlanarState&, const PlanarState&) = default;
};

/// Orbit states indexed n = 0..n_max; states.front() is the initial condition.
struct Trajectory {
    std::vector<PlanarState> states;

    std::size_t size() const noexcept { return states.size(); }
    const PlanarState& operator[](std::size_t n) const { return states[n]; }
    std::vector<double> xs() const;
    std::vector<double> ys() const;
};

/// One step of the (optionally excited) Henon map:
///   x' = 1 - a x^2 + y,   y' = b x + excitation.
/// Throws DivergenceError (step -1) on a non-finite result.
PlanarState henon_step(const PlanarState& state, const HenonParams& params, double excitation = 0.0);

/// Free-running orbit of `steps` iterations.
Trajectory run_master(const HenonParams& params, const PlanarState& init, std::size_t steps);

/// Orbit driven by `excitation`; step n adds excitation[n] to the y-update.
/// Returns excitation.size() + 1 states.
Trajectory run_excited_master(const HenonParams& params, const PlanarState& init,
                              std::span<const double> excitation);

/// z_m = x_{lambda*m} for m = 1..floor(N/lambda).
std::vector<double> downsample(const Trajectory& traj, std::size_t lambda, std::size_t n);

/// Number of measurements taken from N samples at rate lambda.
constexpr std::size_t measurement_count(std::size_t n, std::size_t lambda) noexcept
{
    return lambda == 0 ? 0 : n / lambda;
}

struct SyncRun {
    Trajectory slave;
    /// |x_n - xbar_n| before any injection at n; same length as the master.
    std::vector<double> error;
};

/// Unexcited slave that receives the master's x at every n = lambda*m (m >= 1).
/// The error at an injection instant is recorded before the overwrite.
SyncRun run_impulsive_slave_free(const Trajectory& master, std::size_t lambda,
                                 const HenonParams& params, const PlanarState& slave_init);

struct ChaosReport {
    bool bounded = false;
    /// Largest Lyapunov exponent; NaN when the orbit escaped.
    double lyapunov_estimate = 0.0;
};

struct ChaosCheckOptions {
    std::size_t transient = 1000;
    std::size_t steps = 100000;
};

/// Runs transient + steps iterations, with the excitation repeated
/// periodically when one is given, and estimates the largest Lyapunov exponent
/// by renormalising a tangent vector every step. Escape beyond
/// kDivergenceBound is reported as bounded = false, never thrown.
ChaosReport check_chaotic(const HenonParams& params, const PlanarState& init,
                          std::optional<std::span<const double>> excitation = std::nullopt,
                          const ChaosCheckOptions& options = {});

} // namespace chacs
