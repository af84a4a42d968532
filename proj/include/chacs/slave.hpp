#pragma once

#include "chacs/dictionary.hpp"
#include "chacs/henon.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace chacs {

/// Everything the receiver holds: map parameters, the shared initial state,
/// the protocol scale and the downsampled master output.
struct MeasurementRecord {
    HenonParams params;
    std::size_t lambda = 1;
    std::size_t n = 0;
    std::size_t m = 0;
    PlanarState initial;
    double scale = 1.0;
    std::vector<double> z;

    /// Throws InvalidArgument when m != floor(n/lambda), lambda == 0, or z is
    /// not finite / not of length m.
    void validate() const;
};

/// Excite the master with `signal` and keep every lambda-th x.
MeasurementRecord measure(const HenonParams& params, const PlanarState& init, const Signal& signal,
                          std::size_t lambda);

struct SlaveRun {
    std::vector<double> zbar;
    /// d zbar_m / d alphabar_k, M x N.
    std::optional<Eigen::MatrixXd> jacobian;
    std::optional<Trajectory> trajectory;
};

struct SlaveOptions {
    bool jacobian = false;
    bool trajectory = false;
};

/// Receiver-side replica driven by sbar = scale * atoms * alpha_bar.
///
/// Starts at record.initial. At n = lambda*m the free-running xbar_n is stored
/// as zbar_m and then overwritten with z_m. Sensitivities u = dxbar/dalpha,
/// v = dybar/dalpha follow the tangent recursion
///   u' = -2 a xbar u + v,   v' = b u + scale * phi_n
/// and u is zeroed after being copied into the Jacobian row at each injection.
SlaveRun run_excited_slave(const MeasurementRecord& record, std::span<const double> alpha_bar,
                           const Dictionary& dict, SlaveOptions options = {});

} // namespace chacs
