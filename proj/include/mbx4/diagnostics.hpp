#pragma once

#include <array>
#include <optional>
#include <span>

#include "mbx4/areas.hpp"
#include "mbx4/core.hpp"
#include "mbx4/result.hpp"

namespace mbx4 {

struct SechFit {
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
  double rms_residual = 0.0;  // RMS of (fit - data) / peak over samples above 1% of peak
  int iterations = 0;

  /// Area of the fitted profile, pi * amplitude * width.
  double area() const;
};

/// Levenberg-Marquardt fit of A sech((T - T0) / w) to |envelope|.
///
/// Throws DiagnosticError when the envelope is identically zero, has a
/// competing local maximum above 1/5 of the peak, or the fit fails to converge.
SechFit fit_sech(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid);

struct Peak {
  double time = 0.0;
  double amplitude = 0.0;
};

/// Discrete maximum of |envelope| refined by a parabola through its two neighbours.
Peak find_peak(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid);

/// Least-squares slope dT/dZ of a channel's peak time over z in [z_lo, z_hi],
/// using only depths where the channel's peak is at least 1% of the global
/// maximum over all channels and depths. Needs at least 10 such depths.
double drift_rate(const PeakTrack& track, Channel ch, double z_lo, double z_hi);

/// Per-channel drift rates: input channels (a, b) over the first 20% of the
/// track, output channels (c, d) over the last 20%. Channels that cannot be
/// tracked are left empty.
std::array<std::optional<double>, 4> track_peaks(const PropagationResult& result);

/// Builds the peak track of a sequence of snapshots (no propagation needed).
PeakTrack peak_track(std::span<const FieldSnapshot> snapshots, const RetardedGrid& grid);

/// Lab-frame spatial width of a pulse with temporal width w and retarded drift
/// rate dT/dZ: at fixed lab time the profile along x is w / (1 + drift).
double lab_frame_width(double temporal_width, double drift);

/// Relative violation of the flux balance
///   E(z) + 2 mu * integral_0^z <rho33 + rho44>(T_max) dz' = E(0),
/// maximised over z and divided by E(0).
double energy_balance_error(const PropagationResult& result, double mu);

}  // namespace mbx4
