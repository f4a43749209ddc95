#pragma once

#include <array>

#include <Eigen/Dense>

#include "mbx4/core.hpp"

namespace mbx4 {

/// Pulse areas at one depth. theta_1, theta_2 and theta_total are the
/// quadrature sums sqrt(a^2 + c^2), sqrt(b^2 + d^2), sqrt(theta_1^2 + theta_2^2).
struct AreaRecord {
  double z = 0.0;
  std::array<double, 4> theta{};  // coherent areas |integral of Omega dT|, channels a..d
  double theta_1 = 0.0;
  double theta_2 = 0.0;
  double theta_total = 0.0;

  double operator[](Channel ch) const { return theta[index(ch)]; }
};

/// Fills theta_1, theta_2, theta_total from the four channel areas.
AreaRecord total_areas(AreaRecord record);

/// Complex trapezoid integral of an envelope over the grid.
Complex integrate_envelope(const Eigen::Ref<const Eigen::VectorXcd>& envelope, double dt);

/// |integral of Omega dT| by the trapezoid rule.
double pulse_area(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid);

/// Integral of |Omega| dT by the trapezoid rule.
double magnitude_area(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid);

/// Coherent areas of all four channels of a snapshot, totals filled in.
AreaRecord snapshot_areas(const FieldSnapshot& snapshot, const RetardedGrid& grid);

}  // namespace mbx4
