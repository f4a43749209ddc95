#pragma once

// Closed-form four-pulse soliton family generated from the diagonal seed
// state: the fundamental Rabi frequency, the mixing angle phi(Z), the four
// channel envelopes, their areas and the two group velocities.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "mbx4/areas.hpp"
#include "mbx4/core.hpp"
#include "mbx4/errors.hpp"

namespace mbx4 {

template <typename Scalar = double>
struct SolitonParams {
  Scalar tau = 1;
  Scalar u = std::numbers::pi_v<Scalar> / 4;  // canonical range [0, pi/2]
  Scalar alpha_sq = Scalar(0.75);
  Scalar beta_sq = Scalar(0.25);
  Scalar kappa = Scalar(0.5);

  void validate() const {
    using std::abs;
    if (!(tau > 0)) throw DomainError("soliton tau must be positive");
    if (!(kappa > 0)) throw DomainError("soliton kappa must be positive");
    if (!(u >= 0) || u > std::numbers::pi_v<Scalar> / 2 + Scalar(1e-15)) {
      throw DomainError("soliton u must lie in [0, pi/2]");
    }
    if (alpha_sq < 0 || alpha_sq > 1 || beta_sq < 0 || beta_sq > 1 ||
        abs(alpha_sq + beta_sq - 1) > Scalar(1e-12)) {
      throw DomainError("soliton alpha_sq and beta_sq must lie in [0,1] and sum to 1");
    }
  }
};

/// log(1 + e^y) without overflow.
template <typename Scalar>
Scalar softplus(Scalar y) {
  using std::exp;
  using std::log1p;
  return y > 0 ? y + log1p(exp(-y)) : log1p(exp(y));
}

/// (sin phi, cos phi) with tan phi = exp((beta^2 - alpha^2) kappa z), accurate
/// to full relative precision even when either factor is exponentially small.
template <typename Scalar>
std::pair<Scalar, Scalar> mixing_sin_cos(Scalar z, const SolitonParams<Scalar>& p) {
  using std::exp;
  const Scalar y = (p.beta_sq - p.alpha_sq) * p.kappa * z;
  return {exp(Scalar(-0.5) * softplus(Scalar(-2) * y)), exp(Scalar(-0.5) * softplus(Scalar(2) * y))};
}

/// Mixing angle phi(z) in (0, pi/2); saturates instead of overflowing.
template <typename Scalar>
Scalar phi(Scalar z, const SolitonParams<Scalar>& p) {
  using std::atan;
  using std::exp;
  const Scalar y = (p.beta_sq - p.alpha_sq) * p.kappa * z;
  return y > 0 ? std::numbers::pi_v<Scalar> / 2 - atan(exp(-y)) : atan(exp(y));
}

namespace detail {

// kappa_numerator enters only the sqrt(1 + exp[2(a^2-b^2) kappa Z]) factor; it
// equals p.kappa except under deliberate fault injection.
template <typename Scalar>
Scalar fundamental_rabi_split(Scalar z, Scalar t, const SolitonParams<Scalar>& p, Scalar kappa_numerator) {
  using std::exp;
  using std::log;
  const Scalar x = p.kappa * z;
  const Scalar s = t / p.tau;
  const Scalar log_num = log(Scalar(4) / p.tau) +
                         Scalar(0.5) * softplus(Scalar(2) * (p.alpha_sq - p.beta_sq) * kappa_numerator * z);
  const Scalar e1 = p.alpha_sq * x - s;
  const Scalar e2 = -e1;
  const Scalar e3 = (p.alpha_sq - 2 * p.beta_sq) * x + s;
  const Scalar top = std::max({e1, e2, e3});
  const Scalar log_den = top + log(exp(e1 - top) + exp(e2 - top) + exp(e3 - top));
  return exp(log_num - log_den);
}

}  // namespace detail

/// Fundamental Rabi frequency
///   (4/tau) sqrt(1 + e^{2(a^2-b^2) k Z}) / (2 cosh[a^2 k Z - T/tau] + e^{(a^2 - 2 b^2) k Z + T/tau}),
/// evaluated in log-sum-exp form so |kZ|, |T/tau| in the hundreds stay finite.
template <typename Scalar>
Scalar fundamental_rabi(Scalar z, Scalar t, const SolitonParams<Scalar>& p) {
  return detail::fundamental_rabi_split(z, t, p, p.kappa);
}

/// The four envelopes (a, b, c, d) = (sin u sin phi, cos u sin phi, sin u cos phi, cos u cos phi) * Omega.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> channel_weights(Scalar z, const SolitonParams<Scalar>& p) {
  using std::cos;
  using std::sin;
  const auto [sp, cp] = mixing_sin_cos(z, p);
  const Scalar su = sin(p.u);
  const Scalar cu = cos(p.u);
  return {su * sp, cu * sp, su * cp, cu * cp};
}

namespace detail {
FieldSnapshot analytic_fields_split(double z, const RetardedGrid& grid, const SolitonParams<double>& p,
                                    double kappa_numerator);
}  // namespace detail

/// Analytic snapshot at depth z (the snapshot's z is set to z).
FieldSnapshot analytic_fields(double z, const RetardedGrid& grid, const SolitonParams<double>& p);

/// Closed-form areas 2 pi {sin u sin phi, cos u sin phi, sin u cos phi, cos u cos phi} with totals.
AreaRecord analytic_areas(double z, const SolitonParams<double>& p);

struct GroupVelocities {
  double v_in = 1.0;      // fraction of c, shared by channels a and b
  double v_out = 1.0;     // fraction of c, shared by channels c and d
  double drift_in = 0.0;  // retarded-frame peak drift dT/dZ = alpha^2 kappa tau
  double drift_out = 0.0;
};

GroupVelocities group_velocities(const SolitonParams<double>& p);

/// kappa = (mu / 2 tau) <1 / (Delta^2 + 1/tau^2)> over the Gaussian line,
/// by Gauss-Hermite quadrature (the same rule the solver's ensemble uses).
/// Sharp line (no T2*) gives mu tau / 2.
double kappa_average(double mu, double tau, std::optional<double> t2_star, int n_nodes);

}  // namespace mbx4
