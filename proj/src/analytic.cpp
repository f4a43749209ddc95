#include "mbx4/analytic.hpp"

#include "mbx4/quadrature.hpp"

namespace mbx4 {

FieldSnapshot detail::analytic_fields_split(double z, const RetardedGrid& grid, const SolitonParams<double>& p,
                                            double kappa_numerator) {
  grid.validate();
  p.validate();
  FieldSnapshot snap(z, grid.n_t);
  const Eigen::Vector4d w = channel_weights(z, p);
  for (int i = 0; i < grid.n_t; ++i) {
    const double omega = fundamental_rabi_split(z, grid.time(i), p, kappa_numerator);
    for (int k = 0; k < 4; ++k) snap.omega(i, k) = w(k) * omega;
  }
  return snap;
}

FieldSnapshot analytic_fields(double z, const RetardedGrid& grid, const SolitonParams<double>& p) {
  return detail::analytic_fields_split(z, grid, p, p.kappa);
}

AreaRecord analytic_areas(double z, const SolitonParams<double>& p) {
  p.validate();
  const Eigen::Vector4d w = channel_weights(z, p);
  AreaRecord rec;
  rec.z = z;
  for (int k = 0; k < 4; ++k) rec.theta[k] = 2.0 * std::numbers::pi * w(k);
  return total_areas(rec);
}

GroupVelocities group_velocities(const SolitonParams<double>& p) {
  p.validate();
  GroupVelocities g;
  g.drift_in = p.alpha_sq * p.kappa * p.tau;
  g.drift_out = p.beta_sq * p.kappa * p.tau;
  g.v_in = 1.0 / (1.0 + g.drift_in);
  g.v_out = 1.0 / (1.0 + g.drift_out);
  return g;
}

double kappa_average(double mu, double tau, std::optional<double> t2_star, int n_nodes) {
  if (!(mu > 0.0)) throw DomainError("kappa requires mu > 0");
  if (!(tau > 0.0)) throw DomainError("kappa requires tau > 0");
  if (n_nodes < 1) throw DomainError("kappa requires at least one quadrature node");
  if (!t2_star) return 0.5 * mu * tau;
  const DetuningRule rule = detuning_rule(t2_star, n_nodes);
  const double inv_tau_sq = 1.0 / (tau * tau);
  const double mean = (rule.weights.array() / (rule.detunings.array().square() + inv_tau_sq)).sum();
  return mu / (2.0 * tau) * mean;
}

}  // namespace mbx4
