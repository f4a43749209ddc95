#include "mbx4/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "mbx4/errors.hpp"

namespace mbx4 {

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("Gauss-Hermite rule needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(0.5 * k);
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussHermiteRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = std::sqrt(std::numbers::pi) * eig.eigenvectors().row(0).transpose().array().square();
  // Symmetrize: the exact rule is even, the eigen-solve is only accurate to rounding.
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes(j) - rule.nodes(i));
    const double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = w;
    rule.weights(j) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  return rule;
}

DetuningRule detuning_rule(std::optional<double> t2_star, int n_nodes) {
  DetuningRule rule;
  if (!t2_star) {
    if (n_nodes != 1) throw DomainError("sharp-line ensembles have exactly one node");
    rule.detunings = Eigen::VectorXd::Zero(1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }
  if (!(*t2_star > 0.0)) throw DomainError("T2* must be positive");
  const GaussHermiteRule gh = gauss_hermite(n_nodes);
  rule.detunings = gh.nodes * (std::numbers::sqrt2 / *t2_star);
  rule.weights = gh.weights / gh.weights.sum();
  return rule;
}

}  // namespace mbx4
