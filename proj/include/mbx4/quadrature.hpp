#pragma once

#include <optional>

#include <Eigen/Dense>

namespace mbx4 {

/// Nodes and weights of an n-point rule with weight function exp(-x^2).
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
/// Hermite recurrence. Nodes ascend and sum(weights) = sqrt(pi).
GaussHermiteRule gauss_hermite(int n);

/// Detuning nodes and probability weights for the Gaussian line
/// F(Delta) = (T2*/sqrt(2 pi)) exp(-(Delta T2*)^2 / 2), via Delta = sqrt(2) x / T2*.
/// The sharp-line case (no T2*) is a single node at Delta = 0 with weight 1.
struct DetuningRule {
  Eigen::VectorXd detunings;
  Eigen::VectorXd weights;
};

DetuningRule detuning_rule(std::optional<double> t2_star, int n_nodes);

}  // namespace mbx4
