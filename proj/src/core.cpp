#include "mbx4/core.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "mbx4/errors.hpp"

namespace mbx4 {

char channel_name(Channel ch) noexcept { return static_cast<char>('a' + index(ch)); }

Channel parse_channel(std::string_view name) {
  if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'd') {
    return static_cast<Channel>(name[0] - 'a');
  }
  throw DomainError("unknown channel '" + std::string(name) + "' (expected a, b, c or d)");
}

void RetardedGrid::validate() const {
  if (n_t < 2) throw DomainError("grid.n_t must be >= 2");
  if (n_z < 1) throw DomainError("grid.n_z must be >= 1");
  if (!(t_max > t_min)) throw DomainError("grid.t_max must exceed grid.t_min");
  if (!(z_max > 0.0)) throw DomainError("grid.z_max must be positive");
  if (!std::isfinite(t_min) || !std::isfinite(t_max) || !std::isfinite(z_max)) {
    throw DomainError("grid bounds must be finite");
  }
}

void MediumSpec::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("medium.mu must be finite and non-negative");
  if (t2_star && !(*t2_star > 0.0)) throw DomainError("medium.t2_star must be positive");
  if (n_detuning < 1) throw DomainError("medium.n_detuning must be >= 1");
  if (sharp_line() && n_detuning != 1) {
    throw DomainError("sharp-line medium requires n_detuning = 1");
  }
  if (alpha_sq < 0.0 || alpha_sq > 1.0 || beta_sq < 0.0 || beta_sq > 1.0 ||
      std::abs(alpha_sq + beta_sq - 1.0) > 1e-12) {
    throw DomainError("medium.alpha_sq and medium.beta_sq must lie in [0,1] and sum to 1");
  }
  if (!(length > 0.0)) throw DomainError("medium.length must be positive");
}

std::string to_string(PulseShape shape) {
  switch (shape) {
    case PulseShape::sech:
      return "sech";
    case PulseShape::gaussian:
      return "gaussian";
    case PulseShape::square_gaussian:
      return "square_gaussian";
  }
  return "?";
}

PulseShape parse_pulse_shape(std::string_view name) {
  if (name == "sech") return PulseShape::sech;
  if (name == "gaussian") return PulseShape::gaussian;
  if (name == "square_gaussian") return PulseShape::square_gaussian;
  throw DomainError("unsupported pulse shape '" + std::string(name) + "'");
}

DensityMatrix4 make_seed_state(double alpha_sq, double beta_sq) {
  if (alpha_sq < 0.0 || alpha_sq > 1.0 || beta_sq < 0.0 || beta_sq > 1.0) {
    throw DomainError("seed populations must lie in [0,1]");
  }
  if (std::abs(alpha_sq + beta_sq - 1.0) > 1e-12) {
    throw DomainError("seed populations must sum to 1");
  }
  DensityMatrix4 rho = DensityMatrix4::Zero();
  rho(0, 0) = alpha_sq;
  rho(1, 1) = beta_sq;
  return rho;
}

double pulse_shape_value(PulseShape shape, double x) {
  switch (shape) {
    case PulseShape::sech:
      // 2 e^{-|x|} / (1 + e^{-2|x|}) avoids cosh overflow in the far tails.
      return 2.0 * std::exp(-std::abs(x)) / (1.0 + std::exp(-2.0 * std::abs(x)));
    case PulseShape::gaussian:
      return std::exp(-x * x);
    case PulseShape::square_gaussian:
      return std::exp(-(x * x) * (x * x));
  }
  return 0.0;
}

double pulse_shape_unit_area(PulseShape shape) {
  switch (shape) {
    case PulseShape::sech:
      return std::numbers::pi;
    case PulseShape::gaussian:
      return std::sqrt(std::numbers::pi);
    case PulseShape::square_gaussian:
      return 2.0 * std::tgamma(1.25);
  }
  return 0.0;
}

Eigen::VectorXcd generate_pulse(const PulseSpec& spec, const RetardedGrid& grid) {
  grid.validate();
  if (!(spec.width > 0.0)) throw DomainError("pulse width must be positive");
  if (!(spec.area >= 0.0)) throw DomainError("pulse area must be non-negative");

  Eigen::VectorXd shape(grid.n_t);
  for (int i = 0; i < grid.n_t; ++i) {
    shape(i) = pulse_shape_value(spec.shape, (grid.time(i) - spec.center) / spec.width);
  }
  const double dt = grid.dt();
  const double unit_area = dt * (shape.sum() - 0.5 * (shape(0) + shape(grid.n_t - 1)));
  const double expected = pulse_shape_unit_area(spec.shape) * spec.width;
  if (unit_area < 0.999 * expected) {
    throw DomainError("pulse on channel " + std::string(1, channel_name(spec.channel)) +
                      " is clipped by the grid (captured area fraction " +
                      std::to_string(unit_area / expected) + ")");
  }
  if (spec.center - 4.0 * spec.width < grid.t_min || spec.center + 4.0 * spec.width > grid.t_max) {
    std::cerr << "warning: pulse on channel " << channel_name(spec.channel)
              << " peaks within four widths of the grid boundary\n";
  }
  if (spec.area == 0.0) return Eigen::VectorXcd::Zero(grid.n_t);
  return (shape * (spec.area / unit_area)).cast<Complex>();
}

DensityMatrixCheck check_density_matrix(const DensityMatrix4& rho) {
  DensityMatrixCheck out;
  out.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  out.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  const Eigen::Vector4d pops = rho.diagonal().real();
  out.min_population = pops.minCoeff();
  out.max_population = pops.maxCoeff();
  out.max_imag_diagonal = rho.diagonal().imag().cwiseAbs().maxCoeff();
  const DensityMatrix4 herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix4> eig(herm, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  return out;
}

}  // namespace mbx4
