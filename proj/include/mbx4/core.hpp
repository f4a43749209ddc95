#pragma once

// Domain types shared by every module.
//
// Units: times are in multiples of a reference time t0 (analytic runs use
// t0 = tau), the retarded frame has c = 1, and Z is a propagation depth in
// units of 1/(mu t0). Rabi frequencies are in rad / t0 with hbar = 1.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace mbx4 {

using Complex = std::complex<double>;

/// The four optical transitions: a = 1-3, b = 1-4, c = 2-3, d = 2-4.
enum class Channel : int { a = 0, b = 1, c = 2, d = 3 };

inline constexpr std::array<Channel, 4> kChannels{Channel::a, Channel::b, Channel::c, Channel::d};

constexpr int index(Channel ch) noexcept { return static_cast<int>(ch); }
char channel_name(Channel ch) noexcept;
Channel parse_channel(std::string_view name);

/// Dense 4x4 complex matrix templated on the real scalar type.
template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;

/// Atomic state in the |1>,|2>,|3>,|4> basis.
using DensityMatrix4 = Matrix4c<double>;

/// Four complex Rabi frequencies (a, b, c, d) at a single (Z, T).
template <typename Scalar>
using RabiVector = Eigen::Matrix<std::complex<Scalar>, 4, 1>;
using Rabi4 = RabiVector<double>;

/// n_t x 4 matrix of envelopes; column k holds channel k.
using FieldMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, 4>;

/// Uniform (T, Z) grid in the retarded frame. Z always starts at 0.
struct RetardedGrid {
  double t_min = -40.0;
  double t_max = 40.0;
  int n_t = 4096;
  double z_max = 1.0;
  int n_z = 1;

  double dt() const noexcept { return (t_max - t_min) / (n_t - 1); }
  double dz() const noexcept { return z_max / n_z; }
  double time(int i) const noexcept { return t_min + i * dt(); }
  double depth(int k) const noexcept { return k * dz(); }
  Eigen::VectorXd times() const { return Eigen::VectorXd::LinSpaced(n_t, t_min, t_max); }

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

/// The four envelopes sampled on the T grid at fixed depth z.
struct FieldSnapshot {
  double z = 0.0;
  FieldMatrix omega;

  FieldSnapshot() = default;
  FieldSnapshot(double z_, int n_t) : z(z_), omega(FieldMatrix::Zero(n_t, 4)) {}

  auto channel(Channel ch) { return omega.col(index(ch)); }
  auto channel(Channel ch) const { return omega.col(index(ch)); }
  Rabi4 at(int i) const { return omega.row(i).transpose(); }
  int size() const noexcept { return static_cast<int>(omega.rows()); }
  bool all_finite() const { return omega.allFinite(); }
};

struct MediumSpec {
  double mu = 1.0;
  /// Inhomogeneous lifetime; std::nullopt means the sharp-line limit (a single node at Delta = 0).
  std::optional<double> t2_star;
  int n_detuning = 1;
  double alpha_sq = 1.0;
  double beta_sq = 0.0;
  double length = 1.0;

  bool sharp_line() const noexcept { return !t2_star.has_value(); }
  void validate() const;
};

enum class PulseShape { sech, gaussian, square_gaussian };

std::string to_string(PulseShape shape);
PulseShape parse_pulse_shape(std::string_view name);

struct PulseSpec {
  PulseShape shape = PulseShape::sech;
  double area = 0.0;
  double width = 1.0;
  double center = 0.0;
  Channel channel = Channel::a;
};

/// Diagonal seed state diag(alpha_sq, beta_sq, 0, 0).
DensityMatrix4 make_seed_state(double alpha_sq, double beta_sq);

/// Real envelope on the grid whose trapezoid area equals spec.area.
///
/// Throws DomainError when the grid captures less than 99.9% of the shape's
/// continuous area; warns on stderr when the peak lies closer than four
/// widths to either grid end.
Eigen::VectorXcd generate_pulse(const PulseSpec& spec, const RetardedGrid& grid);

/// Unit-amplitude shape value at normalized offset x = (T - center) / width.
double pulse_shape_value(PulseShape shape, double x);

/// Continuous integral of the unit-amplitude shape divided by its width.
double pulse_shape_unit_area(PulseShape shape);

struct DensityMatrixCheck {
  double hermiticity_error = 0.0;  // max |rho - rho^H|
  double trace_error = 0.0;        // |tr rho - 1|
  double min_population = 0.0;
  double max_population = 0.0;
  double max_imag_diagonal = 0.0;
  double min_eigenvalue = 0.0;
};

DensityMatrixCheck check_density_matrix(const DensityMatrix4& rho);

}  // namespace mbx4
