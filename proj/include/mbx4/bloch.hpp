#pragma once

// Atomic response: the RWA Hamiltonian, the von Neumann right-hand side and
// its RK4 integration over retarded time for an ensemble of detunings.

#include <complex>
#include <optional>
#include <vector>

#include "mbx4/core.hpp"
#include "mbx4/quadrature.hpp"

namespace mbx4 {

/// Density-matrix element (row, col) that sources each channel: a -> rho13, b -> rho14, c -> rho23, d -> rho24.
inline constexpr std::array<std::pair<int, int>, 4> kCoherenceIndex{{{0, 2}, {0, 3}, {1, 2}, {1, 3}}};

/// H / hbar = -[[0, 0, a/2, b/2], [0, 0, c/2, d/2], [a*/2, c*/2, Delta, 0], [b*/2, d*/2, 0, Delta]].
template <typename Scalar>
Matrix4c<Scalar> build_hamiltonian(const RabiVector<Scalar>& omega, Scalar delta) {
  using C = std::complex<Scalar>;
  const Scalar half(0.5);
  Matrix4c<Scalar> h = Matrix4c<Scalar>::Zero();
  h(0, 2) = -half * omega(0);
  h(0, 3) = -half * omega(1);
  h(1, 2) = -half * omega(2);
  h(1, 3) = -half * omega(3);
  h(2, 0) = std::conj(h(0, 2));
  h(3, 0) = std::conj(h(0, 3));
  h(2, 1) = std::conj(h(1, 2));
  h(3, 1) = std::conj(h(1, 3));
  h(2, 2) = C(-delta);
  h(3, 3) = C(-delta);
  return h;
}

/// d(rho)/dT = -i [H, rho] with hbar = 1.
template <typename Scalar>
Matrix4c<Scalar> von_neumann_rhs(const Matrix4c<Scalar>& rho, const Matrix4c<Scalar>& h) {
  const std::complex<Scalar> minus_i(0, -1);
  Matrix4c<Scalar> comm;
  comm.noalias() = h * rho;
  comm.noalias() -= rho * h;
  return minus_i * comm;
}

/// Same right-hand side evaluated from the block structure of H: with
/// H = [[0, A], [A^H, -Delta I]] and rho = [[P, C], [C^H, Q]],
///   [H, rho] = [[A C^H - C A^H, A Q - P A + Delta C], [.., A^H C - C^H A]],
/// the lower-left block being minus the adjoint of the upper-right one.
/// Written out in scalar arithmetic; this is the kernel the integrator uses.
template <typename Scalar>
Matrix4c<Scalar> von_neumann_rhs_blocked(const Matrix4c<Scalar>& rho, const RabiVector<Scalar>& omega, Scalar delta) {
  using C = std::complex<Scalar>;
  // Plain-arithmetic products keep the compiler away from the NaN-recovery complex multiply.
  const auto mul = [](const C& x, const C& y) {
    return C(x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real());
  };
  const auto mul_conj = [](const C& x, const C& y) {  // x * conj(y)
    return C(x.real() * y.real() + x.imag() * y.imag(), x.imag() * y.real() - x.real() * y.imag());
  };
  const auto conj_mul = [](const C& x, const C& y) {  // conj(x) * y
    return C(x.real() * y.real() + x.imag() * y.imag(), x.real() * y.imag() - x.imag() * y.real());
  };
  const auto minus_i = [](const C& z) { return C(z.imag(), -z.real()); };

  const Scalar half(-0.5);
  const C a00 = half * omega(0), a01 = half * omega(1), a10 = half * omega(2), a11 = half * omega(3);
  const C p00 = rho(0, 0), p01 = rho(0, 1), p10 = rho(1, 0), p11 = rho(1, 1);
  const C c00 = rho(0, 2), c01 = rho(0, 3), c10 = rho(1, 2), c11 = rho(1, 3);
  const C q00 = rho(2, 2), q01 = rho(2, 3), q10 = rho(3, 2), q11 = rho(3, 3);

  // X = A C^H
  const C x00 = mul_conj(a00, c00) + mul_conj(a01, c01);
  const C x01 = mul_conj(a00, c10) + mul_conj(a01, c11);
  const C x10 = mul_conj(a10, c00) + mul_conj(a11, c01);
  const C x11 = mul_conj(a10, c10) + mul_conj(a11, c11);
  // Y = A^H C
  const C y00 = conj_mul(a00, c00) + conj_mul(a10, c10);
  const C y01 = conj_mul(a00, c01) + conj_mul(a10, c11);
  const C y10 = conj_mul(a01, c00) + conj_mul(a11, c10);
  const C y11 = conj_mul(a01, c01) + conj_mul(a11, c11);
  // A Q - P A + Delta C
  const C t00 = mul(a00, q00) + mul(a01, q10) - mul(p00, a00) - mul(p01, a10) + delta * c00;
  const C t01 = mul(a00, q01) + mul(a01, q11) - mul(p00, a01) - mul(p01, a11) + delta * c01;
  const C t10 = mul(a10, q00) + mul(a11, q10) - mul(p10, a00) - mul(p11, a10) + delta * c10;
  const C t11 = mul(a10, q01) + mul(a11, q11) - mul(p10, a01) - mul(p11, a11) + delta * c11;

  Matrix4c<Scalar> out;
  out(0, 0) = minus_i(x00 - std::conj(x00));
  out(0, 1) = minus_i(x01 - std::conj(x10));
  out(1, 0) = minus_i(x10 - std::conj(x01));
  out(1, 1) = minus_i(x11 - std::conj(x11));
  out(2, 2) = minus_i(y00 - std::conj(y00));
  out(2, 3) = minus_i(y01 - std::conj(y10));
  out(3, 2) = minus_i(y10 - std::conj(y01));
  out(3, 3) = minus_i(y11 - std::conj(y11));
  out(0, 2) = minus_i(t00);
  out(0, 3) = minus_i(t01);
  out(1, 2) = minus_i(t10);
  out(1, 3) = minus_i(t11);
  out(2, 0) = std::conj(out(0, 2));
  out(3, 0) = std::conj(out(0, 3));
  out(2, 1) = std::conj(out(1, 2));
  out(3, 1) = std::conj(out(1, 3));
  return out;
}

/// One classical RK4 step of length dt with the fields at the step start,
/// midpoint and end. The result is re-symmetrized to (rho + rho^H) / 2.
template <typename Scalar>
Matrix4c<Scalar> rk4_step(const Matrix4c<Scalar>& rho, const RabiVector<Scalar>& f0, const RabiVector<Scalar>& fmid,
                          const RabiVector<Scalar>& f1, Scalar delta, Scalar dt) {
  const Scalar half_dt = dt / 2;
  const Matrix4c<Scalar> k1 = von_neumann_rhs_blocked<Scalar>(rho, f0, delta);
  const Matrix4c<Scalar> k2 = von_neumann_rhs_blocked<Scalar>(rho + half_dt * k1, fmid, delta);
  const Matrix4c<Scalar> k3 = von_neumann_rhs_blocked<Scalar>(rho + half_dt * k2, fmid, delta);
  const Matrix4c<Scalar> k4 = von_neumann_rhs_blocked<Scalar>(rho + dt * k3, f1, delta);
  const Matrix4c<Scalar> next = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  return Scalar(0.5) * (next + next.adjoint());
}

enum class StabilityPolicy { warn, abort };

/// Detuning nodes, their probability weights and one atomic state per node.
struct DetuningEnsemble {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  std::vector<DensityMatrix4> states;

  /// Every node in the same initial state.
  static DetuningEnsemble uniform(const DetuningRule& rule, const DensityMatrix4& state);
  static DetuningEnsemble seeded(const MediumSpec& medium);

  int size() const noexcept { return static_cast<int>(nodes.size()); }
  void validate() const;
};

/// Advance every node by one RK4 step with the half-step field taken as the
/// mean of the two supplied samples.
DetuningEnsemble step_ensemble(DetuningEnsemble ensemble, const Rabi4& fields_t, const Rabi4& fields_t_dt, double dt,
                               StabilityPolicy policy = StabilityPolicy::warn);

/// Same, with an explicitly supplied half-step field (the solver passes a cubic interpolant).
DetuningEnsemble step_ensemble(DetuningEnsemble ensemble, const Rabi4& fields_t, const Rabi4& fields_mid,
                               const Rabi4& fields_t_dt, double dt, StabilityPolicy policy = StabilityPolicy::warn);

/// (<rho13>, <rho14>, <rho23>, <rho24>) as weighted sums in node order.
Rabi4 averaged_coherences(const DetuningEnsemble& ensemble);

/// Weighted mean density matrix.
DensityMatrix4 averaged_density(const DetuningEnsemble& ensemble);

/// Half-step field estimates for every T interval: four-point cubic
/// interpolation in the interior, three-point quadratic at the two ends.
FieldMatrix midpoint_fields(const FieldMatrix& fields);

/// Throws NumericalError (policy abort) or warns once when dt * max(|Omega|, |Delta|) > 0.5.
void check_stability(double dt, double max_rabi, double max_detuning, StabilityPolicy policy);

/// Ensemble-averaged response of the medium to one snapshot, every node
/// starting from `seed` at the first grid time.
struct MediumResponse {
  FieldMatrix coherences;                 // n_t x 4: <rho13>, <rho14>, <rho23>, <rho24> at each grid time
  double final_excited_population = 0.0;  // <rho33 + rho44> at the last grid time
  double min_population = 0.0;            // extreme diagonal values met on any node
  double max_population = 0.0;
  std::vector<DensityMatrix4> density;    // weighted mean rho at each grid time, only when requested
};

/// Integrates each detuning node across the T grid. Nodes run on up to
/// `threads` workers (0 = hardware concurrency); the reduction is always in node order.
MediumResponse medium_response(const FieldMatrix& fields, const DetuningRule& rule, const DensityMatrix4& seed,
                               double dt, StabilityPolicy policy, int threads, bool keep_density = false);

/// Worker count from MBX4_THREADS (unset or 0 means hardware concurrency).
int default_thread_count();

}  // namespace mbx4
