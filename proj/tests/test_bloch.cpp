#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mbx4/bloch.hpp"
#include "mbx4/errors.hpp"
#include "mbx4/quadrature.hpp"

using namespace mbx4;

namespace {
constexpr double kPi = std::numbers::pi;

DensityMatrix4 random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Matrix4cd a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = Complex(n(rng), n(rng));
  DensityMatrix4 rho = a * a.adjoint();
  return rho / rho.trace();
}

Rabi4 random_fields(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Rabi4 f;
  for (int k = 0; k < 4; ++k) f(k) = Complex(n(rng), n(rng));
  return f;
}

DetuningEnsemble single(const DensityMatrix4& rho, double delta = 0.0) {
  DetuningEnsemble e;
  e.nodes = Eigen::VectorXd::Constant(1, delta);
  e.weights = Eigen::VectorXd::Ones(1);
  e.states = {rho};
  return e;
}
}  // namespace

TEST_CASE("Hamiltonian layout") {
  Rabi4 f;
  f << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
  const Matrix4c<double> h = build_hamiltonian<double>(f, 0.3);
  CHECK(h(0, 2) == -0.5 * f(0));
  CHECK(h(0, 3) == -0.5 * f(1));
  CHECK(h(1, 2) == -0.5 * f(2));
  CHECK(h(1, 3) == -0.5 * f(3));
  CHECK(h(2, 0) == -0.5 * std::conj(f(0)));
  CHECK(h(2, 2) == Complex(-0.3, 0.0));
  CHECK(h(3, 3) == Complex(-0.3, 0.0));
  CHECK(h(0, 1) == Complex(0.0));
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity commutes with any Hamiltonian") {
  std::mt19937_64 rng(3);
  const DensityMatrix4 rho = DensityMatrix4::Identity() / 4.0;
  const Rabi4 f = random_fields(rng);
  CHECK(von_neumann_rhs<double>(rho, build_hamiltonian<double>(f, 0.8)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(von_neumann_rhs_blocked<double>(rho, f, 0.8).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("block kernel matches the generic commutator") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix4 rho = random_density(rng);
    const Rabi4 f = random_fields(rng);
    const double delta = std::normal_distribution<double>()(rng);
    const Matrix4c<double> ref = von_neumann_rhs<double>(rho, build_hamiltonian<double>(f, delta));
    CHECK((von_neumann_rhs_blocked<double>(rho, f, delta) - ref).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("free coherence rotates as exp(-i Delta t)") {
  // pure state (|1> + |3>) / sqrt 2: rho13 = 1/2
  Eigen::Vector4cd psi(1.0, 0.0, 1.0, 0.0);
  psi /= std::sqrt(2.0);
  const DensityMatrix4 rho = psi * psi.adjoint();
  const double delta = 0.5, dt = 0.01;
  // direct commutator: d rho13 / dT = -i Delta rho13 for the diagonal Hamiltonian
  const Matrix4c<double> rhs = von_neumann_rhs<double>(rho, build_hamiltonian<double>(Rabi4::Zero(), delta));
  CHECK(std::abs(rhs(0, 2) - Complex(0.0, -delta) * rho(0, 2)) < 1e-16);

  DetuningEnsemble e = step_ensemble(single(rho, delta), Rabi4::Zero(), Rabi4::Zero(), dt, StabilityPolicy::abort);
  const Complex c = e.states[0](0, 2);
  CHECK(std::abs(std::abs(c) - 0.5) < 1e-12);
  CHECK(std::abs(c - 0.5 * std::exp(Complex(0.0, -delta * dt))) < 1e-12);
}

TEST_CASE("zero fields on resonance leave the ensemble unchanged") {
  std::mt19937_64 rng(5);
  const DensityMatrix4 rho = random_density(rng);
  const DetuningEnsemble e = step_ensemble(single(rho), Rabi4::Zero(), Rabi4::Zero(), 0.1, StabilityPolicy::abort);
  CHECK((e.states[0] - 0.5 * (rho + rho.adjoint())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-level Rabi flopping under a constant field") {
  const double omega = 0.7, dt = 0.001;
  Rabi4 f = Rabi4::Zero();
  f(0) = omega;
  DetuningEnsemble e = single(make_seed_state(1.0, 0.0));
  double worst = 0.0;
  for (int i = 1; i <= 20000; ++i) {
    e = step_ensemble(std::move(e), f, f, dt, StabilityPolicy::abort);
    if (i % 1000 == 0) {
      const double expected = std::pow(std::sin(0.5 * omega * i * dt), 2);
      worst = std::max(worst, std::abs(e.states[0](2, 2).real() - expected));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("resonant pi sech inverts a two-level atom") {
  RetardedGrid grid;
  FieldMatrix fields = FieldMatrix::Zero(grid.n_t, 4);
  fields.col(0) = generate_pulse({PulseShape::sech, kPi, 1.0, 0.0, Channel::a}, grid);
  const MediumResponse r = medium_response(fields, detuning_rule(std::nullopt, 1), make_seed_state(1.0, 0.0),
                                           grid.dt(), StabilityPolicy::abort, 1);
  CHECK(r.final_excited_population == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.min_population >= -1e-8);
  CHECK(r.max_population <= 1.0 + 1e-8);
}

TEST_CASE("ensemble averages") {
  const DetuningEnsemble seeded = DetuningEnsemble::seeded({1.0, 5.0, 16, 0.75, 0.25, 1.0});
  CHECK_NOTHROW(seeded.validate());
  CHECK(averaged_coherences(seeded).isZero(0.0));
  CHECK(averaged_density(seeded)(0, 0).real() == doctest::Approx(0.75));

  std::mt19937_64 rng(9);
  const DensityMatrix4 rho = random_density(rng);
  const Rabi4 c = averaged_coherences(single(rho));
  CHECK(c(0) == rho(0, 2));
  CHECK(c(1) == rho(0, 3));
  CHECK(c(2) == rho(1, 2));
  CHECK(c(3) == rho(1, 3));

  DensityMatrix4 plus = make_seed_state(0.5, 0.5), minus = plus;
  plus(0, 2) = Complex(0.0, 0.1);
  plus(2, 0) = std::conj(plus(0, 2));
  minus(0, 2) = Complex(0.0, -0.1);
  minus(2, 0) = std::conj(minus(0, 2));
  DetuningEnsemble pair;
  pair.nodes = Eigen::Vector2d(-0.1, 0.1);
  pair.weights = Eigen::Vector2d(0.5, 0.5);
  pair.states = {plus, minus};
  CHECK(std::abs(averaged_coherences(pair)(0)) == 0.0);

  pair.weights = Eigen::Vector2d(0.5, 0.6);
  CHECK_THROWS_AS(pair.validate(), DomainError);
}

TEST_CASE("stability guard") {
  Rabi4 f = Rabi4::Zero();
  f(0) = 10.0;
  const DetuningEnsemble e = single(make_seed_state(1.0, 0.0));
  CHECK_THROWS_AS(step_ensemble(e, f, f, 0.1, StabilityPolicy::abort), NumericalError);
  CHECK_NOTHROW(step_ensemble(e, f, f, 0.1, StabilityPolicy::warn));
  CHECK_NOTHROW(step_ensemble(e, f, f, 0.05, StabilityPolicy::abort));
  CHECK_THROWS_AS(step_ensemble(e, f, f, 0.0, StabilityPolicy::warn), DomainError);
}

TEST_CASE("cubic midpoints are exact for cubic envelopes") {
  const int n = 12;
  const double h = 0.3;
  auto cubic = [](double t) { return Complex(1.0 - 2.0 * t + 0.5 * t * t * t, 0.25 * t * t); };
  FieldMatrix f(n, 4);
  for (int i = 0; i < n; ++i) f.row(i).setConstant(cubic(i * h));
  const FieldMatrix mid = midpoint_fields(f);
  REQUIRE(mid.rows() == n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double tol = (i == 0 || i == n - 2) ? 1e-2 : 1e-13;  // end rows are quadratic
    CHECK(std::abs(mid(i, 0) - cubic((i + 0.5) * h)) < tol);
  }
  FieldMatrix two(2, 4);
  two.row(0).setConstant(1.0);
  two.row(1).setConstant(3.0);
  CHECK(midpoint_fields(two)(0, 2) == Complex(2.0));
}

TEST_CASE("threaded medium response is bit-identical to serial") {
  RetardedGrid grid;
  grid.n_t = 512;
  FieldMatrix fields = FieldMatrix::Zero(grid.n_t, 4);
  fields.col(0) = generate_pulse({PulseShape::gaussian, 1.4 * kPi, 1.0, -5.0, Channel::a}, grid);
  fields.col(1) = generate_pulse({PulseShape::gaussian, 0.9 * kPi, 1.0, -5.0, Channel::b}, grid);
  const DetuningRule rule = detuning_rule(2.0, 16);
  const DensityMatrix4 seed = make_seed_state(0.75, 0.25);
  const MediumResponse a = medium_response(fields, rule, seed, grid.dt(), StabilityPolicy::warn, 1, true);
  const MediumResponse b = medium_response(fields, rule, seed, grid.dt(), StabilityPolicy::warn, 3, true);
  CHECK((a.coherences.array() == b.coherences.array()).all());
  CHECK(a.final_excited_population == b.final_excited_population);
  REQUIRE(a.density.size() == static_cast<std::size_t>(grid.n_t));
  CHECK(std::abs(a.density.back().trace() - 1.0) < 1e-12);
  for (int ch = 0; ch < 4; ++ch) {
    const auto [r, c] = kCoherenceIndex[ch];
    CHECK(a.coherences(100, ch) == a.density[100](r, c));
  }
}

TEST_CASE("long-double instantiation agrees with double") {
  std::mt19937_64 rng(21);
  const DensityMatrix4 rho = random_density(rng);
  const Rabi4 f0 = random_fields(rng), f1 = random_fields(rng);
  const Rabi4 fm = 0.5 * (f0 + f1);
  const DensityMatrix4 d = rk4_step<double>(rho, f0, fm, f1, 0.2, 0.05);
  const Matrix4c<long double> l =
      rk4_step<long double>(rho.cast<std::complex<long double>>(), f0.cast<std::complex<long double>>(),
                            fm.cast<std::complex<long double>>(), f1.cast<std::complex<long double>>(), 0.2L, 0.05L);
  CHECK((l.cast<Complex>() - d).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("unitary invariants over a full window") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  double phase[4], freq[4];
  for (int k = 0; k < 4; ++k) {
    phase[k] = u(rng);
    freq[k] = 0.2 + 0.2 * u(rng);
  }
  auto field = [&](double t) {
    Rabi4 f;
    for (int k = 0; k < 4; ++k) f(k) = std::polar(0.5, freq[k] * t + phase[k]);
    return f;
  };
  // one default T window, peak field 2 / tau
  const RetardedGrid grid;
  const double dt = grid.dt();
  DetuningEnsemble e = single(make_seed_state(0.75, 0.25), 0.4);
  const double purity0 = (e.states[0] * e.states[0]).trace().real();
  for (int i = 0; i + 1 < grid.n_t; ++i) {
    e = step_ensemble(std::move(e), field(i * dt), field((i + 0.5) * dt), field((i + 1) * dt), dt,
                      StabilityPolicy::abort);
  }
  const DensityMatrixCheck c = check_density_matrix(e.states[0]);
  CHECK(c.trace_error < 1e-10);
  CHECK(c.hermiticity_error == 0.0);
  CHECK(c.min_eigenvalue > -1e-8);
  CHECK(std::abs((e.states[0] * e.states[0]).trace().real() - purity0) < 1e-8);
}
