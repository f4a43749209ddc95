#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mbx4/analytic.hpp"
#include "mbx4/quadrature.hpp"

using namespace mbx4;

namespace {
constexpr double kPi = std::numbers::pi;

// Direct transcription of the envelope, usable where nothing overflows.
long double naive_rabi(long double z, long double t, const SolitonParams<double>& p) {
  const long double k = p.kappa, a2 = p.alpha_sq, b2 = p.beta_sq, tau = p.tau;
  const long double num = (4.0L / tau) * std::sqrt(1.0L + std::exp(2.0L * (a2 - b2) * k * z));
  const long double den = 2.0L * std::cosh(a2 * k * z - t / tau) + std::exp((a2 - 2.0L * b2) * k * z + t / tau);
  return num / den;
}
}  // namespace

TEST_CASE("fundamental envelope at the origin") {
  const SolitonParams<double> p{};
  // (4 sqrt 2) / 3 for kappa z = 0, T = 0
  CHECK(fundamental_rabi(0.0, 0.0, p) == doctest::Approx(1.885618083164127).epsilon(1e-15));
}

TEST_CASE("stable envelope agrees with the direct formula") {
  SolitonParams<double> p{};
  p.tau = 1.3;
  p.kappa = 0.7;
  for (double kz : {-12.0, -3.0, 0.0, 2.5, 11.0}) {
    for (double t : {-9.0, -1.0, 0.0, 0.4, 6.0}) {
      const double z = kz / p.kappa;
      const double ref = static_cast<double>(naive_rabi(z, t, p));
      CHECK(fundamental_rabi(z, t, p) == doctest::Approx(ref).epsilon(1e-13));
    }
  }
}

TEST_CASE("envelope stays finite far from the origin") {
  const SolitonParams<double> p{};
  for (double kz : {-400.0, -60.0, 60.0, 400.0}) {
    for (double t : {-300.0, 0.0, 300.0}) {
      const double v = fundamental_rabi(kz / p.kappa, t, p);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
  // regime I: (2/tau) sech(alpha^2 kappa Z - T/tau)
  const double z = -30.0 / p.kappa;
  const double t = p.alpha_sq * p.kappa * z + 0.7;
  CHECK(fundamental_rabi(z, t, p) == doctest::Approx(2.0 / std::cosh(-0.7)).epsilon(1e-9));
}

TEST_CASE("mixing angle") {
  const SolitonParams<double> p{};
  // tan phi = exp(-0.5) at kappa z = 1
  CHECK(phi(1.0 / p.kappa, p) == doctest::Approx(0.5452076238305836).epsilon(1e-15));
  CHECK(phi(0.0, p) == doctest::Approx(kPi / 4).epsilon(1e-15));
  for (double kz : {-2000.0, -40.0, 0.3, 40.0, 2000.0}) {
    const auto [s, c] = mixing_sin_cos(kz / p.kappa, p);
    CHECK(s * s + c * c == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::atan2(s, c) == doctest::Approx(phi(kz / p.kappa, p)).epsilon(1e-14));
  }
  const auto [s_in, c_in] = mixing_sin_cos(-40.0 / p.kappa, p);
  CHECK(s_in == doctest::Approx(1.0));
  CHECK(c_in > 0.0);  // exponentially small, not flushed to zero
  CHECK(c_in == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));
}

TEST_CASE("closed-form areas") {
  SolitonParams<double> p{};
  for (double kz : {-50.0, -8.0, 0.0, 3.0, 50.0}) {
    const AreaRecord r = analytic_areas(kz / p.kappa, p);
    CHECK(r.theta_total == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(r.theta_1 == doctest::Approx(2.0 * kPi * std::sin(p.u)).epsilon(1e-14));
    CHECK(r.theta_2 == doctest::Approx(2.0 * kPi * std::cos(p.u)).epsilon(1e-14));
  }
  p.u = 0.0;
  const AreaRecord r = analytic_areas(0.0, p);
  CHECK(r.theta[0] == 0.0);
  CHECK(r.theta[2] == 0.0);
  const FieldSnapshot s = analytic_fields(0.0, RetardedGrid{}, p);
  CHECK(s.channel(Channel::a).isZero(0.0));
  CHECK(s.channel(Channel::c).isZero(0.0));
}

TEST_CASE("analytic snapshot integrates to the closed-form areas") {
  const SolitonParams<double> p{};
  const RetardedGrid grid;
  const double z = 1.5 / p.kappa;
  const FieldSnapshot s = analytic_fields(z, grid, p);
  CHECK(s.z == z);
  const AreaRecord num = snapshot_areas(s, grid);
  const AreaRecord ref = analytic_areas(z, p);
  for (Channel ch : kChannels) CHECK(num[ch] == doctest::Approx(ref[ch]).epsilon(1e-10));
}

TEST_CASE("soliton parameter validation") {
  SolitonParams<double> p{};
  p.u = 2.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = SolitonParams<double>{};
  p.alpha_sq = 0.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = SolitonParams<double>{};
  p.tau = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("group velocities") {
  const SolitonParams<double> p{};
  const GroupVelocities g = group_velocities(p);
  CHECK(g.drift_in == doctest::Approx(0.375));
  CHECK(g.drift_out == doctest::Approx(0.125));
  CHECK(g.v_in == doctest::Approx(1.0 / 1.375));
  CHECK(g.v_out > g.v_in);
}

TEST_CASE("Gauss-Hermite nodes and weights") {
  const GaussHermiteRule one = gauss_hermite(1);
  CHECK(one.nodes(0) == 0.0);
  CHECK(one.weights(0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-15));
  // tabulated five-point rule
  const GaussHermiteRule r = gauss_hermite(5);
  CHECK(r.nodes(2) == 0.0);
  CHECK(r.nodes(3) == doctest::Approx(0.958572464613819).epsilon(1e-14));
  CHECK(r.nodes(4) == doctest::Approx(2.020182870456086).epsilon(1e-14));
  CHECK(r.weights(2) == doctest::Approx(0.945308720482942).epsilon(1e-13));
  CHECK(r.weights(3) == doctest::Approx(0.393619323152241).epsilon(1e-13));
  CHECK(r.weights(4) == doctest::Approx(0.0199532420590459).epsilon(1e-12));
  CHECK(r.nodes(0) == -r.nodes(4));
  // exact for x^4: 3 sqrt(pi) / 4
  const GaussHermiteRule r8 = gauss_hermite(8);
  CHECK((r8.weights.array() * r8.nodes.array().pow(4)).sum() == doctest::Approx(0.75 * std::sqrt(kPi)).epsilon(1e-13));
  CHECK_THROWS_AS(gauss_hermite(0), DomainError);
}

TEST_CASE("detuning rule moments") {
  for (double t2 : {0.3, 1.0, 5.0}) {
    for (int n : {16, 64, 128}) {
      const DetuningRule rule = detuning_rule(t2, n);
      CHECK(std::abs(rule.weights.sum() - 1.0) < 1e-10);
      const double second = (rule.weights.array() * rule.detunings.array().square()).sum();
      CHECK(std::abs(second * t2 * t2 - 1.0) < 1e-10);
    }
  }
  const DetuningRule sharp = detuning_rule(std::nullopt, 1);
  CHECK(sharp.detunings(0) == 0.0);
  CHECK(sharp.weights(0) == 1.0);
  CHECK_THROWS_AS(detuning_rule(std::nullopt, 4), DomainError);
  CHECK_THROWS_AS(detuning_rule(-1.0, 4), DomainError);
}

TEST_CASE("kappa from the line average") {
  CHECK(kappa_average(1.0, 1.0, std::nullopt, 1) == 0.5);
  CHECK(kappa_average(3.0, 2.0, std::nullopt, 1) == 3.0);
  CHECK(std::abs(kappa_average(1.0, 1.0, 1e6, 64) / 0.5 - 1.0) < 1e-6);
  // dense-trapezoid values over the Gaussian line, computed independently
  const double oracle_t1 = 0.32783977120939917;
  const double oracle_t5 = 0.48202026178828955;
  CHECK(std::abs(kappa_average(1.0, 1.0, 1.0, 64) / oracle_t1 - 1.0) < 1e-6);
  CHECK(std::abs(kappa_average(1.0, 1.0, 1.0, 128) / oracle_t1 - 1.0) < 1e-8);
  CHECK(std::abs(kappa_average(1.0, 1.0, 5.0, 64) / oracle_t5 - 1.0) < 1e-6);
  CHECK_THROWS_AS(kappa_average(0.0, 1.0, std::nullopt, 1), DomainError);
}
