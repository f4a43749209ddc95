#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mbx4/analytic.hpp"
#include "mbx4/diagnostics.hpp"
#include "mbx4/errors.hpp"
#include "mbx4/quadrature.hpp"
#include "mbx4/solver.hpp"

using namespace mbx4;

namespace {
constexpr double kPi = std::numbers::pi;

RetardedGrid small_grid(int n_t, int n_z) {
  RetardedGrid g;
  g.n_t = n_t;
  g.n_z = n_z;
  return g;
}

FieldSnapshot single_pulse(const RetardedGrid& grid, PulseSpec spec) {
  FieldSnapshot s(0.0, grid.n_t);
  s.channel(spec.channel) = generate_pulse(spec, grid);
  return s;
}
}  // namespace

TEST_CASE("Maxwell right-hand side") {
  CHECK(maxwell_rhs(Rabi4(Rabi4::Zero()), 3.0).isZero(0.0));
  Rabi4 c = Rabi4::Zero();
  c(0) = Complex(0.0, 0.1);
  const Rabi4 d = maxwell_rhs(c, 2.0);
  CHECK(d(0).real() == doctest::Approx(0.2));
  CHECK(d(0).imag() == 0.0);
  c << Complex(1, 0), Complex(0, 1), Complex(2, 0), Complex(0, 2);
  const Rabi4 e = maxwell_rhs(c, 1.0);
  CHECK(e(1) == Complex(1, 0));
  CHECK(e(2) == Complex(0, -2));
  CHECK(e(3) == Complex(2, 0));

  FieldMatrix m(3, 4);
  m.setConstant(Complex(0.0, 1.0));
  CHECK((maxwell_rhs(m, 2.0).array() == Complex(2.0, 0.0)).all());

  // a fully inverted slab has no coherences and leaves the fields alone
  DensityMatrix4 inverted = DensityMatrix4::Zero();
  inverted(2, 2) = 1.0;
  Rabi4 coh;
  for (int ch = 0; ch < 4; ++ch) coh(ch) = inverted(kCoherenceIndex[ch].first, kCoherenceIndex[ch].second);
  CHECK(maxwell_rhs(coh, 1.0).isZero(0.0));
}

TEST_CASE("zero input stays zero") {
  const MediumSpec medium{1.0, 2.0, 8, 0.75, 0.25, 1.0};
  const RetardedGrid grid = small_grid(512, 10);
  SolverConfig cfg;
  cfg.snapshot_every = 0.25;
  const PropagationResult r = propagate(FieldSnapshot(0.0, grid.n_t), medium, grid, cfg);
  CHECK(r.area_records.size() == 11);
  CHECK(r.snapshots.size() == 5);
  for (std::size_t k = 1; k < r.snapshots.size(); ++k) CHECK(r.snapshots[k].z > r.snapshots[k - 1].z);
  for (const FieldSnapshot& s : r.snapshots) CHECK(s.omega.isZero(0.0));
  for (const AreaRecord& a : r.area_records) CHECK(a.theta_total == 0.0);
  for (double x : r.excited_at_t_max) CHECK(x == 0.0);
  CHECK(r.min_population == 0.0);
  CHECK(r.max_population == 0.75);
}

TEST_CASE("free streaming with mu = 0") {
  const MediumSpec medium{0.0, 5.0, 8, 0.75, 0.25, 3.0};
  const RetardedGrid grid = small_grid(1024, 60);
  const FieldSnapshot input = single_pulse(grid, {PulseShape::square_gaussian, 1.4 * kPi, 1.0, -5.0, Channel::b});
  SolverConfig cfg;
  cfg.snapshot_every = medium.length / grid.n_z;
  const PropagationResult r = propagate(input, medium, grid, cfg);
  CHECK(r.snapshots.size() == 61);
  for (const FieldSnapshot& s : r.snapshots) CHECK((s.omega - input.omega).cwiseAbs().maxCoeff() < 1e-14);
  const auto slopes = track_peaks(r);
  REQUIRE(slopes[1].has_value());
  CHECK(std::abs(*slopes[1]) < 1e-12);
}

TEST_CASE("two-level 2pi sech: shape-preserving with drift kappa tau") {
  const MediumSpec medium{1.0, std::nullopt, 1, 1.0, 0.0, 8.0};  // 4 absorption lengths
  const RetardedGrid grid = small_grid(2048, 200);
  const FieldSnapshot input = single_pulse(grid, {PulseShape::sech, 2.0 * kPi, 1.0, -10.0, Channel::a});
  const PropagationResult r = propagate(input, medium, grid, SolverConfig{});
  CHECK(std::abs(r.area_records.back().theta[0] / (2.0 * kPi) - 1.0) < 5e-3);
  const double drift = drift_rate(r.peak_tracks, Channel::a, 0.0, medium.length);
  CHECK(std::abs(drift / 0.5 - 1.0) < 2e-2);
  CHECK(fit_sech(r.snapshots.back().channel(Channel::a), grid).rms_residual < 1e-2);
  CHECK(energy_balance_error(r, medium.mu) < 1e-3);
}

TEST_CASE("four-level run tracks the closed-form areas") {
  const SolitonParams<double> p{};
  const MediumSpec medium{1.0, std::nullopt, 1, 0.75, 0.25, 2.0 / p.kappa};
  const RetardedGrid grid = small_grid(2048, 100);
  const double entry = -1.0 / p.kappa;
  FieldSnapshot input = analytic_fields(entry, grid, p);
  input.z = 0.0;
  const PropagationResult r = propagate(input, medium, grid, SolverConfig{});
  for (const AreaRecord& rec : r.area_records) {
    const AreaRecord ref = analytic_areas(rec.z + entry, p);
    for (Channel ch : kChannels) CHECK(std::abs(rec[ch] / ref[ch] - 1.0) < 2e-2);
    CHECK(std::abs(rec.theta_total / (2.0 * kPi) - 1.0) < 1e-2);
  }
}

TEST_CASE("Heun beats Euler at four times the step") {
  const MediumSpec medium{1.0, std::nullopt, 1, 1.0, 0.0, 2.0};
  const RetardedGrid base = small_grid(1024, 5);
  const FieldSnapshot input = single_pulse(base, {PulseShape::sech, 2.0 * kPi, 1.0, -10.0, Channel::a});
  auto run = [&](ZScheme scheme, int n_z) {
    RetardedGrid g = base;
    g.n_z = n_z;
    SolverConfig cfg;
    cfg.scheme = scheme;
    return propagate(input, medium, g, cfg).snapshots.back().omega;
  };
  const FieldMatrix ref = run(ZScheme::heun, 320);
  const double heun = (run(ZScheme::heun, 5) - ref).cwiseAbs().maxCoeff();
  const double euler = (run(ZScheme::euler, 20) - ref).cwiseAbs().maxCoeff();
  CHECK(heun < euler);
}

TEST_CASE("numerical aborts carry the last good depth") {
  const MediumSpec medium{1.0, std::nullopt, 1, 1.0, 0.0, 1.0};
  const RetardedGrid grid = small_grid(64, 4);  // dt ~ 1.27 against a peak of 2.5
  const FieldSnapshot input = single_pulse(grid, {PulseShape::sech, 10.0 * kPi, 4.0, 0.0, Channel::a});
  SolverConfig cfg;
  cfg.stability_policy = StabilityPolicy::abort;
  try {
    propagate(input, medium, grid, cfg);
    FAIL("expected a numerical abort");
  } catch (const NumericalError& e) {
    CHECK(e.last_good_z() == 0.0);
  }
  FieldSnapshot bad = input;
  bad.omega(3, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(propagate(bad, medium, grid, SolverConfig{}), NumericalError);
}

TEST_CASE("solver input validation") {
  const MediumSpec medium{1.0, std::nullopt, 1, 1.0, 0.0, 1.0};
  const RetardedGrid grid = small_grid(256, 10);
  CHECK_THROWS_AS(propagate(FieldSnapshot(0.0, 128), medium, grid, SolverConfig{}), DomainError);
  SolverConfig cfg;
  cfg.snapshot_every = 0.01;  // below dz
  CHECK_THROWS_AS(propagate(FieldSnapshot(0.0, 256), medium, grid, cfg), DomainError);
  MediumSpec bad = medium;
  bad.length = -1.0;
  CHECK_THROWS_AS(propagate(FieldSnapshot(0.0, 256), bad, grid, SolverConfig{}), DomainError);
}

TEST_CASE("commutator form of the field equations") {
  const int n_t = 256;
  RetardedGrid grid = small_grid(n_t, 1);
  std::vector<DensityMatrix4> zero_rho(n_t, DensityMatrix4::Zero());
  FieldSnapshot a(0.0, n_t), b(0.1, n_t);
  CHECK(commutator_consistency_check(a, b, zero_rho, 1.0) == 0.0);

  // an Euler step built from maxwell_rhs satisfies the commutator form exactly
  FieldMatrix fields = FieldMatrix::Zero(n_t, 4);
  fields.col(0) = generate_pulse({PulseShape::sech, 1.4 * kPi, 1.0, 0.0, Channel::a}, grid);
  fields.col(1) = generate_pulse({PulseShape::sech, 0.9 * kPi, 1.0, 0.0, Channel::b}, grid);
  const MediumResponse resp = medium_response(fields, detuning_rule(3.0, 8), make_seed_state(0.75, 0.25), grid.dt(),
                                              StabilityPolicy::warn, 1, true);
  const double mu = 1.3, dz = 0.01;
  FieldSnapshot before(0.0, n_t), after(dz, n_t);
  before.omega = fields;
  after.omega = fields + dz * maxwell_rhs(resp.coherences, mu);
  CHECK(commutator_consistency_check(before, after, resp.density, mu) < 1e-12);

  // a real solver step agrees to first order in dz
  const MediumSpec medium{mu, 3.0, 8, 0.75, 0.25, dz};
  SolverConfig cfg;
  cfg.threads = 1;
  const PropagationResult r = propagate(before, medium, grid, cfg);
  const double residual = commutator_consistency_check(r.snapshots.front(), r.snapshots.back(), resp.density, mu);
  CHECK(residual < 10.0 * dz);
  CHECK(residual > 0.0);
}
