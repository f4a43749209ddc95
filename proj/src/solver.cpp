#include "mbx4/solver.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "mbx4/diagnostics.hpp"
#include "mbx4/errors.hpp"

namespace mbx4 {

namespace {

const Complex kMinusI(0.0, -1.0);

void check_finite(const FieldMatrix& fields, const RetardedGrid& grid, double z, double last_good_z) {
  if (fields.allFinite()) return;
  for (int i = 0; i < fields.rows(); ++i) {
    for (int ch = 0; ch < 4; ++ch) {
      if (!std::isfinite(fields(i, ch).real()) || !std::isfinite(fields(i, ch).imag())) {
        std::ostringstream msg;
        msg << "non-finite envelope on channel " << channel_name(static_cast<Channel>(ch)) << " at z = " << z
            << ", t = " << grid.time(i);
        throw NumericalError(msg.str(), last_good_z);
      }
    }
  }
}

void record(PropagationResult& out, const FieldSnapshot& snap, const MediumResponse& response) {
  const RetardedGrid& grid = out.grid;
  out.area_records.push_back(snapshot_areas(snap, grid));
  std::array<double, 4> mags{};
  out.peak_tracks.z.push_back(snap.z);
  for (Channel ch : kChannels) {
    mags[index(ch)] = magnitude_area(snap.channel(ch), grid);
    const Peak pk = find_peak(snap.channel(ch), grid);
    out.peak_tracks.time[index(ch)].push_back(pk.time);
    out.peak_tracks.amplitude[index(ch)].push_back(pk.amplitude);
  }
  out.magnitude_areas.push_back(mags);
  const Eigen::ArrayXd intensity = snap.omega.cwiseAbs2().rowwise().sum();
  const double dt = grid.dt();
  out.field_energy.push_back(dt * (intensity.sum() - 0.5 * (intensity(0) + intensity(intensity.size() - 1))));
  out.excited_at_t_max.push_back(response.final_excited_population);
  out.min_population = std::min(out.min_population, response.min_population);
  out.max_population = std::max(out.max_population, response.max_population);
}

}  // namespace

Rabi4 maxwell_rhs(const Rabi4& coherences, double mu) { return (kMinusI * mu) * coherences; }

FieldMatrix maxwell_rhs(const FieldMatrix& coherences, double mu) { return (kMinusI * mu) * coherences; }

PropagationResult propagate(const FieldSnapshot& initial, const MediumSpec& medium, RetardedGrid grid,
                            const SolverConfig& cfg) {
  medium.validate();
  grid.z_max = medium.length;
  grid.validate();
  if (initial.size() != grid.n_t) throw DomainError("initial snapshot does not match the grid's n_t");
  if (cfg.snapshot_every > 0.0 && cfg.snapshot_every < grid.dz() * (1.0 - 1e-12)) {
    throw DomainError("solver.snapshot_every must be at least dz");
  }
  check_finite(initial.omega, grid, 0.0, 0.0);

  const DetuningRule rule = detuning_rule(medium.t2_star, medium.n_detuning);
  const DensityMatrix4 seed = make_seed_state(medium.alpha_sq, medium.beta_sq);
  const double dt = grid.dt();
  const double dz = grid.dz();
  const double mu = medium.mu;
  const int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
  auto respond = [&](const FieldMatrix& f) {
    return medium_response(f, rule, seed, dt, cfg.stability_policy, threads);
  };

  PropagationResult out;
  out.grid = grid;
  out.min_population = seed.diagonal().real().minCoeff();
  out.max_population = seed.diagonal().real().maxCoeff();

  FieldSnapshot current(0.0, grid.n_t);
  current.omega = initial.omega;
  MediumResponse response;
  try {
    response = respond(current.omega);
  } catch (const NumericalError& e) {
    throw NumericalError(e.what(), 0.0);
  }
  record(out, current, response);
  out.snapshots.push_back(current);
  double next_snapshot = cfg.snapshot_every > 0.0 ? cfg.snapshot_every : grid.z_max;
  int next_log_decile = 1;

  for (int k = 0; k < grid.n_z; ++k) {
    const double z_next = grid.depth(k + 1);
    FieldMatrix slope = maxwell_rhs(response.coherences, mu);
    FieldMatrix advanced = current.omega + dz * slope;
    try {
      if (cfg.scheme == ZScheme::heun) {
        check_finite(advanced, grid, z_next, current.z);
        const MediumResponse predicted = respond(advanced);
        slope += maxwell_rhs(predicted.coherences, mu);
        advanced = current.omega + (0.5 * dz) * slope;
      }
      check_finite(advanced, grid, z_next, current.z);
      current.omega = std::move(advanced);
      current.z = z_next;
      response = respond(current.omega);
    } catch (const NumericalError& e) {
      throw NumericalError(e.what(), std::isnan(e.last_good_z()) ? grid.depth(k) : e.last_good_z());
    }
    record(out, current, response);

    const bool last = k + 1 == grid.n_z;
    if (last || z_next >= next_snapshot - 1e-9 * dz) {
      out.snapshots.push_back(current);
      while (next_snapshot <= z_next + 1e-9 * dz) next_snapshot += cfg.snapshot_every > 0.0 ? cfg.snapshot_every : grid.z_max;
    }
    if (cfg.log_progress && 10 * (k + 1) >= next_log_decile * grid.n_z) {
      const AreaRecord& rec = out.area_records.back();
      std::cerr << "z = " << z_next << " (" << 10 * next_log_decile << "%)  theta_T/pi = "
                << rec.theta_total / 3.141592653589793 << '\n';
      while (10 * (k + 1) >= next_log_decile * grid.n_z) ++next_log_decile;
    }
  }
  return out;
}

double commutator_consistency_check(const FieldSnapshot& before, const FieldSnapshot& after,
                                    std::span<const DensityMatrix4> averaged_rho, double mu) {
  if (before.size() != after.size() || static_cast<std::size_t>(before.size()) != averaged_rho.size()) {
    throw DomainError("commutator check needs snapshots and averaged states on the same grid");
  }
  const double dz = after.z - before.z;
  if (!(dz > 0.0)) throw DomainError("commutator check needs after.z > before.z");
  DensityMatrix4 w = DensityMatrix4::Zero();
  w(2, 2) = Complex(0.0, 1.0);
  w(3, 3) = Complex(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < before.size(); ++i) {
    // The detuning diagonal is Z-independent and cancels in the difference.
    const DensityMatrix4 dh_dz =
        (build_hamiltonian<double>(after.at(i), 0.0) - build_hamiltonian<double>(before.at(i), 0.0)) / dz;
    const DensityMatrix4& rho = averaged_rho[i];
    const DensityMatrix4 rhs = -0.5 * mu * (w * rho - rho * w);
    worst = std::max(worst, (dh_dz - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace mbx4
