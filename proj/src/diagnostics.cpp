#include "mbx4/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mbx4/errors.hpp"

namespace mbx4 {

// ---- areas -----------------------------------------------------------------

AreaRecord total_areas(AreaRecord record) {
  const auto& th = record.theta;
  record.theta_1 = std::hypot(th[0], th[2]);
  record.theta_2 = std::hypot(th[1], th[3]);
  record.theta_total = std::hypot(record.theta_1, record.theta_2);
  return record;
}

Complex integrate_envelope(const Eigen::Ref<const Eigen::VectorXcd>& envelope, double dt) {
  const Eigen::Index n = envelope.size();
  if (n < 2) return Complex(0.0, 0.0);
  return dt * (envelope.sum() - 0.5 * (envelope(0) + envelope(n - 1)));
}

double pulse_area(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid) {
  return std::abs(integrate_envelope(envelope, grid.dt()));
}

double magnitude_area(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid) {
  const Eigen::Index n = envelope.size();
  if (n < 2) return 0.0;
  const Eigen::ArrayXd mag = envelope.cwiseAbs();
  return grid.dt() * (mag.sum() - 0.5 * (mag(0) + mag(n - 1)));
}

AreaRecord snapshot_areas(const FieldSnapshot& snapshot, const RetardedGrid& grid) {
  AreaRecord rec;
  rec.z = snapshot.z;
  for (Channel ch : kChannels) rec.theta[index(ch)] = pulse_area(snapshot.channel(ch), grid);
  return total_areas(rec);
}

// ---- sech fitting ----------------------------------------------------------

double SechFit::area() const { return std::numbers::pi * amplitude * width; }

namespace {

double sech(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

// Linear interpolation of the half-maximum crossing walking away from `peak` in direction `step`.
std::optional<double> half_max_crossing(const Eigen::ArrayXd& y, const Eigen::VectorXd& t, int peak, int step) {
  const double half = 0.5 * y(peak);
  for (int i = peak; i + step >= 0 && i + step < y.size(); i += step) {
    const int j = i + step;
    if (y(j) <= half) {
      const double frac = (y(i) - half) / (y(i) - y(j));
      return t(i) + frac * (t(j) - t(i));
    }
  }
  return std::nullopt;
}

}  // namespace

SechFit fit_sech(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid) {
  const int n = static_cast<int>(envelope.size());
  if (n < 5) throw DiagnosticError("sech fit needs at least five samples");
  const Eigen::ArrayXd y = envelope.cwiseAbs();
  const Eigen::VectorXd t = grid.times();
  Eigen::Index imax = 0;
  const double ypk = y.maxCoeff(&imax);
  if (!(ypk > 0.0)) throw DiagnosticError("sech fit of an all-zero envelope");

  double second = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    if (i != imax && y(i) > y(i - 1) && y(i) >= y(i + 1)) second = std::max(second, y(i));
  }
  if (5.0 * second > ypk) throw DiagnosticError("sech fit: envelope has more than one dominant peak");

  std::vector<int> region;
  for (int i = 0; i < n; ++i) {
    if (y(i) > 0.01 * ypk) region.push_back(i);
  }
  const int m = static_cast<int>(region.size());
  if (m < 4) throw DiagnosticError("sech fit: peak is not resolved by the grid");

  const Peak pk = find_peak(envelope, grid);
  const auto left = half_max_crossing(y, t, static_cast<int>(imax), -1);
  const auto right = half_max_crossing(y, t, static_cast<int>(imax), +1);
  double fwhm = 0.0;
  if (left && right) {
    fwhm = *right - *left;
  } else if (left || right) {
    fwhm = 2.0 * std::abs((left ? *left : *right) - pk.time);
  } else {
    fwhm = grid.t_max - grid.t_min;
  }
  Eigen::Vector3d p(pk.amplitude, std::max(fwhm, grid.dt()) / (2.0 * std::acosh(2.0)), pk.time);

  auto residuals = [&](const Eigen::Vector3d& q, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(m);
    if (jac) jac->resize(m, 3);
    for (int k = 0; k < m; ++k) {
      const int i = region[k];
      const double x = (t(i) - q(2)) / q(1);
      const double s = sech(x);
      r(k) = (q(0) * s - y(i)) / ypk;
      if (jac) {
        const double st = q(0) * s * std::tanh(x) / q(1);
        (*jac)(k, 0) = s / ypk;
        (*jac)(k, 1) = st * x / ypk;
        (*jac)(k, 2) = st / ypk;
      }
    }
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals(p, r, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < 500 && !converged; ++it) {
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d grad = jac.transpose() * r;
    bool accepted = false;
    while (!accepted && lambda < 1e16) {
      Eigen::Matrix3d lhs = jtj;
      lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::Vector3d delta = lhs.ldlt().solve(-grad);
      Eigen::Vector3d trial = p + delta;
      if (!(trial(1) > 0.0) || !trial.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      Eigen::VectorXd r_trial;
      residuals(trial, r_trial, nullptr);
      const double trial_cost = r_trial.squaredNorm();
      if (trial_cost <= cost) {
        const double step = (delta.array().abs() / (p.array().abs() + 1e-300)).maxCoeff();
        const double drop = cost - trial_cost;
        p = trial;
        cost = trial_cost;
        residuals(p, r, &jac);
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (step < 1e-13 || drop <= 1e-15 * cost || cost < 1e-32) converged = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) converged = true;  // no descent direction left: at a minimum to rounding
  }
  if (!converged) throw DiagnosticError("sech fit did not converge");

  SechFit fit;
  fit.amplitude = p(0);
  fit.width = p(1);
  fit.center = p(2);
  fit.rms_residual = std::sqrt(cost / m);
  fit.iterations = it;
  return fit;
}

// ---- peaks -----------------------------------------------------------------

Peak find_peak(const Eigen::Ref<const Eigen::VectorXcd>& envelope, const RetardedGrid& grid) {
  const Eigen::ArrayXd y = envelope.cwiseAbs();
  Eigen::Index i = 0;
  const double top = y.maxCoeff(&i);
  Peak pk{grid.time(static_cast<int>(i)), top};
  if (i == 0 || i + 1 == y.size()) return pk;
  const double ym = y(i - 1);
  const double yp = y(i + 1);
  const double curvature = ym - 2.0 * top + yp;
  if (curvature >= 0.0) return pk;
  const double offset = 0.5 * (ym - yp) / curvature;
  pk.time += offset * grid.dt();
  pk.amplitude = top - 0.25 * (ym - yp) * offset;
  return pk;
}

PeakTrack peak_track(std::span<const FieldSnapshot> snapshots, const RetardedGrid& grid) {
  PeakTrack track;
  for (const FieldSnapshot& s : snapshots) {
    track.z.push_back(s.z);
    for (Channel ch : kChannels) {
      const Peak pk = find_peak(s.channel(ch), grid);
      track.time[index(ch)].push_back(pk.time);
      track.amplitude[index(ch)].push_back(pk.amplitude);
    }
  }
  return track;
}

double drift_rate(const PeakTrack& track, Channel ch, double z_lo, double z_hi) {
  double global = 0.0;
  for (const auto& amps : track.amplitude) {
    for (double a : amps) global = std::max(global, a);
  }
  const auto& times = track.time[index(ch)];
  const auto& amps = track.amplitude[index(ch)];
  double sz = 0.0, st = 0.0, szz = 0.0, szt = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < track.z.size(); ++k) {
    const double z = track.z[k];
    if (z < z_lo || z > z_hi || !(amps[k] >= 0.01 * global) || global == 0.0) continue;
    sz += z;
    st += times[k];
    szz += z * z;
    szt += z * times[k];
    ++count;
  }
  if (count < 10) {
    throw DiagnosticError(std::string("channel ") + channel_name(ch) + " has fewer than 10 trackable peaks in window");
  }
  const double denom = count * szz - sz * sz;
  if (denom <= 0.0) throw DiagnosticError("degenerate depth window for peak tracking");
  return (count * szt - sz * st) / denom;
}

std::array<std::optional<double>, 4> track_peaks(const PropagationResult& result) {
  std::array<std::optional<double>, 4> out;
  const auto& zs = result.peak_tracks.z;
  if (zs.empty()) return out;
  const double z0 = zs.front();
  const double z1 = zs.back();
  const double window = 0.2 * (z1 - z0);
  for (Channel ch : kChannels) {
    const bool input = ch == Channel::a || ch == Channel::b;
    try {
      out[index(ch)] = input ? drift_rate(result.peak_tracks, ch, z0, z0 + window)
                             : drift_rate(result.peak_tracks, ch, z1 - window, z1);
    } catch (const DiagnosticError&) {
    }
  }
  return out;
}

double lab_frame_width(double temporal_width, double drift) { return temporal_width / (1.0 + drift); }

double energy_balance_error(const PropagationResult& result, double mu) {
  const auto& e = result.field_energy;
  const auto& n = result.excited_at_t_max;
  if (e.empty() || e.front() == 0.0) return 0.0;
  double absorbed = 0.0;
  double worst = 0.0;
  for (std::size_t k = 1; k < e.size(); ++k) {
    const double dz = result.area_records[k].z - result.area_records[k - 1].z;
    absorbed += 0.5 * dz * (n[k] + n[k - 1]);
    worst = std::max(worst, std::abs(e[k] + 2.0 * mu * absorbed - e.front()));
  }
  return worst / e.front();
}

}  // namespace mbx4
