#include "mbx4/bloch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <string>
#include <thread>

#include "mbx4/errors.hpp"

namespace mbx4 {

namespace {

constexpr double kStabilityLimit = 0.5;

std::atomic<bool> g_stability_warned{false};

double max_detuning(const Eigen::VectorXd& nodes) { return nodes.size() ? nodes.cwiseAbs().maxCoeff() : 0.0; }

DetuningEnsemble advance(DetuningEnsemble ensemble, const Rabi4& f0, const Rabi4& fmid, const Rabi4& f1, double dt,
                         StabilityPolicy policy) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double max_rabi = std::max({f0.cwiseAbs().maxCoeff(), fmid.cwiseAbs().maxCoeff(), f1.cwiseAbs().maxCoeff()});
  check_stability(dt, max_rabi, max_detuning(ensemble.nodes), policy);
  for (int k = 0; k < ensemble.size(); ++k) {
    ensemble.states[k] = rk4_step<double>(ensemble.states[k], f0, fmid, f1, ensemble.nodes(k), dt);
  }
  return ensemble;
}

struct NodeTrace {
  FieldMatrix coherences;
  std::vector<DensityMatrix4> states;
  double final_excited = 0.0;
  double min_pop = 0.0;
  double max_pop = 0.0;
};

NodeTrace integrate_node(const FieldMatrix& fields, const FieldMatrix& mids, const DensityMatrix4& seed, double delta,
                         double dt, bool keep_states) {
  const int n_t = static_cast<int>(fields.rows());
  NodeTrace trace;
  trace.coherences.resize(n_t, 4);
  if (keep_states) trace.states.resize(n_t);
  DensityMatrix4 rho = seed;
  double lo = rho.diagonal().real().minCoeff();
  double hi = rho.diagonal().real().maxCoeff();
  // A diagonal state under an identically zero field does not move, so the
  // field-free lead-in of the window is skipped exactly.
  DensityMatrix4 off = seed;
  off.diagonal().setZero();
  bool quiet = off.isZero(0.0);
  for (int i = 0;; ++i) {
    for (int ch = 0; ch < 4; ++ch) {
      const auto [r, c] = kCoherenceIndex[ch];
      trace.coherences(i, ch) = rho(r, c);
    }
    if (keep_states) trace.states[i] = rho;
    if (i == n_t - 1) break;
    if (quiet) {
      quiet = fields.row(i).isZero(0.0) && mids.row(i).isZero(0.0) && fields.row(i + 1).isZero(0.0);
      if (quiet) continue;
    }
    rho = rk4_step<double>(rho, fields.row(i).transpose(), mids.row(i).transpose(), fields.row(i + 1).transpose(),
                           delta, dt);
    const Eigen::Vector4d pops = rho.diagonal().real();
    lo = std::min(lo, pops.minCoeff());
    hi = std::max(hi, pops.maxCoeff());
  }
  trace.final_excited = rho(2, 2).real() + rho(3, 3).real();
  trace.min_pop = lo;
  trace.max_pop = hi;
  return trace;
}

}  // namespace

DetuningEnsemble DetuningEnsemble::uniform(const DetuningRule& rule, const DensityMatrix4& state) {
  DetuningEnsemble e;
  e.nodes = rule.detunings;
  e.weights = rule.weights;
  e.states.assign(rule.detunings.size(), state);
  return e;
}

DetuningEnsemble DetuningEnsemble::seeded(const MediumSpec& medium) {
  return uniform(detuning_rule(medium.t2_star, medium.n_detuning),
                 make_seed_state(medium.alpha_sq, medium.beta_sq));
}

void DetuningEnsemble::validate() const {
  if (nodes.size() != weights.size() || static_cast<std::size_t>(nodes.size()) != states.size()) {
    throw DomainError("ensemble nodes, weights and states must have equal length");
  }
  if (nodes.size() == 0) throw DomainError("ensemble is empty");
  if ((weights.array() < 0.0).any()) throw DomainError("ensemble weights must be non-negative");
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw DomainError("ensemble weights must sum to 1");
}

DetuningEnsemble step_ensemble(DetuningEnsemble ensemble, const Rabi4& fields_t, const Rabi4& fields_t_dt, double dt,
                               StabilityPolicy policy) {
  const Rabi4 mid = 0.5 * (fields_t + fields_t_dt);
  return advance(std::move(ensemble), fields_t, mid, fields_t_dt, dt, policy);
}

DetuningEnsemble step_ensemble(DetuningEnsemble ensemble, const Rabi4& fields_t, const Rabi4& fields_mid,
                               const Rabi4& fields_t_dt, double dt, StabilityPolicy policy) {
  return advance(std::move(ensemble), fields_t, fields_mid, fields_t_dt, dt, policy);
}

Rabi4 averaged_coherences(const DetuningEnsemble& ensemble) {
  Rabi4 out = Rabi4::Zero();
  for (int k = 0; k < ensemble.size(); ++k) {
    for (int ch = 0; ch < 4; ++ch) {
      const auto [r, c] = kCoherenceIndex[ch];
      out(ch) += ensemble.weights(k) * ensemble.states[k](r, c);
    }
  }
  return out;
}

DensityMatrix4 averaged_density(const DetuningEnsemble& ensemble) {
  DensityMatrix4 out = DensityMatrix4::Zero();
  for (int k = 0; k < ensemble.size(); ++k) out += ensemble.weights(k) * ensemble.states[k];
  return out;
}

FieldMatrix midpoint_fields(const FieldMatrix& f) {
  const Eigen::Index n = f.rows();
  if (n < 2) return FieldMatrix(0, 4);
  FieldMatrix mid(n - 1, 4);
  if (n < 4) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) mid.row(i) = 0.5 * (f.row(i) + f.row(i + 1));
    return mid;
  }
  mid.row(0) = (3.0 * f.row(0) + 6.0 * f.row(1) - f.row(2)) / 8.0;
  for (Eigen::Index i = 1; i + 2 < n; ++i) {
    mid.row(i) = (-f.row(i - 1) + 9.0 * f.row(i) + 9.0 * f.row(i + 1) - f.row(i + 2)) / 16.0;
  }
  mid.row(n - 2) = (-f.row(n - 3) + 6.0 * f.row(n - 2) + 3.0 * f.row(n - 1)) / 8.0;
  return mid;
}

void check_stability(double dt, double max_rabi, double max_detuning, StabilityPolicy policy) {
  const double product = dt * std::max(max_rabi, max_detuning);
  if (product <= kStabilityLimit) return;
  const std::string msg = "stability guard: dt * max(|Omega|, |Delta|) = " + std::to_string(product) + " exceeds " +
                          std::to_string(kStabilityLimit);
  if (policy == StabilityPolicy::abort) {
    throw NumericalError(msg, std::numeric_limits<double>::quiet_NaN());
  }
  if (!g_stability_warned.exchange(true)) std::cerr << "warning: " << msg << '\n';
}

int default_thread_count() {
  int requested = 0;
  if (const char* env = std::getenv("MBX4_THREADS")) requested = std::atoi(env);
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

MediumResponse medium_response(const FieldMatrix& fields, const DetuningRule& rule, const DensityMatrix4& seed,
                               double dt, StabilityPolicy policy, int threads, bool keep_density) {
  const int n_t = static_cast<int>(fields.rows());
  const int n_nodes = static_cast<int>(rule.detunings.size());
  if (n_t < 2) throw DomainError("medium response needs at least two time samples");
  check_stability(dt, fields.cwiseAbs().maxCoeff(), max_detuning(rule.detunings), policy);

  const FieldMatrix mids = midpoint_fields(fields);
  std::vector<NodeTrace> traces(n_nodes);
  const int workers = std::clamp(threads > 0 ? threads : default_thread_count(), 1, std::max(1, n_nodes));
  auto run_range = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) {
      traces[k] = integrate_node(fields, mids, seed, rule.detunings(k), dt, keep_density);
    }
  };
  if (workers == 1) {
    run_range(0, n_nodes);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_nodes + workers - 1) / workers;
    for (int begin = 0; begin < n_nodes; begin += chunk) {
      pool.emplace_back(run_range, begin, std::min(n_nodes, begin + chunk));
    }
    for (auto& t : pool) t.join();
  }

  MediumResponse out;
  out.coherences = FieldMatrix::Zero(n_t, 4);
  out.min_population = std::numeric_limits<double>::infinity();
  out.max_population = -std::numeric_limits<double>::infinity();
  if (keep_density) out.density.assign(n_t, DensityMatrix4::Zero());
  for (int k = 0; k < n_nodes; ++k) {
    const double w = rule.weights(k);
    out.coherences += w * traces[k].coherences;
    out.final_excited_population += w * traces[k].final_excited;
    out.min_population = std::min(out.min_population, traces[k].min_pop);
    out.max_population = std::max(out.max_population, traces[k].max_pop);
    if (keep_density) {
      for (int i = 0; i < n_t; ++i) out.density[i] += w * traces[k].states[i];
    }
  }
  return out;
}

}  // namespace mbx4
