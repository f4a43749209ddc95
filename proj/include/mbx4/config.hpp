#pragma once

// JSON run configuration: sections grid, medium, pulses[], input, analytic,
// solver, output. Schema problems raise ConfigError; values outside their
// domain raise DomainError once the run is assembled.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbx4/analytic.hpp"
#include "mbx4/core.hpp"
#include "mbx4/solver.hpp"

namespace mbx4 {

enum class InputSource { pulses, analytic };
enum class Resolution { low, standard, high };

Resolution parse_resolution(std::string_view name);

struct AnalyticSection {
  double tau = 1.0;
  double u = 0.0;
  std::optional<double> alpha_sq;  // default: medium.alpha_sq
  std::optional<double> beta_sq;
  std::optional<double> kappa;     // default: kappa_average over the medium's line
  double entry_kappa_z = -8.0;     // analytic depth (in units of 1/kappa) injected at z = 0
  std::vector<double> z_values;
  std::vector<double> kappa_z_values;
};

struct OutputSection {
  bool write_fields = true;
};

struct RunConfig {
  RetardedGrid grid;
  std::optional<int> n_z;  // grid.n_z once present; required for simulate
  std::optional<MediumSpec> medium;
  std::vector<PulseSpec> pulses;
  InputSource input = InputSource::pulses;
  std::optional<AnalyticSection> analytic;
  SolverConfig solver;
  OutputSection output;
  std::uint64_t seed = 0;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// low halves n_t - 1 and n_z, high doubles them; standard leaves the config as written.
RunConfig apply_resolution(RunConfig cfg, Resolution res);

/// Soliton parameters of the analytic section, resolving defaults from the medium.
SolitonParams<double> soliton_params(const RunConfig& cfg);

/// Envelopes entering the medium: synthesized pulses or the analytic fields at entry_kappa_z / kappa.
FieldSnapshot initial_fields(const RunConfig& cfg);

/// Grid with z_max taken from the medium length and n_z from the config.
RetardedGrid simulation_grid(const RunConfig& cfg);

}  // namespace mbx4
