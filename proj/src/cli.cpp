#include "mbx4/cli.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbx4/acceptance.hpp"
#include "mbx4/analytic.hpp"
#include "mbx4/config.hpp"
#include "mbx4/errors.hpp"
#include "mbx4/io.hpp"
#include "mbx4/solver.hpp"

namespace mbx4 {

namespace {

namespace fs = std::filesystem;

struct RunOptions {
  std::string config;
  std::string out_dir = "out";
  std::string resolution = "default";
  bool quiet = false;
};

RunConfig load_for_run(const RunOptions& opt, nlohmann::json& canonical) {
  RunConfig cfg = apply_resolution(load_config(opt.config), parse_resolution(opt.resolution));
  canonical = to_json(cfg);
  return cfg;
}

void finish_manifest(RunManifest& m, const fs::path& dir) {
  m.finished_at = utc_timestamp();
  fs::create_directories(dir);
  write_file(dir, "manifest.json", [&](std::ostream& os) { os << to_json(m).dump(2) << '\n'; });
}

int cmd_analytic(const RunOptions& opt, std::ostream& out) {
  RunManifest manifest;
  manifest.command = "analytic";
  manifest.started_at = utc_timestamp();
  nlohmann::json canonical;
  const RunConfig cfg = load_for_run(opt, canonical);
  manifest.config_hash = config_hash(canonical);
  const SolitonParams<double> p = soliton_params(cfg);
  std::vector<double> zs = cfg.analytic->z_values;
  for (double kz : cfg.analytic->kappa_z_values) zs.push_back(kz / p.kappa);
  if (zs.empty()) throw ConfigError("missing required key 'analytic.z_values'");
  const RetardedGrid& grid = cfg.grid;
  grid.validate();

  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  std::vector<AreaRecord> areas;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const FieldSnapshot snap = analytic_fields(zs[k], grid, p);
    const std::string name = fields_file_name(static_cast<int>(k));
    write_file(dir, name, [&](std::ostream& os) { write_fields_csv(os, snap, grid); });
    manifest.outputs.push_back(name);
    areas.push_back(analytic_areas(zs[k], p));
  }
  write_file(dir, "areas.csv", [&](std::ostream& os) { write_areas_csv(os, areas); });
  manifest.outputs.push_back("areas.csv");
  manifest.n_t = grid.n_t;
  manifest.n_z = static_cast<int>(zs.size());
  manifest.n_detuning = cfg.medium ? cfg.medium->n_detuning : 0;
  manifest.outputs.push_back("manifest.json");
  finish_manifest(manifest, dir);
  out << "wrote " << zs.size() << " analytic snapshots to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_simulate(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.started_at = utc_timestamp();
  nlohmann::json canonical;
  RunConfig cfg = load_for_run(opt, canonical);
  manifest.config_hash = config_hash(canonical);
  const RetardedGrid grid = simulation_grid(cfg);
  cfg.medium->validate();
  const FieldSnapshot initial = initial_fields(cfg);
  manifest.n_t = grid.n_t;
  manifest.n_z = grid.n_z;
  manifest.n_detuning = cfg.medium->n_detuning;
  cfg.solver.log_progress = !opt.quiet;

  const fs::path dir(opt.out_dir);
  PropagationResult result;
  try {
    result = propagate(initial, *cfg.medium, grid, cfg.solver);
  } catch (const NumericalError& e) {
    manifest.status = "numerical_abort";
    if (std::isfinite(e.last_good_z())) manifest.last_good_z = e.last_good_z();
    manifest.message = e.what();
    manifest.outputs.push_back("manifest.json");
    finish_manifest(manifest, dir);
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }

  fs::create_directories(dir);
  if (cfg.output.write_fields) {
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
      const std::string name = fields_file_name(static_cast<int>(k));
      write_file(dir, name, [&](std::ostream& os) { write_fields_csv(os, result.snapshots[k], grid); });
      manifest.outputs.push_back(name);
    }
  }
  write_file(dir, "areas.csv", [&](std::ostream& os) { write_areas_csv(os, result.area_records); });
  write_file(dir, "magnitude_areas.csv",
             [&](std::ostream& os) { write_magnitude_areas_csv(os, result.area_records, result.magnitude_areas); });
  write_file(dir, "peaks.csv", [&](std::ostream& os) { write_peaks_csv(os, result.peak_tracks); });
  write_file(dir, "fits.csv", [&](std::ostream& os) { write_fits_csv(os, result.snapshots, grid); });
  for (const char* name : {"areas.csv", "magnitude_areas.csv", "peaks.csv", "fits.csv", "manifest.json"}) {
    manifest.outputs.push_back(name);
  }
  finish_manifest(manifest, dir);

  const AreaRecord& last = result.area_records.back();
  out << "z_max = " << last.z << ": theta_a..d = " << last.theta[0] << ", " << last.theta[1] << ", " << last.theta[2]
      << ", " << last.theta[3] << "; theta_T = " << last.theta_total << '\n';
  out << "wrote " << manifest.outputs.size() << " files to " << dir.string() << '\n';
  return kExitOk;
}

struct ValidateOptions {
  bool list = false;
  std::vector<int> only;
  std::string fault = "none";
};

int cmd_validate(const ValidateOptions& opt, std::ostream& out) {
  using namespace acceptance;
  if (opt.list) {
    for (const Criterion& c : criteria()) {
      out << c.id << "  " << c.title << " (budget " << c.budget_seconds << " s)\n";
    }
    return kExitOk;
  }
  for (int id : opt.only) {
    if (id < 1 || id > static_cast<int>(criteria().size())) {
      throw ConfigError("unknown criterion " + std::to_string(id));
    }
  }
  Options options;
  options.fault = parse_fault(opt.fault);
  const std::vector<Report> reports = run_suite(opt.only, options, out);
  std::string failing;
  int passed = 0;
  for (const Report& r : reports) {
    if (r.passed()) {
      ++passed;
    } else {
      failing += (failing.empty() ? "" : ", ") + std::to_string(r.id);
    }
  }
  out << passed << "/" << reports.size() << " criteria passed";
  if (!failing.empty()) out << "; failing: " << failing;
  out << '\n';
  return failing.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Four-pulse Maxwell-Bloch soliton solver"};
  app.require_subcommand(1);

  RunOptions analytic_opt;
  CLI::App* analytic = app.add_subcommand("analytic", "Evaluate the closed-form soliton at the configured depths");
  analytic->add_option("--config", analytic_opt.config, "JSON run configuration")->required();
  analytic->add_option("--out", analytic_opt.out_dir, "Output directory");
  analytic->add_option("--resolution", analytic_opt.resolution, "low, default or high")
      ->check(CLI::IsMember({"low", "default", "high"}));

  RunOptions simulate_opt;
  CLI::App* simulate = app.add_subcommand("simulate", "Propagate the configured input through the medium");
  simulate->add_option("--config", simulate_opt.config, "JSON run configuration")->required();
  simulate->add_option("--out", simulate_opt.out_dir, "Output directory");
  simulate->add_option("--resolution", simulate_opt.resolution, "low, default or high")
      ->check(CLI::IsMember({"low", "default", "high"}));
  simulate->add_flag("--quiet", simulate_opt.quiet, "Suppress the per-decile progress log");

  ValidateOptions validate_opt;
  CLI::App* validate = app.add_subcommand("validate", "Run the acceptance suite");
  validate->add_flag("--list", validate_opt.list, "List the criteria without running them");
  validate->add_option("--only", validate_opt.only, "Run only these criterion numbers");
  validate->add_option("--inject-fault", validate_opt.fault, "Deliberate defect: none or kappa")
      ->check(CLI::IsMember({"none", "kappa"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (analytic->parsed()) return cmd_analytic(analytic_opt, out);
    if (simulate->parsed()) return cmd_simulate(simulate_opt, out, err);
    return cmd_validate(validate_opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace mbx4
