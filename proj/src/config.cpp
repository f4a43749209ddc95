#include "mbx4/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "mbx4/errors.hpp"

namespace mbx4 {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("section '" + path + "' must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing required key '" + join(path, key) + "'");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError("key '" + where + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError("key '" + where + "' must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError("key '" + where + "' must be a string");
  return v.get<std::string>();
}

double number(const json& obj, const std::string& key, const std::string& path) {
  return as_number(require(obj, key, path), join(path, key));
}

std::optional<double> optional_number(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return as_number(*it, join(path, key));
}

std::vector<double> number_list(const json& obj, const std::string& key, const std::string& path) {
  std::vector<double> out;
  const auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw ConfigError("key '" + join(path, key) + "' must be an array of numbers");
  for (const json& v : *it) out.push_back(as_number(v, join(path, key)));
  return out;
}

RetardedGrid parse_grid(const json& g, std::optional<int>& n_z) {
  RetardedGrid grid;
  grid.t_min = number(g, "t_min", "grid");
  grid.t_max = number(g, "t_max", "grid");
  grid.n_t = as_int(require(g, "n_t", "grid"), "grid.n_t");
  if (g.contains("n_z")) {
    n_z = as_int(g.at("n_z"), "grid.n_z");
    grid.n_z = *n_z;
  }
  return grid;
}

MediumSpec parse_medium(const json& m) {
  MediumSpec medium;
  medium.mu = number(m, "mu", "medium");
  const json& line = require(m, "t2_star", "medium");
  if (line.is_string()) {
    if (line.get<std::string>() != "sharp") throw ConfigError("key 'medium.t2_star' must be a number or \"sharp\"");
    medium.t2_star.reset();
  } else {
    medium.t2_star = as_number(line, "medium.t2_star");
  }
  medium.n_detuning = m.contains("n_detuning") ? as_int(m.at("n_detuning"), "medium.n_detuning") : 1;
  medium.alpha_sq = number(m, "alpha_sq", "medium");
  medium.beta_sq = number(m, "beta_sq", "medium");
  medium.length = number(m, "length", "medium");
  return medium;
}

PulseSpec parse_pulse(const json& p, const std::string& path) {
  PulseSpec pulse;
  const std::string channel = as_string(require(p, "channel", path), join(path, "channel"));
  const std::string shape = as_string(require(p, "shape", path), join(path, "shape"));
  try {
    pulse.channel = parse_channel(channel);
    pulse.shape = parse_pulse_shape(shape);
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (p.contains("area")) {
    pulse.area = as_number(p.at("area"), join(path, "area"));
  } else if (p.contains("area_over_pi")) {
    pulse.area = std::numbers::pi * as_number(p.at("area_over_pi"), join(path, "area_over_pi"));
  } else {
    throw ConfigError("missing required key '" + join(path, "area") + "'");
  }
  pulse.width = number(p, "width", path);
  pulse.center = number(p, "center", path);
  return pulse;
}

AnalyticSection parse_analytic(const json& a) {
  AnalyticSection s;
  s.tau = number(a, "tau", "analytic");
  s.u = number(a, "u", "analytic");
  s.alpha_sq = optional_number(a, "alpha_sq", "analytic");
  s.beta_sq = optional_number(a, "beta_sq", "analytic");
  s.kappa = optional_number(a, "kappa", "analytic");
  if (auto entry = optional_number(a, "entry_kappa_z", "analytic")) s.entry_kappa_z = *entry;
  s.z_values = number_list(a, "z_values", "analytic");
  s.kappa_z_values = number_list(a, "kappa_z_values", "analytic");
  return s;
}

SolverConfig parse_solver(const json& s) {
  SolverConfig cfg;
  if (s.contains("scheme")) {
    const std::string scheme = as_string(s.at("scheme"), "solver.scheme");
    if (scheme == "heun") {
      cfg.scheme = ZScheme::heun;
    } else if (scheme == "euler") {
      cfg.scheme = ZScheme::euler;
    } else {
      throw ConfigError("key 'solver.scheme' must be \"heun\" or \"euler\"");
    }
  }
  if (auto every = optional_number(s, "snapshot_every", "solver")) cfg.snapshot_every = *every;
  if (s.contains("stability_policy")) {
    const std::string policy = as_string(s.at("stability_policy"), "solver.stability_policy");
    if (policy == "warn") {
      cfg.stability_policy = StabilityPolicy::warn;
    } else if (policy == "abort") {
      cfg.stability_policy = StabilityPolicy::abort;
    } else {
      throw ConfigError("key 'solver.stability_policy' must be \"warn\" or \"abort\"");
    }
  }
  return cfg;
}

}  // namespace

Resolution parse_resolution(std::string_view name) {
  if (name == "low") return Resolution::low;
  if (name == "default") return Resolution::standard;
  if (name == "high") return Resolution::high;
  throw ConfigError("resolution must be one of low, default, high");
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig cfg;
  cfg.grid = parse_grid(require(doc, "grid", ""), cfg.n_z);
  if (doc.contains("medium")) {
    cfg.medium = parse_medium(doc.at("medium"));
    cfg.grid.z_max = cfg.medium->length;
  }
  if (doc.contains("pulses")) {
    const json& list = doc.at("pulses");
    if (!list.is_array()) throw ConfigError("key 'pulses' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.pulses.push_back(parse_pulse(list[i], "pulses[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("input")) {
    const std::string src = as_string(doc.at("input"), "input");
    if (src == "pulses") {
      cfg.input = InputSource::pulses;
    } else if (src == "analytic") {
      cfg.input = InputSource::analytic;
    } else {
      throw ConfigError("key 'input' must be \"pulses\" or \"analytic\"");
    }
  }
  if (doc.contains("analytic")) cfg.analytic = parse_analytic(doc.at("analytic"));
  if (doc.contains("solver")) cfg.solver = parse_solver(doc.at("solver"));
  if (doc.contains("output")) {
    const json& out = doc.at("output");
    if (out.contains("write_fields")) {
      if (!out.at("write_fields").is_boolean()) throw ConfigError("key 'output.write_fields' must be a boolean");
      cfg.output.write_fields = out.at("write_fields").get<bool>();
    }
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("key 'seed' must be a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["grid"] = {{"t_min", cfg.grid.t_min}, {"t_max", cfg.grid.t_max}, {"n_t", cfg.grid.n_t}};
  if (cfg.n_z) doc["grid"]["n_z"] = *cfg.n_z;
  if (cfg.medium) {
    const MediumSpec& m = *cfg.medium;
    doc["medium"] = {{"mu", m.mu},
                     {"n_detuning", m.n_detuning},
                     {"alpha_sq", m.alpha_sq},
                     {"beta_sq", m.beta_sq},
                     {"length", m.length}};
    if (m.t2_star) {
      doc["medium"]["t2_star"] = *m.t2_star;
    } else {
      doc["medium"]["t2_star"] = "sharp";
    }
  }
  doc["pulses"] = json::array();
  for (const PulseSpec& p : cfg.pulses) {
    doc["pulses"].push_back({{"channel", std::string(1, channel_name(p.channel))},
                             {"shape", to_string(p.shape)},
                             {"area", p.area},
                             {"width", p.width},
                             {"center", p.center}});
  }
  doc["input"] = cfg.input == InputSource::analytic ? "analytic" : "pulses";
  if (cfg.analytic) {
    const AnalyticSection& a = *cfg.analytic;
    json sec = {{"tau", a.tau},
                {"u", a.u},
                {"entry_kappa_z", a.entry_kappa_z},
                {"z_values", a.z_values},
                {"kappa_z_values", a.kappa_z_values}};
    if (a.alpha_sq) sec["alpha_sq"] = *a.alpha_sq;
    if (a.beta_sq) sec["beta_sq"] = *a.beta_sq;
    if (a.kappa) sec["kappa"] = *a.kappa;
    doc["analytic"] = sec;
  }
  doc["solver"] = {{"scheme", cfg.solver.scheme == ZScheme::heun ? "heun" : "euler"},
                   {"snapshot_every", cfg.solver.snapshot_every},
                   {"stability_policy", cfg.solver.stability_policy == StabilityPolicy::abort ? "abort" : "warn"}};
  doc["output"] = {{"write_fields", cfg.output.write_fields}};
  doc["seed"] = cfg.seed;
  return doc;
}

RunConfig apply_resolution(RunConfig cfg, Resolution res) {
  if (res == Resolution::standard) return cfg;
  auto scale = [res](int n) { return res == Resolution::high ? 2 * n : std::max(1, n / 2); };
  cfg.grid.n_t = scale(cfg.grid.n_t - 1) + 1;
  if (cfg.n_z) {
    cfg.n_z = scale(*cfg.n_z);
    cfg.grid.n_z = *cfg.n_z;
  }
  return cfg;
}

SolitonParams<double> soliton_params(const RunConfig& cfg) {
  if (!cfg.analytic) throw ConfigError("missing required key 'analytic'");
  const AnalyticSection& a = *cfg.analytic;
  SolitonParams<double> p;
  p.tau = a.tau;
  p.u = a.u;
  if (a.alpha_sq) {
    p.alpha_sq = *a.alpha_sq;
  } else if (cfg.medium) {
    p.alpha_sq = cfg.medium->alpha_sq;
  } else {
    throw ConfigError("missing required key 'analytic.alpha_sq'");
  }
  if (a.beta_sq) {
    p.beta_sq = *a.beta_sq;
  } else if (cfg.medium) {
    p.beta_sq = cfg.medium->beta_sq;
  } else {
    throw ConfigError("missing required key 'analytic.beta_sq'");
  }
  if (a.kappa) {
    p.kappa = *a.kappa;
  } else if (cfg.medium) {
    p.kappa = kappa_average(cfg.medium->mu, a.tau, cfg.medium->t2_star, cfg.medium->n_detuning);
  } else {
    throw ConfigError("missing required key 'analytic.kappa'");
  }
  p.validate();
  return p;
}

RetardedGrid simulation_grid(const RunConfig& cfg) {
  if (!cfg.medium) throw ConfigError("missing required key 'medium'");
  if (!cfg.n_z) throw ConfigError("missing required key 'grid.n_z'");
  RetardedGrid grid = cfg.grid;
  grid.z_max = cfg.medium->length;
  grid.n_z = *cfg.n_z;
  grid.validate();
  return grid;
}

FieldSnapshot initial_fields(const RunConfig& cfg) {
  cfg.grid.validate();
  if (cfg.input == InputSource::analytic) {
    const SolitonParams<double> p = soliton_params(cfg);
    FieldSnapshot snap = analytic_fields(cfg.analytic->entry_kappa_z / p.kappa, cfg.grid, p);
    snap.z = 0.0;
    return snap;
  }
  FieldSnapshot snap(0.0, cfg.grid.n_t);
  for (const PulseSpec& p : cfg.pulses) snap.channel(p.channel) += generate_pulse(p, cfg.grid);
  return snap;
}

}  // namespace mbx4
