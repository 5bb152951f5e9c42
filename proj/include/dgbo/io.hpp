#pragma once

// Config-file parsing and structured output: CSV series with fixed schemas,
// JSON run manifests, atomic file writes. Reruns with an identical config
// must produce byte-identical output, so all floats go through one %.17g
// formatter and manifests use insertion-ordered JSON.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dgbo/evolution.hpp"
#include "dgbo/grid.hpp"
#include "dgbo/ground_state.hpp"

namespace dgbo {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- key-value config ------------------------------------------------------

// Section-scoped key/value text:
//   [section]
//   key = value       # comment
// Returned keys are "section.key". Duplicate keys keep the last value.
inline std::map<std::string, std::string> parse_config_text(
    const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key '" +
                        key + "' outside any [section]");
    kv[section + "." + key] = value;
  }
  return kv;
}

inline std::map<std::string, std::string> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + s + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + s + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + s + "'");
}

}  // namespace detail

// ---- experiment configuration ----------------------------------------------

struct DataSpec {
  std::string kind = "gaussian";  // gaussian | derivative-of-gaussian |
                                  // bo-soliton | zero | file
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double speed = 1.0;  // bo-soliton
  std::string path;    // file
};

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "persistence",     "mean-threshold", "momentum-threshold",
      "two-time-momentum", "t-star",       "k-momentum",
      "estimate-probes", "identities",     "stein-table",
      "ground-state"};
  return ids;
}

struct ExperimentConfig {
  std::string experiment = "t-star";
  DispersionParams params{0.5, 1};
  int n = 2048;
  double box = 100.0;
  EvolutionConfig evolution;
  DataSpec data;
  std::uint64_t seed = 20260301ULL;
  std::string output_dir = ".";
};

// Builds an ExperimentConfig from parsed "section.key" pairs. Every key must
// be recognized; unknown keys are configuration errors, not warnings.
inline ExperimentConfig experiment_config_from_map(
    const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  double a = cfg.params.a;
  int k_power = cfg.params.k_power;
  for (const auto& [key, value] : kv) {
    if (key == "experiment.id") {
      cfg.experiment = value;
    } else if (key == "experiment.output_dir") {
      cfg.output_dir = value;
    } else if (key == "experiment.seed") {
      const long long s = detail::parse_int(key, value);
      if (s < 0) throw ConfigError("config key 'experiment.seed': negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "dispersion.a") {
      a = detail::parse_double(key, value);
    } else if (key == "dispersion.k") {
      k_power = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "grid.n") {
      cfg.n = static_cast<int>(detail::parse_int(key, value));
    } else if (key == "grid.L") {
      cfg.box = detail::parse_double(key, value);
    } else if (key == "evolution.dt") {
      cfg.evolution.dt = detail::parse_double(key, value);
    } else if (key == "evolution.t_end") {
      cfg.evolution.t_end = detail::parse_double(key, value);
    } else if (key == "evolution.snapshot_stride") {
      cfg.evolution.snapshot_stride =
          static_cast<int>(detail::parse_int(key, value));
    } else if (key == "evolution.integrator") {
      if (value == "etdrk4")
        cfg.evolution.integrator = Integrator::etdrk4;
      else if (value == "if-rk4")
        cfg.evolution.integrator = Integrator::if_rk4;
      else
        throw ConfigError("config key 'evolution.integrator': '" + value +
                          "' (expected etdrk4 | if-rk4)");
    } else if (key == "evolution.dealias") {
      if (value == "two-thirds")
        cfg.evolution.dealias = Dealias::two_thirds;
      else if (value == "none")
        cfg.evolution.dealias = Dealias::none;
      else
        throw ConfigError("config key 'evolution.dealias': '" + value +
                          "' (expected two-thirds | none)");
    } else if (key == "evolution.nonlinear") {
      cfg.evolution.nonlinear = detail::parse_bool(key, value);
    } else if (key == "evolution.dispersion_sign") {
      cfg.evolution.dispersion_sign = detail::parse_double(key, value);
    } else if (key == "data.kind") {
      cfg.data.kind = value;
    } else if (key == "data.amplitude") {
      cfg.data.amplitude = detail::parse_double(key, value);
    } else if (key == "data.width") {
      cfg.data.width = detail::parse_double(key, value);
    } else if (key == "data.center") {
      cfg.data.center = detail::parse_double(key, value);
    } else if (key == "data.speed") {
      cfg.data.speed = detail::parse_double(key, value);
    } else if (key == "data.path") {
      cfg.data.path = value;
    } else {
      throw ConfigError("unknown config key: '" + key + "'");
    }
  }
  bool known_id = false;
  for (const auto& id : experiment_ids()) known_id |= (id == cfg.experiment);
  if (!known_id)
    throw ConfigError("unknown experiment id: '" + cfg.experiment + "'");
  try {
    cfg.params = DispersionParams(a, k_power);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid dispersion parameters: ") +
                      e.what());
  }
  cfg.evolution.params = cfg.params;
  if (cfg.n < 8 || cfg.n % 2 != 0)
    throw ConfigError("config key 'grid.n': must be even and >= 8");
  if (!(cfg.box > 0.0)) throw ConfigError("config key 'grid.L': must be > 0");
  static const std::vector<std::string> kinds = {
      "gaussian", "derivative-of-gaussian", "bo-soliton", "zero", "file"};
  bool known_kind = false;
  for (const auto& kd : kinds) known_kind |= (kd == cfg.data.kind);
  if (!known_kind)
    throw ConfigError("config key 'data.kind': unknown kind '" +
                      cfg.data.kind + "'");
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_map(read_config_file(path));
}

// ---- CSV reading (field files) ----------------------------------------------

// Reads a two-column "x,u" CSV written by write_field_csv. Values must match
// the grid node count; the x column is trusted to be the writer's own grid.
inline std::vector<double> read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,u", 0) != 0)
    throw ConfigError("field file missing 'x,u' header: " + path);
  std::vector<double> vals;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("field file " + path + " line " +
                        std::to_string(lineno) + ": expected x,u");
    vals.push_back(detail::parse_double(path, line.substr(comma + 1)));
  }
  return vals;
}

// ---- initial data -----------------------------------------------------------

inline Field make_initial_data(const GridPtr& grid, const DataSpec& spec) {
  const double A = spec.amplitude;
  const double w = spec.width;
  const double c = spec.center;
  if (spec.kind == "gaussian") {
    return Field::sample(grid, [=](double x) {
      const double y = (x - c) / w;
      return A * std::exp(-y * y);
    });
  }
  if (spec.kind == "derivative-of-gaussian") {
    return Field::sample(grid, [=](double x) {
      const double y = (x - c) / w;
      return A * (-2.0 * y / w) * std::exp(-y * y);
    });
  }
  if (spec.kind == "bo-soliton") {
    Field phi = bo_soliton(grid, spec.speed);
    return A == 1.0 ? phi : scale(phi, A);
  }
  if (spec.kind == "zero") return Field::zero(grid);
  if (spec.kind == "file") {
    std::vector<double> vals = read_field_csv(spec.path);
    if (static_cast<int>(vals.size()) != grid->n())
      throw ConfigError("field file " + spec.path + " has " +
                        std::to_string(vals.size()) + " rows, grid needs " +
                        std::to_string(grid->n()));
    return Field::from_values(grid, std::move(vals));
  }
  throw ConfigError("unknown data kind: '" + spec.kind + "'");
}

// ---- formatting and atomic writes --------------------------------------------

// Shortest-exact float formatting used by every CSV writer.
inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Write via a temp file in the same directory, then rename into place.
inline void write_text_atomic(const std::string& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("short write: " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline void write_ledger_csv(const std::string& path,
                             const ConservedLedger& led) {
  std::ostringstream out;
  out << "t,I1,I2,I3,M\n";
  for (std::size_t i = 0; i < led.times.size(); ++i) {
    out << format_float(led.times[i]) << ',' << format_float(led.I1[i]) << ','
        << format_float(led.I2[i]) << ',' << format_float(led.I3[i]) << ','
        << format_float(led.M[i]) << '\n';
  }
  write_text_atomic(path, out.str());
}

inline void write_field_csv(const std::string& path, const Field& f) {
  std::ostringstream out;
  out << "x,u\n";
  const auto& x = f.grid().x();
  for (int j = 0; j < f.n(); ++j)
    out << format_float(x[j]) << ',' << format_float(f.values()[j]) << '\n';
  write_text_atomic(path, out.str());
}

inline void write_stein_csv(const std::string& path,
                            const std::vector<double>& eta,
                            const std::vector<double>& value) {
  if (eta.size() != value.size())
    throw std::invalid_argument("write_stein_csv: column length mismatch");
  std::ostringstream out;
  out << "eta,value\n";
  for (std::size_t i = 0; i < eta.size(); ++i)
    out << format_float(eta[i]) << ',' << format_float(value[i]) << '\n';
  write_text_atomic(path, out.str());
}

// ---- JSON manifests -----------------------------------------------------------

using Json = nlohmann::ordered_json;

inline Json to_json(const DataSpec& d) {
  Json j;
  j["kind"] = d.kind;
  j["amplitude"] = d.amplitude;
  j["width"] = d.width;
  j["center"] = d.center;
  j["speed"] = d.speed;
  j["path"] = d.path;
  return j;
}

inline Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["experiment"] = cfg.experiment;
  j["dispersion"] = {{"a", cfg.params.a}, {"k", cfg.params.k_power}};
  j["grid"] = {{"n", cfg.n}, {"L", cfg.box}};
  j["evolution"] = {
      {"dt", cfg.evolution.dt},
      {"t_end", cfg.evolution.t_end},
      {"snapshot_stride", cfg.evolution.snapshot_stride},
      {"integrator",
       cfg.evolution.integrator == Integrator::etdrk4 ? "etdrk4" : "if-rk4"},
      {"dealias",
       cfg.evolution.dealias == Dealias::two_thirds ? "two-thirds" : "none"},
      {"nonlinear", cfg.evolution.nonlinear},
      {"dispersion_sign", cfg.evolution.dispersion_sign}};
  j["data"] = to_json(cfg.data);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j;
}

inline void write_json_atomic(const std::string& path, const Json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace dgbo
