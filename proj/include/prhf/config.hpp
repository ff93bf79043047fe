#pragma once

// Flat key=value run configuration. Lines starting with '#' and trailing
// '# ...' are comments; unknown keys are rejected.

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "prhf/error.hpp"
#include "prhf/model.hpp"

namespace prhf {

struct VerifyToggles {
  bool certificate = true;
  bool decay = true;
  bool kato = true;
  bool herbst = true;
  bool greens = true;
  bool binding = false;
};

struct RunConfig {
  AtomSystem system;
  SolverOptions solver;
  VerifyToggles verify;
  std::string output_dir = "out";
  std::string log_level = "info";

  /// Explicit decay-fit window; unset means automatic per orbital.
  std::optional<double> decay_r1;
  std::optional<double> decay_r2;
  int kato_samples = 100;
  int kato_n = 400;
  double kato_r_max = 20.0;
  unsigned long long seed = 20240101;
  /// Resolvent check: energy in Hartree (internal E = alpha * value).
  double greens_energy = -0.5;
  int greens_n = 400;
  double greens_r_max = 20.0;
  /// Highest N for sweep and the binding suite; 0 means system.N.
  int sweep_n_max = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

/// "ell:spin:occupation" entries separated by commas.
inline std::vector<ShellSpec> parse_shells(const std::string& key, const std::string& v) {
  std::vector<ShellSpec> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto a = item.find(':');
    const auto b = item.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw ConfigError("key '" + key + "': shell '" + item + "' is not ell:spin:occupation");
    }
    ShellSpec s;
    s.ell = static_cast<int>(parse_int(key, item.substr(0, a)));
    s.spin = static_cast<int>(parse_int(key, item.substr(a + 1, b - a - 1)));
    s.occupation = parse_double(key, item.substr(b + 1));
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Parses configuration text. Throws ConfigError listing unknown keys and
/// malformed lines, then validates the physical system.
inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  RunConfig c;
  std::map<std::string, std::string> entries;
  std::vector<std::string> unknown;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (entries.count(key)) throw ConfigError("key '" + key + "' given twice");
    entries[key] = value;
  }

  auto& s = c.system;
  auto& o = c.solver;
  for (const auto& [key, v] : entries) {
    if (key == "Z") s.Z = parse_double(key, v);
    else if (key == "N") s.N = static_cast<int>(parse_int(key, v));
    else if (key == "alpha") s.alpha = parse_double(key, v);
    else if (key == "q") s.q = static_cast<int>(parse_int(key, v));
    else if (key == "n") o.n = static_cast<int>(parse_int(key, v));
    else if (key == "r_max") o.r_max = parse_double(key, v);
    else if (key == "max_iterations") o.max_iterations = static_cast<int>(parse_int(key, v));
    else if (key == "energy_tol") o.energy_tol = parse_double(key, v);
    else if (key == "commutator_tol") o.commutator_tol = parse_double(key, v);
    else if (key == "algorithm") {
      if (v == "oda") o.algorithm = Algorithm::OptimalDamping;
      else if (v == "roothaan") o.algorithm = Algorithm::RoothaanLevelShift;
      else throw ConfigError("key 'algorithm': expected oda or roothaan, got '" + v + "'");
    } else if (key == "level_shift") o.level_shift = parse_double(key, v);
    else if (key == "initial_guess") {
      if (v == "bare") o.initial_guess = InitialGuess::BareNucleus;
      else if (v == "shells") o.initial_guess = InitialGuess::ShellSeed;
      else throw ConfigError("key 'initial_guess': expected bare or shells, got '" + v + "'");
    } else if (key == "occupation") {
      if (v == "aufbau") o.occupation_mode = OccupationMode::Aufbau;
      else if (v == "fixed") o.occupation_mode = OccupationMode::Fixed;
      else throw ConfigError("key 'occupation': expected aufbau or fixed, got '" + v + "'");
    } else if (key == "kinetic") {
      if (v == "relativistic") o.kinetic = KineticKind::Relativistic;
      else if (v == "nonrelativistic") o.kinetic = KineticKind::NonRelativistic;
      else throw ConfigError("key 'kinetic': expected relativistic or nonrelativistic, got '" + v + "'");
    } else if (key == "ell_max") o.ell_max = static_cast<int>(parse_int(key, v));
    else if (key == "include_p") o.include_p = parse_bool(key, v);
    else if (key == "shells") o.shells = parse_shells(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else if (key == "log_level") {
      if (v != "info" && v != "debug") throw ConfigError("key 'log_level': expected info or debug");
      c.log_level = v;
    } else if (key == "verify_certificate") c.verify.certificate = parse_bool(key, v);
    else if (key == "verify_decay") c.verify.decay = parse_bool(key, v);
    else if (key == "verify_kato") c.verify.kato = parse_bool(key, v);
    else if (key == "verify_herbst") c.verify.herbst = parse_bool(key, v);
    else if (key == "verify_greens") c.verify.greens = parse_bool(key, v);
    else if (key == "verify_binding") c.verify.binding = parse_bool(key, v);
    else if (key == "decay_r1") c.decay_r1 = parse_double(key, v);
    else if (key == "decay_r2") c.decay_r2 = parse_double(key, v);
    else if (key == "kato_samples") c.kato_samples = static_cast<int>(parse_int(key, v));
    else if (key == "kato_n") c.kato_n = static_cast<int>(parse_int(key, v));
    else if (key == "kato_r_max") c.kato_r_max = parse_double(key, v);
    else if (key == "seed") c.seed = static_cast<unsigned long long>(parse_int(key, v));
    else if (key == "greens_energy") c.greens_energy = parse_double(key, v);
    else if (key == "greens_n") c.greens_n = static_cast<int>(parse_int(key, v));
    else if (key == "greens_r_max") c.greens_r_max = parse_double(key, v);
    else if (key == "sweep_n_max") c.sweep_n_max = static_cast<int>(parse_int(key, v));
    else unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  if (c.decay_r1.has_value() != c.decay_r2.has_value()) {
    throw ConfigError("decay_r1 and decay_r2 must be given together");
  }
  if (c.kato_samples < 1 || c.kato_n < 16 || c.greens_n < 16 || c.sweep_n_max < 0) {
    throw ConfigError("kato_samples >= 1, kato_n >= 16, greens_n >= 16 and sweep_n_max >= 0 required");
  }
  validate_system(c.system);
  validate_options(c.solver);
  if (!c.solver.shells.empty()) validate_shells(c.system, c.solver.shells);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace prhf
