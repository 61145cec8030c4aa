#pragma once

// Plain-text configuration: one `key = value` per line, SI units, `#` starts
// a comment. Unknown and repeated keys are rejected; missing keys keep their
// defaults.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hemtsq/circuit_model.hpp"
#include "hemtsq/errors.hpp"

namespace hemtsq {

struct NumericsConfig {
  int cutoff_start = 15;
  int cutoff_step = 5;
  int cutoff_max = 40;
  double convergence_tol = 1e-3;
};

struct CircuitConfig {
  TransistorParams transistor;
  OscillatorParams oscillators;
  SourceParams source;
  OperatingPoint operating_point = default_operating_point();
  double noise_bandwidth = 1.0;  // Hz
  double r0 = 500.0;             // Ohm
  double R_damp = 0.0;           // Ohm, 0 = printed transfer function
  double drive_detuning = 0.0;   // rad/s, drive frequency minus omega2
  double t0 = 0.0;               // s, 0 = automatic
  bool t0_settling = false;      // let the classical settling time cap t0
  NumericsConfig numerics;

  void validate() const {
    transistor.validate();
    oscillators.validate();
    source.validate();
    operating_point.validate();
    detail::require_positive(noise_bandwidth, "noise_bandwidth");
    detail::require_nonnegative(r0, "r0");
    detail::require_nonnegative(R_damp, "R_damp");
    detail::require_finite(drive_detuning, "drive_detuning");
    detail::require_nonnegative(t0, "t0");
    if (numerics.cutoff_start < 2) throw ValidationError("cutoff_start", "must be >= 2");
    if (numerics.cutoff_step < 1) throw ValidationError("cutoff_step", "must be >= 1");
    if (numerics.cutoff_max < numerics.cutoff_start)
      throw ValidationError("cutoff_max", "must be >= cutoff_start");
    detail::require_positive(numerics.convergence_tol, "convergence_tol");
  }
};

enum class KeyKind { real, integer, flag };

struct ConfigKey {
  const char* name;
  const char* unit;
  KeyKind kind;
  std::function<double&(CircuitConfig&)> real_ref;
  std::function<int&(CircuitConfig&)> int_ref;
  std::function<bool&(CircuitConfig&)> flag_ref;

  double get(const CircuitConfig& c) const {
    auto& m = const_cast<CircuitConfig&>(c);
    switch (kind) {
      case KeyKind::integer: return double(int_ref(m));
      case KeyKind::flag: return flag_ref(m) ? 1.0 : 0.0;
      default: return real_ref(m);
    }
  }
};

namespace detail {

inline ConfigKey real_key(const char* n, const char* u, std::function<double&(CircuitConfig&)> f) {
  return {n, u, KeyKind::real, std::move(f), {}, {}};
}
inline ConfigKey int_key(const char* n, std::function<int&(CircuitConfig&)> f) {
  return {n, "", KeyKind::integer, {}, std::move(f), {}};
}
inline ConfigKey flag_key(const char* n, std::function<bool&(CircuitConfig&)> f) {
  return {n, "", KeyKind::flag, {}, {}, std::move(f)};
}

}  // namespace detail

inline const std::vector<ConfigKey>& config_keys() {
  using detail::real_key;
  static const std::vector<ConfigKey> keys = {
      real_key("g_m", "A/V", [](CircuitConfig& c) -> double& { return c.transistor.g_m; }),
      real_key("g_m2", "A/V^2", [](CircuitConfig& c) -> double& { return c.transistor.g_m2; }),
      real_key("g_m3", "A/V^3", [](CircuitConfig& c) -> double& { return c.transistor.g_m3; }),
      real_key("C_gs", "F", [](CircuitConfig& c) -> double& { return c.transistor.C_gs; }),
      real_key("C_gd", "F", [](CircuitConfig& c) -> double& { return c.transistor.C_gd; }),
      real_key("C_ds", "F", [](CircuitConfig& c) -> double& { return c.transistor.C_ds; }),
      real_key("R_g", "Ohm", [](CircuitConfig& c) -> double& { return c.transistor.R_g; }),
      real_key("R_gs", "Ohm", [](CircuitConfig& c) -> double& { return c.transistor.R_gs; }),
      real_key("R_gd", "Ohm", [](CircuitConfig& c) -> double& { return c.transistor.R_gd; }),
      real_key("R_ds", "Ohm", [](CircuitConfig& c) -> double& { return c.transistor.R_ds; }),
      real_key("L_g", "H", [](CircuitConfig& c) -> double& { return c.transistor.L_g; }),
      real_key("L_d", "H", [](CircuitConfig& c) -> double& { return c.transistor.L_d; }),
      real_key("gamma", "", [](CircuitConfig& c) -> double& { return c.transistor.gamma; }),
      real_key("L1", "H", [](CircuitConfig& c) -> double& { return c.oscillators.L1; }),
      real_key("L2", "H", [](CircuitConfig& c) -> double& { return c.oscillators.L2; }),
      real_key("C1", "F", [](CircuitConfig& c) -> double& { return c.oscillators.C1; }),
      real_key("C2", "F", [](CircuitConfig& c) -> double& { return c.oscillators.C2; }),
      real_key("kappa_ratio", "", [](CircuitConfig& c) -> double& { return c.oscillators.kappa_ratio; }),
      real_key("kappa1", "rad/s", [](CircuitConfig& c) -> double& { return c.oscillators.kappa1; }),
      real_key("kappa2", "rad/s", [](CircuitConfig& c) -> double& { return c.oscillators.kappa2; }),
      real_key("C_in", "F", [](CircuitConfig& c) -> double& { return c.source.C_in; }),
      real_key("C_f", "F", [](CircuitConfig& c) -> double& { return c.source.C_f; }),
      real_key("V_RF", "V", [](CircuitConfig& c) -> double& { return c.source.V_RF; }),
      real_key("T", "K", [](CircuitConfig& c) -> double& { return c.source.T; }),
      real_key("phi2_dc", "V s", [](CircuitConfig& c) -> double& { return c.operating_point.phi2_dc; }),
      real_key("dphi1_dc", "V", [](CircuitConfig& c) -> double& { return c.operating_point.dphi1_dc; }),
      real_key("noise_bandwidth", "Hz", [](CircuitConfig& c) -> double& { return c.noise_bandwidth; }),
      real_key("r0", "Ohm", [](CircuitConfig& c) -> double& { return c.r0; }),
      real_key("R_damp", "Ohm", [](CircuitConfig& c) -> double& { return c.R_damp; }),
      real_key("drive_detuning", "rad/s", [](CircuitConfig& c) -> double& { return c.drive_detuning; }),
      real_key("t0", "s", [](CircuitConfig& c) -> double& { return c.t0; }),
      detail::flag_key("t0_settling", [](CircuitConfig& c) -> bool& { return c.t0_settling; }),
      detail::int_key("cutoff_start", [](CircuitConfig& c) -> int& { return c.numerics.cutoff_start; }),
      detail::int_key("cutoff_step", [](CircuitConfig& c) -> int& { return c.numerics.cutoff_step; }),
      detail::int_key("cutoff_max", [](CircuitConfig& c) -> int& { return c.numerics.cutoff_max; }),
      real_key("convergence_tol", "", [](CircuitConfig& c) -> double& { return c.numerics.convergence_tol; }),
  };
  return keys;
}

inline const ConfigKey* find_config_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (name == k.name) return &k;
  return nullptr;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string at_line(int line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

inline double parse_number(std::string_view text, const std::string& key, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ValidationError(key, at_line(line, "not a number: '" + std::string(text) + "'"));
  return v;
}

}  // namespace detail

/// Sets one key from its textual value.
inline void set_config_value(CircuitConfig& cfg, std::string_view key, std::string_view text, int line = 0) {
  const ConfigKey* k = find_config_key(key);
  if (!k) throw ValidationError(std::string(key), detail::at_line(line, "unknown key"));
  const std::string name(key);
  const double v = detail::parse_number(text, name, line);
  switch (k->kind) {
    case KeyKind::real:
      k->real_ref(cfg) = v;
      break;
    case KeyKind::integer:
      if (v != std::floor(v) || std::abs(v) > 1e6)
        throw ValidationError(name, detail::at_line(line, "must be an integer"));
      k->int_ref(cfg) = int(v);
      break;
    case KeyKind::flag:
      if (v != 0.0 && v != 1.0) throw ValidationError(name, detail::at_line(line, "must be 0 or 1"));
      k->flag_ref(cfg) = v != 0.0;
      break;
  }
}

inline CircuitConfig parse_config(std::istream& in) {
  CircuitConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ValidationError("", detail::at_line(line, "expected 'key = value'"));
    const std::string_view key = detail::trim(s.substr(0, eq));
    const std::string_view value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ValidationError("", detail::at_line(line, "missing key"));
    if (!seen.insert(std::string(key)).second)
      throw ValidationError(std::string(key), detail::at_line(line, "duplicate key"));
    set_config_value(cfg, key, value, line);
  }
  cfg.validate();
  return cfg;
}

inline CircuitConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline CircuitConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot read '" + path + "'");
  return parse_config(in);
}

/// Explicit path, else $HEMTSQ_CONFIG, else defaults.
inline CircuitConfig resolve_config(const std::optional<std::string>& path) {
  if (path && !path->empty()) return load_config(*path);
  if (const char* env = std::getenv("HEMTSQ_CONFIG"); env && *env) return load_config(env);
  CircuitConfig cfg;
  cfg.validate();
  return cfg;
}

inline std::string format_value(const ConfigKey& k, double v) {
  if (k.kind != KeyKind::real) return std::to_string(long(v));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Every key with its resolved value; reloading the output reproduces cfg.
inline void write_config(std::ostream& out, const CircuitConfig& cfg, const char* prefix = "") {
  for (const auto& k : config_keys()) {
    out << prefix << k.name << " = " << format_value(k, k.get(cfg));
    if (*k.unit) out << "  # " << k.unit;
    out << '\n';
  }
}

inline DerivedCoefficients compute_coefficients(const CircuitConfig& cfg) {
  return compute_coefficients(cfg.transistor, cfg.oscillators, cfg.source, cfg.operating_point, cfg.noise_bandwidth);
}

}  // namespace hemtsq
