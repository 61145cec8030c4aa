#pragma once

// Parameter sweeps over independent operating points and their CSV output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hemtsq/config.hpp"
#include "hemtsq/pipeline.hpp"

namespace hemtsq {

inline const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {"g_m", "g_m2", "g_m3", "C_f", "V_RF", "kappa"};
  return names;
}

/// Sets the swept quantity; `kappa` is the ratio kappa/omega for both modes.
inline void apply_sweep_value(CircuitConfig& cfg, const std::string& parameter, double value) {
  if (parameter == "g_m") cfg.transistor.g_m = value;
  else if (parameter == "g_m2") cfg.transistor.g_m2 = value;
  else if (parameter == "g_m3") cfg.transistor.g_m3 = value;
  else if (parameter == "C_f") cfg.source.C_f = value;
  else if (parameter == "V_RF") cfg.source.V_RF = value;
  else if (parameter == "kappa") {
    cfg.oscillators.kappa_ratio = value;
    cfg.oscillators.kappa1 = 0.0;
    cfg.oscillators.kappa2 = 0.0;
  } else {
    throw ValidationError("param", "unknown sweep parameter '" + parameter + "'");
  }
}

struct SweepSpec {
  std::string parameter = "g_m";
  double start = 0.005;
  double stop = 0.15;
  int points = 60;
  CircuitConfig fixed;
  EvolutionPath path = EvolutionPath::squeeze;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (std::find(sweep_parameters().begin(), sweep_parameters().end(), parameter) == sweep_parameters().end())
      throw ValidationError("param", "unknown sweep parameter '" + parameter + "'");
    detail::require_finite(start, "start");
    detail::require_finite(stop, "stop");
    if (!(start < stop)) throw ValidationError("start", "must be below stop");
    if (points < 2) throw ValidationError("points", "must be >= 2");
    fixed.validate();
  }

  double value(int i) const {
    if (i == points - 1) return stop;
    return start + (stop - start) * double(i) / double(points - 1);
  }
};

struct SweepRow {
  double param = 0.0;
  double var_x2 = std::numeric_limits<double>::quiet_NaN();
  double var_y2 = std::numeric_limits<double>::quiet_NaN();
  double g2_paper = std::numeric_limits<double>::quiet_NaN();
  double g2_standard = std::numeric_limits<double>::quiet_NaN();
  double n_mean = std::numeric_limits<double>::quiet_NaN();
  double zeta1_mag = std::numeric_limits<double>::quiet_NaN();
  double zeta2_mag = std::numeric_limits<double>::quiet_NaN();
  double epr = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  std::vector<std::string> warnings;
};

inline SweepRow evaluate_sweep_point(const SweepSpec& spec, int i) {
  SweepRow row;
  row.param = spec.value(i);
  try {
    CircuitConfig cfg = spec.fixed;
    apply_sweep_value(cfg, spec.parameter, row.param);
    const PointResult p = evaluate_point(cfg, spec.path);
    row.var_x2 = p.observables.var_x2;
    row.var_y2 = p.observables.var_y2;
    row.g2_paper = p.observables.g2_paper;
    row.g2_standard = p.observables.g2_standard;
    row.n_mean = p.observables.n_mean;
    row.zeta1_mag = std::abs(p.state.squeeze.zeta1);
    row.zeta2_mag = std::abs(p.state.squeeze.zeta2);
    row.epr = p.observables.epr;
    row.warnings = p.warnings;
  } catch (const Error& e) {
    row.warnings.push_back(e.what());
  }
  row.converged = row.warnings.empty();
  return row;
}

/// Rows in parameter order. Points are independent, so they are spread
/// over worker threads; the result does not depend on the thread count.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<SweepRow> rows(size_t(spec.points));
  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, unsigned(spec.points));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < spec.points; i = next++) rows[size_t(i)] = evaluate_sweep_point(spec, i);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rows;
}

inline const char* kCsvHeader = "param,var_x2,var_y2,g2_paper,g2_standard,n_mean,zeta1_mag,zeta2_mag,epr,converged";

inline std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

inline void emit_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  if (rows.empty()) throw ValidationError("rows", "nothing to write");
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    for (double v : {r.param, r.var_x2, r.var_y2, r.g2_paper, r.g2_standard, r.n_mean, r.zeta1_mag, r.zeta2_mag,
                     r.epr})
      out << format_sci(v) << ',';
    out << (r.converged ? "true" : "false") << '\n';
  }
}

inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("out", "cannot write '" + path + "'");
  emit_csv(rows, out);
  if (!out) throw ValidationError("out", "write failed for '" + path + "'");
}

/// Two-column companion file for one plot panel: `param,<column>`.
inline void emit_panel_csv(const std::vector<SweepRow>& rows, const std::string& column, std::ostream& out) {
  double SweepRow::*field = nullptr;
  if (column == "var_x2") field = &SweepRow::var_x2;
  else if (column == "var_y2") field = &SweepRow::var_y2;
  else if (column == "g2_paper") field = &SweepRow::g2_paper;
  else if (column == "g2_standard") field = &SweepRow::g2_standard;
  else if (column == "n_mean") field = &SweepRow::n_mean;
  else if (column == "epr") field = &SweepRow::epr;
  else throw ValidationError("column", "unknown panel column '" + column + "'");
  out << "param," << column << '\n';
  for (const auto& r : rows) out << format_sci(r.param) << ',' << format_sci(r.*field) << '\n';
}

/// Total width of the parameter interval on which g2_paper < 1, measured in
/// sweep steps (each qualifying point contributes one step).
inline double antibunching_width(const std::vector<SweepRow>& rows) {
  if (rows.size() < 2) return 0.0;
  const double step = (rows.back().param - rows.front().param) / double(rows.size() - 1);
  double w = 0.0;
  for (const auto& r : rows)
    if (r.g2_paper < 1.0) w += step;
  return w;
}

}  // namespace hemtsq
