// hemtsq: coefficients, sweeps, classical step response and self-checks for
// the HEMT-coupled dual-oscillator squeezing model.
//
// exit codes: 0 ok, 1 invalid input, 2 numeric failure

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hemtsq/hemtsq.hpp"
#include "hemtsq/selfcheck.hpp"

using namespace hemtsq;

namespace {

void print_value(std::ostream& out, const char* name, double v, const char* unit) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  out << name << " = " << buf;
  if (*unit) out << "  # " << unit;
  out << '\n';
}

void print_complex(std::ostream& out, const char* name, Complex z, const char* unit) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12e %+.12ej", z.real(), z.imag());
  out << name << " = " << buf;
  if (*unit) out << "  # " << unit;
  out << '\n';
}

int cmd_coeffs(const std::optional<std::string>& config_path) {
  const CircuitConfig cfg = resolve_config(config_path);
  std::cout << "# resolved configuration\n";
  write_config(std::cout, cfg, "# ");

  const OperatingState st = prepare_operating_state(cfg);
  const DerivedCoefficients& c = st.coeffs;
  auto& o = std::cout;
  o << "# derived coefficients\n";
  print_value(o, "C_A", c.aggregates.C_A, "F");
  print_value(o, "C_B", c.aggregates.C_B, "F");
  print_value(o, "C_C", c.aggregates.C_C, "F");
  print_value(o, "C_M2", c.linear.C_M2, "F^2");
  print_value(o, "C_N", c.dc.C_N, "F");
  print_value(o, "C_Nprime", c.dc.C_Nprime, "A/V");
  print_value(o, "g_m2N", c.dc.g_m2N, "A/V^2");
  print_value(o, "inv_Cq1", c.linear.inv_Cq1, "1/F");
  print_value(o, "inv_Cq2", c.linear.inv_Cq2, "1/F");
  print_value(o, "inv_Cq1q2", c.linear.inv_Cq1q2, "1/F");
  print_value(o, "inv_Lp2", c.linear.inv_Lp2, "1/H");
  print_value(o, "g12", c.linear.g12, "1/s");
  print_value(o, "g22", c.linear.g22, "1/s");
  print_value(o, "V_q1", c.linear.V_q1, "V");
  print_value(o, "V_q2", c.linear.V_q2, "V");
  print_value(o, "I_p2", c.linear.I_p2, "A");
  print_value(o, "inv_L2N", c.linearized.inv_L2N, "1/H");
  print_value(o, "g12N", c.linearized.g12N, "1/s");
  print_value(o, "g22N", c.linearized.g22N, "1/s");
  print_value(o, "I_p2N", c.linearized.I_p2N, "A");
  print_value(o, "inv_L2prime", c.modes.inv_L2prime, "1/H");
  print_value(o, "Z1", c.modes.Z1, "Ohm");
  print_value(o, "Z2", c.modes.Z2, "Ohm");
  print_value(o, "omega1", c.modes.omega1, "rad/s");
  print_value(o, "omega2", c.modes.omega2, "rad/s");
  print_value(o, "g13", c.cubic.g13, "rad/s");
  print_value(o, "g14", c.cubic.g14, "rad/s");
  print_value(o, "g15", c.cubic.g15, "rad/s");
  print_value(o, "g16", c.cubic.g16, "rad/s");
  print_value(o, "g17", c.cubic.g17, "rad/s");
  print_value(o, "g18", c.cubic.g18, "rad/s");
  print_value(o, "Ig2", c.noise.Ig2, "A");
  print_value(o, "Id2", c.noise.Id2, "A");
  print_value(o, "Ij2", c.noise.Ij2, "A");
  print_value(o, "Ids2", c.noise.Ids2, "A");
  print_value(o, "Vi2", c.noise.Vi2, "V");
  print_value(o, "Igs2", c.noise.Igs2, "A");
  o << "# operating state\n";
  print_value(o, "kappa1", st.kappa1, "rad/s");
  print_value(o, "kappa2", st.kappa2, "rad/s");
  print_complex(o, "A1", st.fields.A1, "");
  print_complex(o, "A2", st.fields.A2, "");
  print_complex(o, "zeta1", st.squeeze.zeta1, "1/s");
  print_complex(o, "zeta2", st.squeeze.zeta2, "1/s");
  print_complex(o, "zeta_t1", st.squeeze.zeta_t1, "1/s");
  print_complex(o, "zeta_t2", st.squeeze.zeta_t2, "1/s");
  print_value(o, "t0", st.t0, "s");
  for (const auto& w : st.warnings) o << "# warning: " << w << '\n';
  return 0;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

struct SweepArgs {
  std::string param = "g_m";
  double start = 0.0;
  double stop = 0.0;
  int points = 60;
  std::optional<std::string> config;
  std::string out;
  std::string path = "squeeze";
  unsigned threads = 0;
  bool panels = false;
};

int cmd_sweep(const SweepArgs& a) {
  SweepSpec spec;
  spec.parameter = a.param;
  spec.start = a.start;
  spec.stop = a.stop;
  spec.points = a.points;
  spec.fixed = resolve_config(a.config);
  spec.threads = a.threads;
  spec.validate();

  std::cout << "# resolved configuration\n";
  write_config(std::cout, spec.fixed, "# ");
  std::cout << "# sweep " << spec.parameter << " from " << spec.start << " to " << spec.stop << " in "
            << spec.points << " points\n";

  std::vector<std::pair<EvolutionPath, std::string>> jobs;
  if (a.path == "both") {
    jobs = {{EvolutionPath::squeeze, with_suffix(a.out, "_squeeze")}, {EvolutionPath::full, with_suffix(a.out, "_full")}};
  } else {
    jobs = {{a.path == "full" ? EvolutionPath::full : EvolutionPath::squeeze, a.out}};
  }
  for (const auto& [path, file] : jobs) {
    spec.path = path;
    const auto rows = run_sweep(spec);
    emit_csv(rows, file);
    int flagged = 0;
    for (const auto& r : rows) flagged += r.converged ? 0 : 1;
    std::cout << "# " << to_string(path) << " path: " << rows.size() << " rows -> " << file << " (" << flagged
              << " flagged)\n";
    for (const auto& r : rows)
      for (const auto& w : r.warnings) std::cout << "# warning at " << format_sci(r.param) << ": " << w << '\n';
    if (a.panels) {
      for (const char* col : {"var_x2", "var_y2", "g2_paper"}) {
        const std::string pf = with_suffix(file, std::string("_") + col);
        std::ofstream out(pf, std::ios::binary);
        if (!out) throw ValidationError("out", "cannot write '" + pf + "'");
        emit_panel_csv(rows, col, out);
      }
    }
  }
  return 0;
}

struct StepArgs {
  std::optional<std::string> config;
  std::string out;
  double duration = 500e-9;
  double dt = 0.0;
  double band = 0.02;
};

int cmd_step_response(const StepArgs& a) {
  const CircuitConfig cfg = resolve_config(a.config);
  const DerivedCoefficients c = compute_coefficients(cfg);
  const auto tf = build_transfer_function(c, cfg.transistor, cfg.oscillators, cfg.source, cfg.r0, cfg.R_damp);
  const double dt = a.dt > 0.0 ? a.dt : a.duration / 20000.0;
  const auto analytic = step_response(tf, a.duration, dt);
  const auto ode = step_response_ode(tf, a.duration, dt);

  double peak = 0.0, diff = 0.0;
  for (size_t i = 0; i < analytic.y.size(); ++i) {
    peak = std::max(peak, std::abs(analytic.y[i]));
    diff = std::max(diff, std::abs(analytic.y[i] - ode.y[i]));
  }
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw ValidationError("out", "cannot write '" + a.out + "'");
    out << "t,v_out,v_out_ode\n";
    for (size_t i = 0; i < analytic.t.size(); ++i)
      out << format_sci(analytic.t[i]) << ',' << format_sci(analytic.y[i]) << ',' << format_sci(ode.y[i]) << '\n';
  }
  std::cout << "# transfer function (ascending powers of s)\n";
  for (size_t k = 0; k < tf.num.size(); ++k) std::cout << "num[" << k << "] = " << format_sci(tf.num[k]) << '\n';
  for (size_t k = 0; k < tf.den.size(); ++k) std::cout << "den[" << k << "] = " << format_sci(tf.den[k]) << '\n';
  std::cout << "Lp2 = " << format_sci(tf.Lp2) << "  # H\nCp1 = " << format_sci(tf.Cp1) << "  # F\nCp2 = "
            << format_sci(tf.Cp2) << "  # F\nAv0 = " << format_sci(tf.Av0) << '\n';
  for (const auto& p : polynomial_roots(tf.den))
    std::cout << "pole = " << format_sci(p.real()) << ' ' << format_sci(p.imag()) << "j\n";
  std::cout << "peak = " << format_sci(peak) << "  # V per V step\n";
  std::cout << "analytic_vs_ode = " << format_sci(peak > 0 ? diff / peak : diff) << "  # max difference / peak\n";
  try {
    const double ts = settling_time(tf, a.band);
    std::cout << "settling_time = " << format_sci(ts) << "  # s\n";
  } catch (const NoSettlingError& e) {
    std::cout << "settling_time = none  # " << e.what() << '\n';
    for (const auto& p : e.roots())
      std::cerr << "non-decaying pole " << format_sci(p.real()) << ' ' << format_sci(p.imag()) << "j\n";
    throw;
  }
  return 0;
}

int cmd_check() {
  const auto results = run_selfcheck();
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s  %-30s %s  (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
    all = all && r.passed;
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HEMT-coupled dual-oscillator squeezing simulator"};
  app.require_subcommand(1);

  std::optional<std::string> coeffs_config;
  auto* coeffs = app.add_subcommand("coeffs", "print every derived coefficient for a configuration");
  coeffs->add_option("--config", coeffs_config, "configuration file (default: $HEMTSQ_CONFIG or built-in)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter and write observables as CSV");
  sweep->add_option("--param", sw.param, "g_m | g_m2 | g_m3 | C_f | V_RF | kappa (ratio kappa/omega)")
      ->check(CLI::IsMember(sweep_parameters()));
  sweep->add_option("--start", sw.start, "first value (SI)")->required();
  sweep->add_option("--stop", sw.stop, "last value (SI)")->required();
  sweep->add_option("--points", sw.points, "number of points")->capture_default_str();
  sweep->add_option("--config", sw.config, "configuration file");
  sweep->add_option("--out", sw.out, "output CSV")->required();
  sweep->add_option("--path", sw.path, "full | squeeze | both")
      ->check(CLI::IsMember({"full", "squeeze", "both"}))
      ->capture_default_str();
  sweep->add_option("--threads", sw.threads, "worker threads (0 = all cores)");
  sweep->add_flag("--panels", sw.panels, "also write two-column files per figure panel");

  StepArgs st;
  auto* step = app.add_subcommand("step-response", "classical step response and settling time");
  step->add_option("--config", st.config, "configuration file");
  step->add_option("--out", st.out, "CSV with t, v_out (analytic), v_out_ode");
  step->add_option("--duration", st.duration, "time span in s")->capture_default_str();
  step->add_option("--dt", st.dt, "sample spacing in s (default duration/20000)");
  step->add_option("--band", st.band, "settling band as a fraction of the peak")->capture_default_str();

  auto* check = app.add_subcommand("check", "run the invariant self-test suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*coeffs) return cmd_coeffs(coeffs_config);
    if (*sweep) return cmd_sweep(sw);
    if (*step) return cmd_step_response(st);
    if (*check) return cmd_check();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
