#pragma once

// One operating point end to end: coefficients -> steady state -> t0 ->
// output state -> mode-2 observables, with automatic Fock-cutoff escalation.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hemtsq/circuit_model.hpp"
#include "hemtsq/classical_response.hpp"
#include "hemtsq/config.hpp"
#include "hemtsq/dynamics.hpp"
#include "hemtsq/hamiltonian.hpp"
#include "hemtsq/observables.hpp"

namespace hemtsq {

struct OperatingState {
  DerivedCoefficients coeffs;
  LinearTerms linear;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  SteadyState fields;
  SqueezeParams squeeze;
  double t0 = 0.0;
  std::optional<double> settling;
  std::vector<std::string> warnings;
};

/// Everything that does not depend on the Fock cutoff.
inline OperatingState prepare_operating_state(const CircuitConfig& cfg) {
  cfg.validate();
  OperatingState st;
  st.coeffs = compute_coefficients(cfg);
  st.linear = linear_terms(st.coeffs);
  st.kappa1 = cfg.oscillators.resolved_kappa1(st.coeffs.modes.omega1);
  st.kappa2 = cfg.oscillators.resolved_kappa2(st.coeffs.modes.omega2);
  st.fields = steady_state(st.linear, st.kappa1, st.kappa2, st.coeffs.modes.omega2 + cfg.drive_detuning);

  OperatingPoint op = cfg.operating_point;
  op.A1 = st.fields.A1;
  op.A2 = st.fields.A2;
  st.squeeze = compute_squeeze_params(st.coeffs, op);

  if (cfg.t0_settling) {
    try {
      const auto tf = build_transfer_function(st.coeffs, cfg.transistor, cfg.oscillators, cfg.source, cfg.r0,
                                              cfg.R_damp);
      st.settling = settling_time(tf);
    } catch (const NumericError& e) {
      st.warnings.push_back(std::string("settling time unavailable: ") + e.what());
    }
  }
  if (cfg.t0 > 0.0) {
    if (cfg.t0 >= 1.0 / st.kappa1 || cfg.t0 >= 1.0 / st.kappa2)
      throw ValidationError("t0", "must be below min(1/kappa1, 1/kappa2)");
    st.t0 = cfg.t0;
  } else {
    st.t0 = select_t0(st.kappa1, st.kappa2, st.settling);
  }
  return st;
}

struct PointObservables {
  double var_x2 = std::numeric_limits<double>::quiet_NaN();
  double var_y2 = std::numeric_limits<double>::quiet_NaN();
  double g2_paper = std::numeric_limits<double>::quiet_NaN();
  double g2_standard = std::numeric_limits<double>::quiet_NaN();
  double n_mean = std::numeric_limits<double>::quiet_NaN();
  double epr = std::numeric_limits<double>::quiet_NaN();
  ObservableReport mode1;
  ObservableReport mode2;

  std::vector<double> tracked() const { return {var_x2, var_y2, g2_paper, g2_standard, n_mean, epr}; }
};

inline PointObservables summarize(const QuantumState& psi, Complex alpha1, Complex alpha2) {
  PointObservables p;
  p.mode1 = observe(psi, 1, alpha1);
  p.mode2 = observe(psi, 2, alpha2);
  p.var_x2 = p.mode2.var_x;
  p.var_y2 = p.mode2.var_y;
  p.g2_paper = p.mode2.g2;
  p.g2_standard = p.mode2.g2_standard;
  p.n_mean = p.mode2.n_mean;
  p.epr = p.mode2.epr.value_or(std::numeric_limits<double>::quiet_NaN());
  return p;
}

/// Output state and observables at one cutoff.
inline PointObservables evaluate_at_cutoff(const OperatingState& st, EvolutionPath path, Cutoffs cut,
                                           std::vector<std::string>* warnings = nullptr) {
  if (path == EvolutionPath::squeeze) {
    auto r = squeeze_path_state(st.squeeze, st.t0, cut);
    if (warnings)
      for (auto& w : r.warnings) warnings->push_back(w);
    return summarize(r.state, st.fields.A1, st.fields.A2);
  }
  const HamiltonianSet h = build_hamiltonian(st.linear, st.coeffs.cubic, cut);
  EvolutionConfig ec;
  ec.t0 = st.t0;
  ec.path = EvolutionPath::full;
  return summarize(evolve(h, ec).state, {}, {});
}

inline bool observables_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) && std::isnan(b[i])) continue;
    if (std::isnan(a[i]) != std::isnan(b[i])) return false;
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (std::abs(a[i] - b[i]) > tol * scale + 1e-10) return false;
  }
  return true;
}

struct PointResult {
  OperatingState state;
  PointObservables observables;
  int cutoff = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Raises both cutoffs by the configured step until every tracked
/// observable changes by less than the tolerance, or the cap is reached.
inline PointResult evaluate_point(const CircuitConfig& cfg, EvolutionPath path) {
  PointResult r;
  r.state = prepare_operating_state(cfg);
  r.warnings = r.state.warnings;
  const auto& nc = cfg.numerics;
  std::optional<PointObservables> prev;
  std::vector<std::string> step_warnings;
  for (int c = nc.cutoff_start; c <= nc.cutoff_max; c += nc.cutoff_step) {
    step_warnings.clear();
    PointObservables cur = evaluate_at_cutoff(r.state, path, {c, c}, &step_warnings);
    r.cutoff = c;
    if (prev && observables_close(prev->tracked(), cur.tracked(), nc.convergence_tol)) {
      r.observables = cur;
      r.converged = true;
      break;
    }
    prev = cur;
    r.observables = cur;
  }
  for (auto& w : step_warnings) r.warnings.push_back(w);
  if (!r.converged)
    r.warnings.push_back("observables not converged at cutoff " + std::to_string(r.cutoff));
  if (!r.observables.mode2.g2_defined) r.warnings.push_back("g2(0) undefined: <n> below 1e-12");
  return r;
}

}  // namespace hemtsq
