#pragma once

// Invariant suite behind the `check` command.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hemtsq/circuit_model.hpp"
#include "hemtsq/config.hpp"
#include "hemtsq/dynamics.hpp"
#include "hemtsq/fock_space.hpp"
#include "hemtsq/hamiltonian.hpp"
#include "hemtsq/observables.hpp"
#include "hemtsq/pipeline.hpp"
#include "hemtsq/verify/analytic.hpp"
#include "hemtsq/verify/extended_precision.hpp"

namespace hemtsq {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace selfcheck {

inline std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

inline CheckResult hermiticity(const CircuitConfig& cfg) {
  const auto st = prepare_operating_state(cfg);
  const auto h = build_hamiltonian(st.linear, st.coeffs.cubic, {8, 8});
  const bool ok = h.hermiticity.linear < 1e-12 && h.hermiticity.total < 1e-12 && h.hermiticity.nonlinear < 1e-12;
  char buf[200];
  std::snprintf(buf, sizeof buf, "linear %.2e, nonlinear raw %.2e -> %.2e, total %.2e", h.hermiticity.linear,
                h.hermiticity.nonlinear_raw, h.hermiticity.nonlinear, h.hermiticity.total);
  return {"hermiticity", ok, buf};
}

inline CheckResult unitarity(const CircuitConfig& cfg) {
  const auto st = prepare_operating_state(cfg);
  double worst = 0.0;
  for (Cutoffs c : {Cutoffs{40, 3}, Cutoffs{3, 40}, Cutoffs{12, 12}}) {
    const auto h = build_hamiltonian(st.linear, st.coeffs.cubic, c);
    const Matrix u = HermitianPropagator(h.total).unitary(st.t0);
    const double err = (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
    worst = std::max(worst, err);
  }
  return {"unitarity", worst < 1e-9, fmt("max ||U^+U - I||_F = %.2e at t0", worst)};
}

inline CheckResult uncertainty(const CircuitConfig& base) {
  double worst = 1.0;
  for (double gm : {0.01, 0.03, 0.045, 0.07}) {
    CircuitConfig cfg = base;
    cfg.transistor.g_m = gm;
    const auto st = prepare_operating_state(cfg);
    std::vector<std::pair<QuantumState, std::pair<Complex, Complex>>> states;
    states.push_back({squeeze_path_state(st.squeeze, st.t0, {20, 20}).state, {st.fields.A1, st.fields.A2}});
    const auto h = build_hamiltonian(st.linear, st.coeffs.cubic, {10, 10});
    EvolutionConfig ec;
    ec.t0 = st.t0;
    states.push_back({evolve(h, ec).state, {}});
    for (const auto& [psi, shift] : states)
      for (int mode : {1, 2}) {
        const auto mm = displace(mode_moments(psi, mode), mode == 1 ? shift.first : shift.second);
        for (int k = 0; k < 16; ++k) {
          const double th = constants::pi * k / 16.0;
          worst = std::min(worst, quadrature_variance(mm, th) * quadrature_variance(mm, th + constants::pi / 2));
        }
      }
  }
  return {"uncertainty bound", worst >= 1.0 / 16.0 - 1e-9, fmt("min var(theta) var(theta+pi/2) = %.6g (>= 0.0625)", worst)};
}

inline CheckResult zero_nonlinearity(CircuitConfig cfg) {
  cfg.transistor.g_m2 = 0.0;
  cfg.transistor.g_m3 = 0.0;
  const auto st = prepare_operating_state(cfg);
  const auto& c = st.coeffs;
  bool ok = c.dc.C_N == 0.0 && c.dc.C_Nprime == 0.0 && c.dc.g_m2N == 0.0;
  ok = ok && c.linearized.inv_L2N == 0.0 && c.linearized.g12N == 0.0 && c.linearized.g22N == 0.0 && c.linearized.I_p2N == 0.0;
  for (double g : c.cubic.as_array()) ok = ok && g == 0.0;
  ok = ok && st.squeeze.zeta2 == Complex{} && st.squeeze.zeta_t1 == Complex{} && st.squeeze.zeta_t2 == Complex{};
  const auto nl = build_nonlinear(c.cubic, {6, 6});
  ok = ok && nl.op.entries.norm() == 0.0;
  return {"zero-nonlinearity collapse", ok, ok ? "all nonlinear quantities exactly 0" : "nonzero remnant"};
}

inline CheckResult cutoff_convergence(CircuitConfig cfg) {
  cfg.transistor.g_m = 0.03;
  const auto p = evaluate_point(cfg, EvolutionPath::squeeze);
  return {"cutoff convergence", p.converged,
          fmt("g_m = 30 mS squeeze path converged at cutoff %.0f (var_y2 = %.6g)", p.cutoff, p.observables.var_y2)};
}

inline TransistorParams random_transistor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> f(0.5, 1.5);
  TransistorParams t;
  t.g_m *= f(rng);
  t.g_m2 *= f(rng);
  t.g_m3 *= f(rng);
  t.C_gs *= f(rng);
  t.C_gd *= f(rng);
  t.R_g *= f(rng);
  t.R_gs *= f(rng);
  t.R_gd *= f(rng);
  t.R_ds *= f(rng);
  t.gamma *= f(rng);
  return t;
}

inline CheckResult extended_precision(int sets = 100) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> f(0.5, 1.5);
  double worst = 0.0;
  int done = 0, attempts = 0;
  while (done < sets && attempts < 20 * sets) {
    ++attempts;
    const TransistorParams t = random_transistor(rng);
    OscillatorParams o;
    o.L1 *= f(rng);
    o.L2 *= f(rng);
    o.C1 *= f(rng);
    o.C2 *= f(rng);
    SourceParams s;
    s.C_in *= f(rng);
    s.C_f *= f(rng);
    s.V_RF *= f(rng);
    s.T *= f(rng);
    OperatingPoint op = default_operating_point();
    op.phi2_dc *= f(rng);
    op.dphi1_dc *= f(rng);
    DerivedCoefficients c;
    try {
      c = compute_coefficients(t, o, s, op);
    } catch (const NumericError&) {
      continue;
    }
    const auto r = verify::reference_coefficients(t, o, s, op);
    using verify::relative_error;
    const std::pair<double, const verify::Real50*> pairs[] = {
        {c.aggregates.C_A, &r.C_A},    {c.aggregates.C_B, &r.C_B},     {c.aggregates.C_C, &r.C_C},
        {c.linear.C_M2, &r.C_M2},      {c.dc.C_N, &r.C_N},             {c.dc.C_Nprime, &r.C_Nprime},
        {c.dc.g_m2N, &r.g_m2N},        {c.linear.inv_Cq1, &r.inv_Cq1}, {c.linear.inv_Cq2, &r.inv_Cq2},
        {c.linear.inv_Cq1q2, &r.inv_Cq1q2}, {c.linear.inv_Lp2, &r.inv_Lp2}, {c.linear.g12, &r.g12},
        {c.linear.g22, &r.g22},        {c.linear.V_q1, &r.V_q1},       {c.linear.V_q2, &r.V_q2},
        {c.linear.I_p2, &r.I_p2},      {c.linearized.inv_L2N, &r.inv_L2N},    {c.linearized.g12N, &r.g12N},
        {c.linearized.g22N, &r.g22N},         {c.linearized.I_p2N, &r.I_p2N},        {c.modes.inv_L2prime, &r.inv_L2prime},
        {c.modes.Z1, &r.Z1},           {c.modes.Z2, &r.Z2},            {c.modes.omega1, &r.omega1},
        {c.modes.omega2, &r.omega2},   {c.cubic.g13, &r.g13},          {c.cubic.g14, &r.g14},
        {c.cubic.g15, &r.g15},         {c.cubic.g16, &r.g16},          {c.cubic.g17, &r.g17},
        {c.cubic.g18, &r.g18},
    };
    for (const auto& [v, ref] : pairs) worst = std::max(worst, relative_error(v, *ref));
    ++done;
  }
  const bool ok = done == sets && worst <= 1e-12;
  return {"extended-precision agreement", ok, fmt("%.0f parameter sets, max relative error %.2e", done, worst)};
}

inline CheckResult expm_oracle() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(12, 12);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = Complex(n(rng), n(rng));
    m *= (2.0 * (trial + 1) / 20.0) / m.operatorNorm();
    const Matrix ref = verify::taylor_expm(m, 60);
    worst = std::max(worst, (expm(m) - ref).norm() / ref.norm());
  }
  return {"expm vs Taylor oracle", worst < 1e-9, fmt("max relative error %.2e on 20 random 12x12", worst)};
}

inline CheckResult capacitance_inverse() {
  const CircuitConfig cfg;
  const auto c = compute_coefficients(cfg);
  const auto m = capacitance_matrix(c.aggregates, c.dc.C_N);
  Eigen::Matrix2d cm;
  cm << m[0][0], m[0][1], m[1][0], m[1][1];
  const double sym = std::abs(cm(0, 1) - cm(1, 0));
  const double err = (cm.inverse() * cm - Eigen::Matrix2d::Identity()).norm();
  return {"capacitance matrix inverse", sym == 0.0 && err < 1e-12, fmt("||C^-1 C - I|| = %.2e", err)};
}

inline CheckResult squeeze_oracle() {
  SqueezeParams sp;
  sp.zeta1 = 0.25;
  const auto r = apply_single_mode_squeeze(sp, 1.0, vacuum(40));
  const auto mm = mode_moments(r.state, 1);
  const double v = minimum_quadrature(mm).variance;
  const double ref = std::exp(-1.0) / 4.0;
  return {"single-mode squeeze oracle", std::abs(v - ref) < 1e-9, fmt("min variance %.10f vs %.10f", v, ref)};
}

}  // namespace selfcheck

inline std::vector<CheckResult> run_selfcheck(const CircuitConfig& cfg = CircuitConfig{}) {
  std::vector<std::function<CheckResult()>> checks = {
      [&] { return selfcheck::hermiticity(cfg); },
      [&] { return selfcheck::unitarity(cfg); },
      [&] { return selfcheck::uncertainty(cfg); },
      [&] { return selfcheck::zero_nonlinearity(cfg); },
      [&] { return selfcheck::cutoff_convergence(cfg); },
      [] { return selfcheck::extended_precision(); },
      [] { return selfcheck::expm_oracle(); },
      [] { return selfcheck::capacitance_inverse(); },
      [] { return selfcheck::squeeze_oracle(); },
  };
  std::vector<CheckResult> out;
  for (auto& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hemtsq
