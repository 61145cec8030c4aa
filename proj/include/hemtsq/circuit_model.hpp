#pragma once

// Closed-form coefficients of the transistor-coupled dual-oscillator circuit:
// capacitance aggregates, the nonlinear DC terms, the linearized Hamiltonian
// coefficients, mode impedances/frequencies, the cubic couplings g13..g18 and
// the single- and two-mode squeeze parameters.
//
// All values are SI. Couplings that enter the Hamiltonian as hbar*g are
// returned in rad/s.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "hemtsq/constants.hpp"
#include "hemtsq/errors.hpp"

namespace hemtsq {

using Complex = std::complex<double>;

namespace detail {

inline void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

inline void require_nonnegative(double v, const char* field) {
  require_finite(v, field);
  if (v < 0.0) throw ValidationError(field, "must be >= 0 (got " + std::to_string(v) + ")");
}

inline void require_positive(double v, const char* field) {
  require_finite(v, field);
  if (v <= 0.0) throw ValidationError(field, "must be > 0 (got " + std::to_string(v) + ")");
}

}  // namespace detail

/// Small-signal model of the cryogenic InP HEMT. Defaults are the 5 K
/// values for a 2x50 um device; R_ds and gamma are not tabulated and default
/// to 500 Ohm and 1.
struct TransistorParams {
  double g_m = 45e-3;    // A/V
  double g_m2 = 0.2;     // A/V^2
  double g_m3 = 1.2;     // A/V^3
  double C_gs = 69e-15;  // F
  double C_gd = 19e-15;  // F
  double C_ds = 29e-15;  // F, informational
  double R_g = 0.3;      // Ohm
  double R_gs = 4.0;     // Ohm
  double R_gd = 35.0;    // Ohm
  double R_ds = 500.0;   // Ohm
  double L_g = 75e-12;   // H, informational
  double L_d = 70e-12;   // H, informational
  double gamma = 1.0;    // empirical drain-noise constant

  void validate() const {
    using detail::require_nonnegative;
    require_nonnegative(g_m, "g_m");
    detail::require_finite(g_m2, "g_m2");
    detail::require_finite(g_m3, "g_m3");
    require_nonnegative(C_gs, "C_gs");
    require_nonnegative(C_gd, "C_gd");
    require_nonnegative(C_ds, "C_ds");
    require_nonnegative(R_g, "R_g");
    require_nonnegative(R_gs, "R_gs");
    require_nonnegative(R_gd, "R_gd");
    require_nonnegative(R_ds, "R_ds");
    require_nonnegative(L_g, "L_g");
    require_nonnegative(L_d, "L_d");
    require_nonnegative(gamma, "gamma");
  }
};

/// The two external LC oscillators. Decay rates are either absolute
/// (kappa1/kappa2 > 0, rad/s) or, when left at 0, kappa_ratio times the
/// loaded mode frequency.
struct OscillatorParams {
  double L1 = 4.2e-9;    // H
  double L2 = 4.2e-9;    // H
  double C1 = 100e-15;   // F
  double C2 = 27.4e-12;  // F
  double kappa_ratio = 1e-3;
  double kappa1 = 0.0;   // rad/s, 0 = kappa_ratio * omega1
  double kappa2 = 0.0;   // rad/s, 0 = kappa_ratio * omega2

  void validate() const {
    detail::require_positive(L1, "L1");
    detail::require_positive(L2, "L2");
    detail::require_positive(C1, "C1");
    detail::require_positive(C2, "C2");
    detail::require_positive(kappa_ratio, "kappa_ratio");
    detail::require_nonnegative(kappa1, "kappa1");
    detail::require_nonnegative(kappa2, "kappa2");
  }

  double resolved_kappa1(double omega1) const { return kappa1 > 0.0 ? kappa1 : kappa_ratio * omega1; }
  double resolved_kappa2(double omega2) const { return kappa2 > 0.0 ? kappa2 : kappa_ratio * omega2; }
};

struct SourceParams {
  double C_in = 100e-15;  // F
  double C_f = 20e-15;    // F
  double V_RF = 1e-6;     // V
  double T = 5.0;         // K

  void validate() const {
    detail::require_nonnegative(C_in, "C_in");
    detail::require_nonnegative(C_f, "C_f");
    detail::require_finite(V_RF, "V_RF");
    detail::require_positive(T, "T");
  }
};

/// DC node-2 flux and DC node-1 voltage that fix the nonlinear capacitance
/// C_N, its derivative C_N' and the effective g_m2N. A1/A2 are the steady
/// state field amplitudes; they are filled in by the dynamics module.
struct OperatingPoint {
  double phi2_dc = 0.0;   // V s
  double dphi1_dc = 0.0;  // V
  Complex A1{0.0, 0.0};
  Complex A2{0.0, 0.0};

  void validate() const {
    detail::require_finite(phi2_dc, "phi2_dc");
    detail::require_finite(dphi1_dc, "dphi1_dc");
    detail::require_finite(A1.real(), "A1");
    detail::require_finite(A1.imag(), "A1");
    detail::require_finite(A2.real(), "A2");
    detail::require_finite(A2.imag(), "A2");
  }
};

/// DC point that reproduces a target g_m2N and C_N for given g_m2, g_m3.
/// The library defaults use g_m2N = 677 mA/V^2 and C_N = 3.3 pF.
inline OperatingPoint backsolve_operating_point(double g_m2N_target, double C_N_target, double g_m2,
                                                double g_m3) {
  if (g_m3 == 0.0) throw ValidationError("g_m3", "back-solve needs a nonzero g_m3");
  OperatingPoint op;
  op.dphi1_dc = (g_m2N_target - g_m2) / (6.0 * g_m3);
  const double per_flux = 2.0 * g_m2 + 6.0 * g_m3 * op.dphi1_dc;
  if (per_flux == 0.0) throw ValidationError("phi2_dc", "back-solve is singular");
  op.phi2_dc = C_N_target / per_flux;
  return op;
}

inline constexpr double kReferenceGm2N = 0.677;   // A/V^2
inline constexpr double kReferenceCN = 3.3e-12;   // F

inline OperatingPoint default_operating_point() {
  const TransistorParams t;
  return backsolve_operating_point(kReferenceGm2N, kReferenceCN, t.g_m2, t.g_m3);
}

/// Thermal noise sources expressed as drive amplitudes sqrt(PSD * bandwidth).
/// Ig2, Id2, Ij2 model R_g, R_ds and R_gd; Vi2 is the voltage source of R_gs.
struct NoiseDrives {
  double Ig2 = 0.0;   // A
  double Id2 = 0.0;   // A
  double Ij2 = 0.0;   // A
  double Ids2 = 0.0;  // A
  double Vi2 = 0.0;   // V
  double Igs2 = 0.0;  // A, Ig2 - Ij2
};

struct Aggregates {
  double C_A = 0.0;
  double C_B = 0.0;
  double C_C = 0.0;
};

struct NonlinearDcTerms {
  double C_N = 0.0;       // F
  double C_Nprime = 0.0;  // A/V
  double g_m2N = 0.0;     // A/V^2
};

struct LinearCoefficients {
  double C_M2 = 0.0;       // F^2
  double inv_Cq1 = 0.0;    // 1/F
  double inv_Cq2 = 0.0;    // 1/F
  double inv_Cq1q2 = 0.0;  // 1/F
  double inv_Lp2 = 0.0;    // 1/H
  double g12 = 0.0;        // 1/s
  double g22 = 0.0;        // 1/s
  double V_q1 = 0.0;       // V
  double V_q2 = 0.0;       // V
  double I_p2 = 0.0;       // A
};

/// The linear terms that the nonlinear Hamiltonian contributes back to the
/// quadratic part (each proportional to g_m2N and V_RF).
struct LinearizedNonlinearTerms {
  double inv_L2N = 0.0;  // 1/H
  double g12N = 0.0;     // 1/s
  double g22N = 0.0;     // 1/s
  double I_p2N = 0.0;    // A
};

struct ModeConstants {
  double inv_L2prime = 0.0;  // 1/H, includes the inductive shifts
  double Z1 = 0.0;           // Ohm
  double Z2 = 0.0;           // Ohm
  double omega1 = 0.0;       // rad/s
  double omega2 = 0.0;       // rad/s
};

/// Cubic couplings of the nonlinear bracket, rad/s.
struct CubicCouplings {
  double g13 = 0.0;
  double g14 = 0.0;
  double g15 = 0.0;
  double g16 = 0.0;
  double g17 = 0.0;
  double g18 = 0.0;

  std::array<double, 6> as_array() const { return {g13, g14, g15, g16, g17, g18}; }
};

/// Every derived quantity of the circuit, in one place.
struct DerivedCoefficients {
  Aggregates aggregates;
  NonlinearDcTerms dc;
  LinearCoefficients linear;
  LinearizedNonlinearTerms linearized;
  ModeConstants modes;
  CubicCouplings cubic;
  NoiseDrives noise;

  double g12_total() const { return linear.g12 + linearized.g12N; }
  double g22_total() const { return linear.g22 + linearized.g22N; }
  double I_p2_total() const { return linear.I_p2 + linearized.I_p2N; }

  // Constant energy offsets of the classical Hamiltonian (J): the source
  // term -C_in V_RF^2 / 2 and the gate noise term -C_gs Vi^2 / 2.
  double constant_energy = 0.0;
};

struct SqueezeParams {
  Complex zeta1{0.0, 0.0};   // 1/s
  Complex zeta2{0.0, 0.0};   // 1/s
  Complex zeta_t1{0.0, 0.0};  // 1/s
  Complex zeta_t2{0.0, 0.0};  // 1/s
};

// ---------------------------------------------------------------------------

inline NoiseDrives compute_noise_drives(const TransistorParams& t, double T, double bandwidth = 1.0) {
  detail::require_positive(t.R_g, "R_g");
  detail::require_positive(t.R_gd, "R_gd");
  detail::require_positive(t.R_ds, "R_ds");
  detail::require_positive(t.R_gs, "R_gs");
  detail::require_nonnegative(T, "T");
  detail::require_positive(bandwidth, "noise_bandwidth");

  const double kT4 = 4.0 * constants::k_B * T;
  auto current = [&](double r) { return std::sqrt(kT4 / r * bandwidth); };

  NoiseDrives n;
  n.Ig2 = current(t.R_g);
  n.Id2 = current(t.R_ds);
  n.Ij2 = current(t.R_gd);
  n.Ids2 = std::sqrt(kT4 * t.gamma * t.g_m * bandwidth);
  n.Vi2 = std::sqrt(kT4 * t.R_gs * bandwidth);
  n.Igs2 = n.Ig2 - n.Ij2;
  return n;
}

inline Aggregates compute_aggregates(const TransistorParams& t, const OscillatorParams& o,
                                     const SourceParams& s) {
  Aggregates a;
  a.C_A = s.C_in + o.C1 + t.C_gs + s.C_f + t.C_gd;
  a.C_B = t.C_gd + s.C_f + o.C2;
  a.C_C = s.C_f + t.C_gd;
  return a;
}

inline NonlinearDcTerms compute_nonlinear_dc_terms(const TransistorParams& t, const OperatingPoint& op) {
  const double v = op.dphi1_dc;
  NonlinearDcTerms dc;
  dc.C_N = 2.0 * t.g_m2 * op.phi2_dc + 6.0 * t.g_m3 * op.phi2_dc * v;
  dc.C_Nprime = 2.0 * t.g_m2 * v + 12.0 * t.g_m3 * v * v;
  dc.g_m2N = t.g_m2 + 6.0 * t.g_m3 * v;
  return dc;
}

/// Symmetric matrix [[C_B, C_C], [C_C, C_A + C_N]] whose determinant is C_M^2.
inline std::array<std::array<double, 2>, 2> capacitance_matrix(const Aggregates& a, double C_N) {
  return {{{a.C_B, a.C_C}, {a.C_C, a.C_A + C_N}}};
}

inline double capacitance_determinant(const Aggregates& a, double C_N) {
  return a.C_B * (a.C_A + C_N) - a.C_C * a.C_C;
}

namespace detail {

/// Linear coefficients in long double. g22 is the difference of two nearly equal
/// contributions close to its sign change, so rounding of its inputs and
/// intermediates in double costs several digits there.
inline LinearCoefficients linear_coefficients_extended(long double CA, long double CB, long double CC, long double CN,
                                                 long double CNp, const TransistorParams& t, const SourceParams& s,
                                                 const NoiseDrives& noise) {
  using R = long double;
  const R CM2 = CB * (CA + CN) - CC * CC;
  if (!(CM2 > 0)) throw SingularCapacitanceError(double(CM2));
  const R CM4 = CM2 * CM2;
  const R gm = t.g_m;
  const R half = CN + 0.5L * CA;  // recurring (C_N + C_A/2)
  const R CAp = CA + CN;
  const R drive = R(s.C_in) * R(s.V_RF);

  LinearCoefficients c;
  c.C_M2 = double(CM2);
  c.inv_Cq1 = double((2 * CB * CB * half - CC * CC * CB) / CM4);
  c.inv_Cq2 = double((2 * CC * CC * half + CAp * CAp * CB - 2 * CC * CAp * CB) / CM4);
  c.inv_Cq1q2 = double((2 * CC * CB * half + CC * CAp * CB - CC * CC * CB) / CM4);
  c.inv_Lp2 = double(2 * gm * gm * CB * CB * half / CM4 + 2 * gm * CNp * CB / CM2);
  c.g12 = double(-2 * gm * CB * CB * half / CM4 + CNp * CB / CM2 - 3 * gm * CC * CC * CB / (2 * CM4));
  c.g22 = double(-2 * gm * CB * CC * half / CM4 + CNp * CC / CM2 + gm * CC * CC * CC / CM4 -
                 gm * CAp * CC * CB / CM4);
  c.V_q1 = double((2 * CB * CC * drive * half - CC * CC * drive * CB) / CM4);
  c.V_q2 = double((2 * CB * CC * drive * half - CC * CC * CC * drive) / CM4);
  c.I_p2 = double((-2 * gm * CB * CB * drive * half + gm * CB * CC * CC * drive) / CM4 -
                  CB * CNp * drive / CM2 - R(noise.Ids2));
  return c;
}

}  // namespace detail

inline LinearCoefficients compute_linear_coefficients(const Aggregates& agg, double C_N, double C_Nprime,
                                                const TransistorParams& t, const SourceParams& s,
                                                const NoiseDrives& noise) {
  return detail::linear_coefficients_extended(agg.C_A, agg.C_B, agg.C_C, C_N, C_Nprime, t, s, noise);
}

/// Same as compute_linear_coefficients, but with the aggregates and DC terms formed in
/// long double straight from the element values.
inline LinearCoefficients compute_linear_coefficients(const TransistorParams& t, const OscillatorParams& o,
                                                const SourceParams& s, const OperatingPoint& op,
                                                const NoiseDrives& noise) {
  using R = long double;
  const R CA = R(s.C_in) + R(o.C1) + R(t.C_gs) + R(s.C_f) + R(t.C_gd);
  const R CB = R(t.C_gd) + R(s.C_f) + R(o.C2);
  const R CC = R(s.C_f) + R(t.C_gd);
  const R v = op.dphi1_dc, phi = op.phi2_dc;
  const R CN = 2 * R(t.g_m2) * phi + 6 * R(t.g_m3) * phi * v;
  const R CNp = 2 * R(t.g_m2) * v + 12 * R(t.g_m3) * v * v;
  return detail::linear_coefficients_extended(CA, CB, CC, CN, CNp, t, s, noise);
}

/// The underbraced linear part of the nonlinear Hamiltonian, including the
/// overall g_m2N factor.
inline LinearizedNonlinearTerms compute_linearized_nonlinear_terms(const Aggregates& agg, double C_M2,
                                                         double g_m2N, const TransistorParams& t,
                                                         const SourceParams& s) {
  if (!(C_M2 > 0.0)) throw SingularCapacitanceError(C_M2);
  const double CM4 = C_M2 * C_M2;
  const double CB = agg.C_B, CC = agg.C_C;
  const double drive = s.C_in * s.V_RF;
  LinearizedNonlinearTerms e;
  // the bracket coefficient is 1/(2 L_2N)
  e.inv_L2N = 2.0 * g_m2N * (-2.0 * t.g_m * CB * CB * drive / CM4);
  e.g12N = g_m2N * 2.0 * CB * CB * drive / CM4;
  e.g22N = g_m2N * 2.0 * CB * CC * drive / CM4;
  e.I_p2N = g_m2N * CB * CB * drive * drive / CM4;
  return e;
}

inline ModeConstants compute_mode_constants(const LinearCoefficients& lin,
                                            const LinearizedNonlinearTerms& linearized,
                                            const OscillatorParams& o) {
  ModeConstants m;
  m.inv_L2prime = 1.0 / o.L2 + lin.inv_Lp2 + linearized.inv_L2N;
  if (!(lin.inv_Cq1 > 0.0) || !(o.L1 > 0.0))
    throw DegenerateModeError("oscillator 1 has nonpositive effective capacitance or inductance");
  if (!(lin.inv_Cq2 > 0.0) || !(m.inv_L2prime > 0.0))
    throw DegenerateModeError("oscillator 2 has nonpositive effective capacitance or inductance");
  m.Z1 = std::sqrt(o.L1 * lin.inv_Cq1);
  m.omega1 = std::sqrt(lin.inv_Cq1 / o.L1);
  m.Z2 = std::sqrt(lin.inv_Cq2 / m.inv_L2prime);
  m.omega2 = std::sqrt(lin.inv_Cq2 * m.inv_L2prime);
  return m;
}

/// g13..g18 exactly as printed in the nonlinear bracket.
inline CubicCouplings compute_g13_g18(const Aggregates& agg, double C_M2, double g_m2N,
                                      const ModeConstants& m, const TransistorParams& t) {
  if (!(C_M2 > 0.0)) throw SingularCapacitanceError(C_M2);
  if (!(m.Z1 > 0.0) || !(m.Z2 > 0.0)) throw DegenerateModeError("mode impedances must be positive");
  const double hb = constants::hbar;
  const double k = g_m2N / (C_M2 * C_M2);
  const double CB = agg.C_B, CC = agg.C_C;
  const double Z1 = m.Z1, Z2 = m.Z2;
  const double s2 = std::sqrt(hb / (2.0 * Z2));
  CubicCouplings g;
  g.g13 = (1.0 / (2.0 * Z1)) * s2 * k * CB * CB;
  g.g14 = (1.0 / (2.0 * Z2)) * s2 * k * CC * CC;
  g.g15 = (1.0 / std::sqrt(Z2 * Z1)) * s2 * k * CB * CC;
  g.g16 = (Z2 / 2.0) * std::sqrt(hb * Z2 / 2.0) * t.g_m * t.g_m * k * CB * CB;
  g.g17 = Z2 * std::sqrt(hb / (2.0 * Z1)) * t.g_m * k * CB * CB;
  g.g18 = Z2 * s2 * t.g_m * k * CB * CC;
  return g;
}

inline SqueezeParams compute_squeeze_params(const DerivedCoefficients& c, const OperatingPoint& op) {
  const auto& g = c.cubic;
  const Complex j{0.0, 1.0};
  SqueezeParams sp;
  sp.zeta1 = -0.5 * c.g22_total() + g.g18 * op.A2.real() + j * g.g14 * op.A2.imag();
  sp.zeta2 = 2.0 * std::conj(op.A1) * (-g.g17 - j * g.g15);
  sp.zeta_t1 = j * op.A2 * g.g15;
  sp.zeta_t2 = j * op.A1 * g.g13;
  return sp;
}

/// Full chain from raw element values to every derived coefficient.
inline DerivedCoefficients compute_coefficients(const TransistorParams& t, const OscillatorParams& o,
                                                const SourceParams& s, const OperatingPoint& op,
                                                double noise_bandwidth = 1.0) {
  t.validate();
  o.validate();
  s.validate();
  op.validate();

  DerivedCoefficients c;
  c.noise = compute_noise_drives(t, s.T, noise_bandwidth);
  c.aggregates = compute_aggregates(t, o, s);
  c.dc = compute_nonlinear_dc_terms(t, op);
  c.linear = compute_linear_coefficients(t, o, s, op, c.noise);
  c.linearized = compute_linearized_nonlinear_terms(c.aggregates, c.linear.C_M2, c.dc.g_m2N, t, s);
  c.modes = compute_mode_constants(c.linear, c.linearized, o);
  c.cubic = compute_g13_g18(c.aggregates, c.linear.C_M2, c.dc.g_m2N, c.modes, t);
  c.constant_energy = -0.5 * s.C_in * s.V_RF * s.V_RF - 0.5 * t.C_gs * c.noise.Vi2 * c.noise.Vi2;
  return c;
}

}  // namespace hemtsq
