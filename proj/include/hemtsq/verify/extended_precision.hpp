#pragma once

// Independent re-evaluation of the coefficient chain in 50-digit binary
// floating point. Written from the formulas directly, sharing no code with
// circuit_model.hpp beyond the parameter structs.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hemtsq/circuit_model.hpp"

namespace hemtsq::verify {

using Real50 = boost::multiprecision::cpp_bin_float_50;

struct ReferenceCoefficients {
  Real50 C_A, C_B, C_C, C_M2, C_N, C_Nprime, g_m2N;
  Real50 inv_Cq1, inv_Cq2, inv_Cq1q2, inv_Lp2, g12, g22, V_q1, V_q2, I_p2;
  Real50 inv_L2N, g12N, g22N, I_p2N;
  Real50 inv_L2prime, Z1, Z2, omega1, omega2;
  Real50 g13, g14, g15, g16, g17, g18;
  Real50 Ids2, Igs2;
  // transfer-function denominator (ascending) and numerator s^2 coefficient
  Real50 den[5];
  Real50 num2;
};

inline ReferenceCoefficients reference_coefficients(const TransistorParams& t, const OscillatorParams& o,
                                                    const SourceParams& s, const OperatingPoint& op,
                                                    double bandwidth = 1.0, double r0 = 500.0) {
  using boost::multiprecision::sqrt;
  const Real50 hbar("1.054571817e-34");
  const Real50 kB("1.380649e-23");
  const Real50 gm = t.g_m, gm2 = t.g_m2, gm3 = t.g_m3;
  const Real50 Cgs = t.C_gs, Cgd = t.C_gd, Cf = s.C_f, Cin = s.C_in, C1 = o.C1, C2 = o.C2;
  const Real50 L1 = o.L1, L2 = o.L2, V = s.V_RF, T = s.T, df = bandwidth;
  const Real50 phi2 = op.phi2_dc, v = op.dphi1_dc;

  ReferenceCoefficients r;
  r.C_A = Cin + C1 + Cgs + Cf + Cgd;
  r.C_B = Cgd + Cf + C2;
  r.C_C = Cf + Cgd;
  r.C_N = phi2 * (2 * gm2 + 6 * gm3 * v);
  r.C_Nprime = v * (2 * gm2 + 12 * gm3 * v);
  r.g_m2N = gm2 + 6 * gm3 * v;

  const Real50 a = r.C_B, b = r.C_C, d = r.C_A + r.C_N;  // [[a, b], [b, d]]
  r.C_M2 = a * d - b * b;
  const Real50 M4 = r.C_M2 * r.C_M2;
  const Real50 CA = r.C_A, CB = r.C_B, CC = r.C_C, CN = r.C_N, CNp = r.C_Nprime;
  const Real50 H = CN + CA / 2;

  r.Ids2 = sqrt(4 * kB * T * Real50(t.gamma) * gm * df);
  r.Igs2 = sqrt(4 * kB * T / Real50(t.R_g) * df) - sqrt(4 * kB * T / Real50(t.R_gd) * df);

  r.inv_Cq1 = CB * (2 * CB * H - CC * CC) / M4;
  r.inv_Cq2 = (2 * CC * CC * H + (CA + CN) * (CA + CN) * CB - 2 * CC * (CN + CA) * CB) / M4;
  r.inv_Cq1q2 = CC * CB * (2 * H + (CN + CA) - CC) / M4;
  r.inv_Lp2 = 2 * gm * CB * (gm * CB * H / M4 + CNp / r.C_M2);
  r.g12 = CB * (-2 * gm * CB * H / M4 + CNp / r.C_M2 - 3 * gm * CC * CC / (2 * M4));
  r.g22 = CC * (-2 * gm * CB * H / M4 + CNp / r.C_M2 + gm * CC * CC / M4 - gm * (CN + CA) * CB / M4);
  r.V_q1 = Cin * V * CB * CC * (2 * H - CC) / M4;
  r.V_q2 = Cin * V * CC * (2 * CB * H - CC * CC) / M4;
  r.I_p2 = Cin * V * CB * (gm * (CC * CC - 2 * CB * H) / M4 - CNp / r.C_M2) - r.Ids2;

  const Real50 k = r.g_m2N * Cin * V / M4;
  r.inv_L2N = -4 * gm * CB * CB * k;
  r.g12N = 2 * CB * CB * k;
  r.g22N = 2 * CB * CC * k;
  r.I_p2N = CB * CB * Cin * V * k;

  r.inv_L2prime = 1 / L2 + r.inv_Lp2 + r.inv_L2N;
  r.Z1 = sqrt(L1 * r.inv_Cq1);
  r.Z2 = sqrt(r.inv_Cq2 / r.inv_L2prime);
  r.omega1 = 1 / sqrt(L1 / r.inv_Cq1);
  r.omega2 = 1 / sqrt(1 / (r.inv_L2prime * r.inv_Cq2));

  const Real50 g = r.g_m2N / M4;
  const Real50 Z1 = r.Z1, Z2 = r.Z2;
  r.g13 = g * CB * CB * sqrt(hbar / (2 * Z2)) / (2 * Z1);
  r.g14 = g * CC * CC * sqrt(hbar / (2 * Z2)) / (2 * Z2);
  r.g15 = g * CB * CC * sqrt(hbar / (2 * Z2)) / sqrt(Z1 * Z2);
  r.g16 = g * gm * gm * CB * CB * Z2 * sqrt(hbar * Z2 / 2) / 2;
  r.g17 = g * gm * CB * CB * Z2 * sqrt(hbar / (2 * Z1));
  r.g18 = g * gm * CB * CC * Z2 * sqrt(hbar / (2 * Z2));

  const Real50 Lp2 = 1 / (1 / L2 + r.inv_L2N);
  const Real50 Cp1 = Cgs + C1 + (Cgd + Cf) * gm * Real50(r0);
  const Real50 Cp2 = CN + C2;
  r.den[0] = 1;
  r.den[1] = L1;
  r.den[2] = L1 * Cp1 + Lp2 * Cp2;
  r.den[3] = Lp2 * L1 * Cp2;
  r.den[4] = Lp2 * L1 * Cp1 * Cp2;
  r.num2 = gm * Lp2 * L1;
  return r;
}

inline double relative_error(double value, const Real50& ref) {
  const Real50 diff = Real50(value) - ref;
  const Real50 scale = abs(ref);
  if (scale == 0) return abs(diff) == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(abs(diff) / scale);
}

}  // namespace hemtsq::verify
