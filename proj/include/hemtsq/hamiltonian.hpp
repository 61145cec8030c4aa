#pragma once

// Total Hamiltonian of the coupled oscillators on a truncated two-mode Fock
// space, hbar = 1, every entry in rad/s.

#include <cmath>

#include "hemtsq/circuit_model.hpp"
#include "hemtsq/fock_space.hpp"

namespace hemtsq {

/// Coefficients of the quadratic-plus-drive Hamiltonian in ladder form:
///   H = w1 (n1 + 1/2) + w2 (n2 + 1/2)
///     + kc  (a1 - a1+)(a2 - a2+)
///     + k12 (a1 - a1+)(a2 + a2+)
///     + k22 (a2^2 - a2+^2)
///     + drive1 a1+ + conj(drive1) a1 + drive2 a2+ + conj(drive2) a2
///     + constant
struct LinearTerms {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double kc = 0.0;
  Complex k12{};
  Complex k22{};
  Complex drive1{};
  Complex drive2{};
  double constant = 0.0;
};

inline LinearTerms linear_terms(const DerivedCoefficients& c) {
  const double hb = constants::hbar;
  const double Z1 = c.modes.Z1, Z2 = c.modes.Z2;
  const Complex j{0.0, 1.0};
  LinearTerms L;
  L.omega1 = c.modes.omega1;
  L.omega2 = c.modes.omega2;
  // Q_i = -i sqrt(hbar/2Z_i)(a_i - a_i+), phi_i = sqrt(hbar Z_i/2)(a_i + a_i+)
  L.kc = -0.5 * c.linear.inv_Cq1q2 / std::sqrt(Z1 * Z2);
  L.k12 = -0.5 * j * c.g12_total() * std::sqrt(Z2 / Z1);
  L.k22 = -0.5 * j * c.g22_total();
  L.drive1 = j * c.linear.V_q1 / std::sqrt(2.0 * hb * Z1) - c.noise.Igs2 * std::sqrt(Z1 / (2.0 * hb));
  L.drive2 = j * c.linear.V_q2 / std::sqrt(2.0 * hb * Z2) + c.I_p2_total() * std::sqrt(Z2 / (2.0 * hb));
  L.constant = c.constant_energy / hb;
  return L;
}

struct Cutoffs {
  int mode1 = 15;
  int mode2 = 15;
};

namespace detail {

struct LadderSet {
  FockOperator a1, a2, a1d, a2d, id;
};

inline LadderSet ladders(Cutoffs c) {
  const FockOperator a = annihilation(c.mode1);
  const FockOperator b = annihilation(c.mode2);
  LadderSet s;
  s.a1 = embed(a, 1, c.mode2);
  s.a2 = embed(b, 2, c.mode1);
  s.a1d = s.a1.adjoint();
  s.a2d = s.a2.adjoint();
  s.id = identity(c.mode1, c.mode2);
  return s;
}

}  // namespace detail

inline FockOperator build_linear(const LinearTerms& L, Cutoffs cut) {
  const auto s = detail::ladders(cut);
  const FockOperator x1m = s.a1 - s.a1d;
  const FockOperator x2m = s.a2 - s.a2d;
  const FockOperator x2p = s.a2 + s.a2d;

  FockOperator h = L.omega1 * (s.a1d * s.a1) + L.omega2 * (s.a2d * s.a2);
  h += (0.5 * (L.omega1 + L.omega2) + L.constant) * s.id;
  if (L.kc != 0.0) h += L.kc * (x1m * x2m);
  if (L.k12 != Complex{}) h += L.k12 * (x1m * x2p);
  if (L.k22 != Complex{}) h += L.k22 * (s.a2 * s.a2 - s.a2d * s.a2d);
  h += L.drive1 * s.a1d + std::conj(L.drive1) * s.a1;
  h += L.drive2 * s.a2d + std::conj(L.drive2) * s.a2;

  const double defect = hermiticity_defect(h);
  if (defect > 1e-12) throw NumericError("linear Hamiltonian is not Hermitian (defect " + std::to_string(defect) + ")");
  return h;
}

inline FockOperator build_linear(const DerivedCoefficients& c, Cutoffs cut) {
  return build_linear(linear_terms(c), cut);
}

struct NonlinearBuild {
  FockOperator op;
  double raw_defect = 0.0;
};

/// The cubic bracket in the printed operator order, then (M + M+)/2 when
/// the raw product is not Hermitian.
inline NonlinearBuild build_nonlinear(const CubicCouplings& g, Cutoffs cut) {
  const auto s = detail::ladders(cut);
  const Complex j{0.0, 1.0};
  const FockOperator x1m = s.a1 - s.a1d;
  const FockOperator x2m = s.a2 - s.a2d;
  const FockOperator x2p = s.a2 + s.a2d;

  FockOperator m = zero_operator(cut.mode1, cut.mode2);
  if (g.g13 != 0.0) m -= g.g13 * (x1m * x1m * x2p);
  if (g.g14 != 0.0) m += g.g14 * (x2p * x2m * x2m);
  if (g.g15 != 0.0) m -= g.g15 * (x1m * x2m * x2p);
  if (g.g16 != 0.0) m += g.g16 * (x2p * x2p * x2p);
  if (g.g17 != 0.0) m += (j * g.g17) * (x1m * x2p * x2p);
  if (g.g18 != 0.0) m += (j * g.g18) * (x2m * x2p * x2p);

  NonlinearBuild out{m, hermiticity_defect(m)};
  if (out.raw_defect > 1e-12) out.op.entries = 0.5 * (m.entries + m.entries.adjoint());
  return out;
}

struct HermiticityReport {
  double linear = 0.0;
  double nonlinear_raw = 0.0;
  double nonlinear = 0.0;
  double total = 0.0;
};

struct HamiltonianSet {
  FockOperator linear;
  FockOperator nonlinear;
  FockOperator total;
  HermiticityReport hermiticity;
};

inline HamiltonianSet build_hamiltonian(const LinearTerms& L, const CubicCouplings& g, Cutoffs cut) {
  HamiltonianSet h;
  h.linear = build_linear(L, cut);
  auto nl = build_nonlinear(g, cut);
  h.nonlinear = std::move(nl.op);
  h.total = h.linear + h.nonlinear;
  h.hermiticity.linear = hermiticity_defect(h.linear);
  h.hermiticity.nonlinear_raw = nl.raw_defect;
  h.hermiticity.nonlinear = hermiticity_defect(h.nonlinear);
  h.hermiticity.total = hermiticity_defect(h.total);
  return h;
}

inline HamiltonianSet build_hamiltonian(const DerivedCoefficients& c, Cutoffs cut) {
  return build_hamiltonian(linear_terms(c), c.cubic, cut);
}

}  // namespace hemtsq
