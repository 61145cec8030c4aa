#pragma once

// Steady-state field amplitudes, the evolution window t0 and the two ways of
// producing the output state: full unitary evolution under the total
// Hamiltonian, or the closed-form single- and two-mode squeeze operators.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hemtsq/circuit_model.hpp"
#include "hemtsq/fock_space.hpp"
#include "hemtsq/hamiltonian.hpp"

namespace hemtsq {

struct SteadyState {
  Complex A1{};
  Complex A2{};
};

/// Heisenberg-Langevin fixed point of the driven, damped modes in the frame
/// rotating at drive_frequency, keeping only the number-conserving part of
/// the quadratic couplings:
///   0 = -i (D1 A1 + J12 A2 + d1) - k1/2 A1
///   0 = -i (D2 A2 + J21 A1 + d2) - k2/2 A2
inline SteadyState steady_state(const LinearTerms& L, double kappa1, double kappa2, double drive_frequency) {
  detail::require_positive(kappa1, "kappa1");
  detail::require_positive(kappa2, "kappa2");
  detail::require_finite(drive_frequency, "drive_frequency");
  const Complex j{0.0, 1.0};
  const Complex J12 = -L.kc - L.k12;
  const Complex J21 = -L.kc + L.k12;
  Eigen::Matrix2cd m;
  m << -j * (L.omega1 - drive_frequency) - 0.5 * kappa1, -j * J12,
       -j * J21, -j * (L.omega2 - drive_frequency) - 0.5 * kappa2;
  Eigen::Vector2cd b(j * L.drive1, j * L.drive2);

  const double scale = m.cwiseAbs().maxCoeff();
  const Complex det = m.determinant();
  if (!(std::abs(det) > 1e-14 * scale * scale))
    throw NumericError("steady state: singular Heisenberg-Langevin system");
  const Eigen::Vector2cd a = m.partialPivLu().solve(b);
  if (!std::isfinite(std::abs(a(0))) || !std::isfinite(std::abs(a(1))))
    throw NumericError("steady state: non-finite amplitudes");
  return {a(0), a(1)};
}

/// t0 = min(settling, 0.9/kappa1, 0.9/kappa2). A settling time that is
/// absent, non-finite or non-positive is ignored.
inline double select_t0(double kappa1, double kappa2, std::optional<double> settling = std::nullopt) {
  detail::require_positive(kappa1, "kappa1");
  detail::require_positive(kappa2, "kappa2");
  double t0 = std::min(0.9 / kappa1, 0.9 / kappa2);
  if (settling && std::isfinite(*settling) && *settling > 0.0) t0 = std::min(t0, *settling);
  return t0;
}

enum class EvolutionPath { full, squeeze };

inline const char* to_string(EvolutionPath p) { return p == EvolutionPath::full ? "full" : "squeeze"; }

struct EvolutionConfig {
  double t0 = 0.0;
  bool coherent_initial = false;  // false: vacuum
  Complex alpha1{};
  Complex alpha2{};
  EvolutionPath path = EvolutionPath::full;

  void validate(double kappa1 = 0.0, double kappa2 = 0.0) const {
    detail::require_positive(t0, "t0");
    if (kappa1 > 0.0 && t0 >= 1.0 / kappa1) throw ValidationError("t0", "must be below 1/kappa1");
    if (kappa2 > 0.0 && t0 >= 1.0 / kappa2) throw ValidationError("t0", "must be below 1/kappa2");
  }
};

inline QuantumState initial_state(const EvolutionConfig& cfg, Cutoffs cut) {
  if (cfg.coherent_initial) return coherent_state(cut.mode1, cut.mode2, cfg.alpha1, cfg.alpha2);
  return vacuum(cut.mode1, cut.mode2);
}

struct EvolutionResult {
  QuantumState state;
  double norm_error = 0.0;
};

/// exp(-i H t0) applied to the configured initial state.
inline EvolutionResult evolve(const HamiltonianSet& h, const EvolutionConfig& cfg) {
  cfg.validate();
  const Cutoffs cut{h.total.cutoff1, h.total.cutoff2};
  HermitianPropagator u(h.total, 1e-12);
  EvolutionResult r{u(initial_state(cfg, cut), cfg.t0), 0.0};
  r.norm_error = std::abs(r.state.norm() - 1.0);
  if (r.norm_error > 1e-9) throw NumericError("evolution lost normalization");
  return r;
}

struct SqueezeResult {
  QuantumState state;
  double renormalization = 1.0;  // factor applied to restore unit norm
  bool warning = false;
};

namespace detail {

inline SqueezeResult finish_squeeze(QuantumState s) {
  SqueezeResult r{std::move(s), 1.0, false};
  r.renormalization = r.state.normalize();
  r.warning = !(r.renormalization >= 0.5 && r.renormalization <= 2.0);
  return r;
}

}  // namespace detail

/// Single-mode exponent on one mode:
///   M = [z1 (a^2 - a+^2) + conj(z2)/2 a^2 - z2/2 a+^2] t0
inline Matrix single_mode_squeeze_exponent(Complex zeta1, Complex zeta2, double t0, int cutoff) {
  const Matrix a = annihilation(cutoff).entries;
  const Matrix a2 = a * a;
  const Matrix ad2 = a2.adjoint();
  return (zeta1 * (a2 - ad2) + 0.5 * std::conj(zeta2) * a2 - 0.5 * zeta2 * ad2) * t0;
}

/// Applies exp(M) on mode 2 (on the only mode for single-mode states), then
/// renormalizes; the exponent is not anti-Hermitian for complex zeta1.
inline SqueezeResult apply_single_mode_squeeze(const SqueezeParams& sp, double t0, const QuantumState& initial) {
  detail::require_positive(t0, "t0");
  const int mode = initial.single_mode() ? 1 : 2;
  const Matrix e = expm(single_mode_squeeze_exponent(sp.zeta1, sp.zeta2, t0, initial.cutoff(mode)));
  return detail::finish_squeeze(apply_on_mode(e, initial, mode));
}

/// Two-mode exponent
///   K = [conj(zt1 + zt2)/2 a1 a2 - (zt1 + zt2)/2 a1+ a2+] t0
/// applied through its action on the state.
inline SqueezeResult apply_two_mode_squeeze(const SqueezeParams& sp, double t0, const QuantumState& initial) {
  detail::require_positive(t0, "t0");
  if (initial.single_mode()) throw ValidationError("state", "two-mode squeeze needs a two-mode state");
  const Complex z = (sp.zeta_t1 + sp.zeta_t2) * t0;
  if (z == Complex{}) return detail::finish_squeeze(initial);
  const Complex lo = 0.5 * std::conj(z);
  const Complex hi = -0.5 * z;
  auto act = [&](const Vector& v) -> Vector {
    QuantumState s{initial.cutoff1, initial.cutoff2, v};
    return lo * lower(lower(s, 1), 2).amplitudes + hi * raise(raise(s, 1), 2).amplitudes;
  };
  const double bound = std::abs(z) * std::sqrt(double(initial.cutoff1 - 1) * double(initial.cutoff2 - 1));
  QuantumState out{initial.cutoff1, initial.cutoff2, expm_apply_action(act, bound, initial.amplitudes)};
  return detail::finish_squeeze(std::move(out));
}

/// State of the squeeze-operator path before displacement:
/// S(zeta) S2(zeta_t) |0,0>. The steady-state displacement D(A1, A2) is
/// carried analytically by the observables.
struct SqueezePathResult {
  QuantumState state;
  double renorm_single = 1.0;
  double renorm_two = 1.0;
  std::vector<std::string> warnings;
};

inline SqueezePathResult squeeze_path_state(const SqueezeParams& sp, double t0, Cutoffs cut) {
  const auto two = apply_two_mode_squeeze(sp, t0, vacuum(cut.mode1, cut.mode2));
  const auto one = apply_single_mode_squeeze(sp, t0, two.state);
  SqueezePathResult r{one.state, one.renormalization, two.renormalization, {}};
  if (one.warning)
    r.warnings.push_back("single-mode squeeze renormalization factor " + std::to_string(one.renormalization) +
                         " outside [0.5, 2]");
  if (two.warning)
    r.warnings.push_back("two-mode squeeze renormalization factor " + std::to_string(two.renormalization) +
                         " outside [0.5, 2]");
  return r;
}

}  // namespace hemtsq
