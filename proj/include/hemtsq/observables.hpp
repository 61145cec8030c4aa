#pragma once

// Quadrature variances, photon statistics, g2(0) and the EPR variance.
// Quadratures are X_theta = (a e^{-i theta} + a+ e^{i theta}) / 2, so the
// vacuum variance is 0.25.
//
// Everything is computed from normally ordered moments <a+^p a^q>, p, q <= 2,
// which makes a displacement D(alpha) an exact algebraic shift.

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "hemtsq/constants.hpp"
#include "hemtsq/fock_space.hpp"

namespace hemtsq {

struct ModeMoments {
  // m[p][q] = <a+^p a^q>
  std::array<std::array<Complex, 3>, 3> m{};

  Complex mean() const { return m[0][1]; }
  /// <a+ a> - |<a>|^2
  double centered_number() const { return m[1][1].real() - std::norm(m[0][1]); }
  /// <a^2> - <a>^2
  Complex centered_square() const { return m[0][2] - m[0][1] * m[0][1]; }
};

inline ModeMoments mode_moments(const QuantumState& psi, int mode) {
  std::array<Vector, 3> v;
  v[0] = psi.amplitudes;
  QuantumState s1 = lower(psi, mode);
  v[2] = lower(s1, mode).amplitudes;
  v[1] = std::move(s1.amplitudes);
  ModeMoments out;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) out.m[p][q] = v[p].dot(v[q]);
  return out;
}

/// Moments of D(alpha)|psi> from the moments of |psi>.
inline ModeMoments displace(const ModeMoments& in, Complex alpha) {
  static constexpr double binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
  const Complex ac = std::conj(alpha);
  auto ipow = [](Complex z, int k) {
    Complex r{1.0, 0.0};
    for (int i = 0; i < k; ++i) r *= z;
    return r;
  };
  ModeMoments out;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      Complex acc{};
      for (int p = 0; p <= j; ++p)
        for (int q = 0; q <= k; ++q)
          acc += binom[j][p] * binom[k][q] * ipow(ac, j - p) * ipow(alpha, k - q) * in.m[p][q];
      out.m[j][k] = acc;
    }
  return out;
}

inline double quadrature_variance(const ModeMoments& mm, double theta) {
  const double N = mm.centered_number();
  const Complex M = mm.centered_square();
  return (2.0 * N + 1.0) / 4.0 + 0.5 * (M * std::polar(1.0, -2.0 * theta)).real();
}

inline double quadrature_variance(const QuantumState& psi, int mode, double theta) {
  return quadrature_variance(mode_moments(psi, mode), theta);
}

struct MinimumQuadrature {
  double variance = 0.25;
  double theta = 0.0;  // in [0, pi)
};

inline MinimumQuadrature minimum_quadrature(const ModeMoments& mm) {
  const double N = mm.centered_number();
  const Complex M = mm.centered_square();
  MinimumQuadrature r;
  r.variance = (2.0 * N + 1.0) / 4.0 - 0.5 * std::abs(M);
  double th = 0.5 * (std::arg(M) - constants::pi);
  th = std::fmod(th, constants::pi);
  if (th < 0.0) th += constants::pi;
  r.theta = th;
  return r;
}

struct PhotonStats {
  double n_mean = 0.0;
  double n_var = 0.0;
};

inline PhotonStats photon_stats(const ModeMoments& mm) {
  const double n = mm.m[1][1].real();
  // <n^2> = <a+^2 a^2> + <a+ a>
  return {n, mm.m[2][2].real() + n - n * n};
}

inline PhotonStats photon_stats(const QuantumState& psi, int mode) { return photon_stats(mode_moments(psi, mode)); }

struct G2 {
  double mean_normalized = 1.0;  // 1 + (V - n)/n
  double standard = 1.0;  // 1 + (V - n)/n^2
};

inline G2 g2_zero(const PhotonStats& ps) {
  if (!(ps.n_mean >= 1e-12))
    throw UndefinedCorrelationError("g2(0) is undefined for <n> = " + std::to_string(ps.n_mean));
  const double excess = ps.n_var - ps.n_mean;
  return {1.0 + excess / ps.n_mean, 1.0 + excess / (ps.n_mean * ps.n_mean)};
}

inline G2 g2_zero(const QuantumState& psi, int mode) { return g2_zero(photon_stats(psi, mode)); }

/// Var(X1 - X2) + Var(Y1 + Y2); vacuum gives 1, values below 1 witness
/// two-mode squeezing. Only centered moments enter, so the result does not
/// depend on any displacement.
inline double epr_variance(const QuantumState& psi) {
  if (psi.single_mode()) throw ValidationError("state", "EPR variance needs a two-mode state");
  const QuantumState l1 = lower(psi, 1);
  const QuantumState l2 = lower(psi, 2);
  const QuantumState l12 = lower(l1, 2);
  const Complex a1 = psi.amplitudes.dot(l1.amplitudes);
  const Complex a2 = psi.amplitudes.dot(l2.amplitudes);
  const double n1 = l1.amplitudes.squaredNorm() - std::norm(a1);
  const double n2 = l2.amplitudes.squaredNorm() - std::norm(a2);
  const Complex c = psi.amplitudes.dot(l12.amplitudes) - a1 * a2;
  return n1 + n2 + 1.0 - 2.0 * c.real();
}

struct ObservableReport {
  int mode = 2;
  double var_x = 0.25;
  double var_y = 0.25;
  double var_min = 0.25;
  double theta_min = 0.0;
  double n_mean = 0.0;
  double n_var = 0.0;
  double g2 = std::numeric_limits<double>::quiet_NaN();
  double g2_standard = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> epr;
  bool g2_defined = false;
};

/// Full report for one mode of D(alpha1, alpha2)|psi>.
inline ObservableReport observe(const QuantumState& psi, int mode, Complex displacement = {}) {
  ObservableReport r;
  r.mode = mode;
  const ModeMoments mm = displace(mode_moments(psi, mode), displacement);
  r.var_x = quadrature_variance(mm, 0.0);
  r.var_y = quadrature_variance(mm, constants::pi / 2.0);
  const auto mq = minimum_quadrature(mm);
  r.var_min = mq.variance;
  r.theta_min = mq.theta;
  const auto ps = photon_stats(mm);
  r.n_mean = ps.n_mean;
  r.n_var = ps.n_var;
  if (ps.n_mean >= 1e-12) {
    const auto g = g2_zero(ps);
    r.g2 = g.mean_normalized;
    r.g2_standard = g.standard;
    r.g2_defined = true;
  }
  if (!psi.single_mode()) r.epr = epr_variance(psi);
  return r;
}

}  // namespace hemtsq
