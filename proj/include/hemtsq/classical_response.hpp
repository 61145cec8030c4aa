#pragma once

// Classical step response of the simplified small-signal circuit used to
// estimate the evolution window, and settling-time extraction.
//
// Polynomials are stored with ascending powers of s.

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "hemtsq/circuit_model.hpp"

namespace hemtsq {

using Poly = std::vector<double>;

struct TransferFunction {
  Poly num;
  Poly den;
  double Lp2 = 0.0;
  double Cp1 = 0.0;
  double Cp2 = 0.0;
  double Av0 = 0.0;
  bool damped = false;  // true when the s^3 term is divided by R_damp
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> y;
};

namespace detail {

inline int degree(const Poly& p) {
  for (int k = int(p.size()) - 1; k >= 0; --k)
    if (p[size_t(k)] != 0.0) return k;
  return -1;
}

template <class T>
T poly_eval(const Poly& p, T x) {
  T acc{0};
  for (size_t k = p.size(); k-- > 0;) acc = acc * x + T(p[k]);
  return acc;
}

template <class T>
T poly_deriv_eval(const Poly& p, T x) {
  T acc{0};
  for (size_t k = p.size(); k-- > 1;) acc = acc * x + T(double(k) * p[k]);
  return acc;
}

/// Characteristic frequency used to bring the coefficients to O(1):
/// (a0 / an)^(1/n).
inline double frequency_scale(const Poly& den) {
  const int n = degree(den);
  if (n <= 0) return 1.0;
  int lo = 0;
  while (den[size_t(lo)] == 0.0) ++lo;
  if (lo == n) return 1.0;
  return std::pow(std::abs(den[size_t(lo)] / den[size_t(n)]), 1.0 / double(n - lo));
}

inline Poly scaled(const Poly& p, double sigma) {
  Poly out(p.size());
  double f = 1.0;
  for (size_t k = 0; k < p.size(); ++k, f *= sigma) out[k] = p[k] * f;
  return out;
}

}  // namespace detail

/// Roots of an ascending-coefficient polynomial, computed on a frequency-
/// scaled copy and polished with Newton steps on the original.
inline std::vector<Complex> polynomial_roots(const Poly& p) {
  const int n = detail::degree(p);
  if (n < 1) return {};
  const double sigma = detail::frequency_scale(p);
  Poly q = detail::scaled(p, sigma);
  q.resize(size_t(n) + 1);
  const double lead = q[size_t(n)];
  for (auto& c : q) c /= lead;

  std::vector<Complex> roots;
  if (n == 1) {
    roots.push_back(Complex(-q[0], 0.0));
  } else {
    Eigen::VectorXd coeffs(n + 1);
    for (int k = 0; k <= n; ++k) coeffs(k) = q[size_t(k)];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    for (Eigen::Index k = 0; k < solver.roots().size(); ++k) roots.push_back(solver.roots()(k));
  }
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const Complex f = detail::poly_eval(q, r);
      const Complex d = detail::poly_deriv_eval(q, r);
      if (d == Complex{}) break;
      const Complex step = f / d;
      if (!std::isfinite(std::abs(step))) break;
      r -= step;
    }
    r *= sigma;
  }
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

/// The simplified circuit's transfer function V_out / V_RF with
/// L_p2 = L_2N || L_2, C_p1 = C_gs + C_1 + (C_gd + C_f) A_v0, C_p2 = C_N + C_2
/// and A_v0 = g_m r0. The s^3 coefficient is divided by R_damp when
/// R_damp > 0; with R_damp = 0 the printed form is used unchanged.
inline TransferFunction build_transfer_function(const DerivedCoefficients& c, const TransistorParams& t,
                                                const OscillatorParams& o, const SourceParams& s, double r0,
                                                double R_damp = 0.0) {
  detail::require_nonnegative(r0, "r0");
  detail::require_nonnegative(R_damp, "R_damp");
  const double inv_Lp2 = 1.0 / o.L2 + c.linearized.inv_L2N;
  if (!(inv_Lp2 > 0.0)) throw DegenerateModeError("L_2N || L_2 is not a positive inductance");
  TransferFunction tf;
  tf.Lp2 = 1.0 / inv_Lp2;
  tf.Av0 = t.g_m * r0;
  tf.Cp1 = t.C_gs + o.C1 + (t.C_gd + s.C_f) * tf.Av0;
  tf.Cp2 = c.dc.C_N + o.C2;
  tf.damped = R_damp > 0.0;
  const double L1 = o.L1, Lp2 = tf.Lp2, Cp1 = tf.Cp1, Cp2 = tf.Cp2;
  tf.num = {0.0, 0.0, t.g_m * Lp2 * L1};
  tf.den = {1.0, L1, L1 * Cp1 + Lp2 * Cp2, Lp2 * L1 * Cp2 / (tf.damped ? R_damp : 1.0), Lp2 * L1 * Cp1 * Cp2};
  return tf;
}

/// Poles of the transfer function and the residues of its step response
/// Y(s) = N(s) / (s D(s)): y(t) = dc + sum_k r_k exp(p_k t).
struct StepDecomposition {
  std::vector<Complex> poles;
  std::vector<Complex> residues;
  double dc = 0.0;
};

inline StepDecomposition decompose_step(const TransferFunction& tf) {
  const int nd = detail::degree(tf.den);
  const int nn = detail::degree(tf.num);
  if (nd < 0) throw ValidationError("den", "denominator is identically zero");
  if (tf.den[0] == 0.0) throw NumericError("transfer function has a pole at s = 0");
  if (nn > nd) throw ValidationError("num", "transfer function is improper");
  StepDecomposition d;
  d.dc = nn < 0 ? 0.0 : tf.num[0] / tf.den[0];
  if (nn < 0) return d;
  d.poles = polynomial_roots(tf.den);
  for (const Complex& p : d.poles) {
    const Complex dd = detail::poly_deriv_eval(tf.den, p);
    if (std::abs(dd) == 0.0) throw NumericError("repeated pole in transfer function");
    d.residues.push_back(detail::poly_eval(tf.num, p) / (p * dd));
  }
  return d;
}

inline double evaluate_step(const StepDecomposition& d, double t) {
  Complex acc{d.dc, 0.0};
  for (size_t k = 0; k < d.poles.size(); ++k) acc += d.residues[k] * std::exp(d.poles[k] * t);
  return acc.real();
}

/// Analytic step response sampled on [0, duration] with spacing dt.
inline TimeSeries step_response(const TransferFunction& tf, double duration, double dt) {
  detail::require_positive(duration, "duration");
  detail::require_positive(dt, "dt");
  const auto d = decompose_step(tf);
  const size_t n = size_t(std::floor(duration / dt + 1e-9)) + 1;
  if (n > 50000000) throw ValidationError("dt", "too many samples");
  TimeSeries ts;
  ts.t.resize(n);
  ts.y.resize(n);
  for (size_t i = 0; i < n; ++i) {
    ts.t[i] = double(i) * dt;
    ts.y[i] = evaluate_step(d, ts.t[i]);
  }
  return ts;
}

/// Step response by trapezoidal integration of the controllable canonical
/// state-space form, in time scaled by the characteristic frequency. Each
/// output interval dt is split into enough sub-steps to resolve the fastest
/// pole.
inline TimeSeries step_response_ode(const TransferFunction& tf, double duration, double dt,
                                    double substep_fraction = 2e-4) {
  detail::require_positive(duration, "duration");
  detail::require_positive(dt, "dt");
  const int n = detail::degree(tf.den);
  if (n < 1) throw ValidationError("den", "need a dynamic denominator");
  if (detail::degree(tf.num) > n) throw ValidationError("num", "transfer function is improper");
  const double sigma = detail::frequency_scale(tf.den);
  Poly a = detail::scaled(tf.den, sigma);
  Poly b = detail::scaled(tf.num, sigma);
  a.resize(size_t(n) + 1);
  b.resize(size_t(n) + 1, 0.0);
  const double lead = a[size_t(n)];
  for (auto& c : a) c /= lead;
  for (auto& c : b) c /= lead;

  // x' = A x + B u, y = C x + D u with u = 1
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  for (int k = 0; k < n; ++k) A(n - 1, k) = -a[size_t(k)];
  Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
  B(n - 1) = 1.0;
  const double D = b[size_t(n)];
  Eigen::RowVectorXd C(n);
  for (int k = 0; k < n; ++k) C(k) = b[size_t(k)] - D * a[size_t(k)];

  double fastest = 0.0;
  for (const Complex& p : polynomial_roots(a)) fastest = std::max(fastest, std::abs(p));
  if (fastest == 0.0) fastest = 1.0;
  const double h_out = dt * sigma;
  const int sub = std::max(1, int(std::ceil(h_out * fastest / substep_fraction)));
  const double h = h_out / sub;

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lhs(I - 0.5 * h * A);
  const Eigen::MatrixXd step = lhs.solve(I + 0.5 * h * A);
  const Eigen::VectorXd forcing = lhs.solve(h * B);

  const size_t samples = size_t(std::floor(duration / dt + 1e-9)) + 1;
  TimeSeries ts;
  ts.t.resize(samples);
  ts.y.resize(samples);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < samples; ++i) {
    ts.t[i] = double(i) * dt;
    ts.y[i] = C.dot(x) + D;
    if (i + 1 < samples)
      for (int k = 0; k < sub; ++k) x = step * x + forcing;
  }
  return ts;
}

/// Last time the series leaves the band final +/- band * max|y - final|.
/// Returns 0 when the response never deviates from its final value.
inline double settling_time(const TimeSeries& ts, double final_value, double band = 0.02) {
  if (ts.t.size() != ts.y.size() || ts.t.empty()) throw ValidationError("series", "empty or inconsistent");
  double peak = 0.0;
  for (double y : ts.y) peak = std::max(peak, std::abs(y - final_value));
  if (peak == 0.0) return 0.0;
  const double tol = band * peak;
  for (size_t i = ts.y.size(); i-- > 0;)
    if (std::abs(ts.y[i] - final_value) > tol) {
      if (i + 1 >= ts.y.size()) return std::numeric_limits<double>::infinity();
      // linear interpolation of the crossing
      const double e0 = std::abs(ts.y[i] - final_value) - tol;
      const double e1 = std::abs(ts.y[i + 1] - final_value) - tol;
      return ts.t[i] + (ts.t[i + 1] - ts.t[i]) * e0 / (e0 - e1);
    }
  return ts.t.front();
}

/// Settling time of the analytic step response. Every pole must decay:
/// poles with Re p > -1e-9 |p| make the response non-settling.
inline double settling_time(const TransferFunction& tf, double band = 0.02) {
  detail::require_positive(band, "band");
  const auto d = decompose_step(tf);
  if (d.poles.empty()) return 0.0;
  std::vector<Complex> bad;
  double slowest = std::numeric_limits<double>::infinity();
  double fastest_osc = 0.0;
  double total = 0.0;
  for (size_t k = 0; k < d.poles.size(); ++k) {
    const Complex p = d.poles[k];
    if (p.real() > -1e-9 * std::abs(p)) bad.push_back(p);
    slowest = std::min(slowest, -p.real());
    fastest_osc = std::max(fastest_osc, std::abs(p));
    total += std::abs(d.residues[k]);
  }
  if (!bad.empty()) throw NoSettlingError("step response does not settle: non-decaying poles", bad);
  if (total == 0.0) return 0.0;

  const double period = 2.0 * constants::pi / fastest_osc;
  auto samples_for = [&](double span) {
    return std::min<size_t>(20000000, std::max<size_t>(20001, size_t(40.0 * span / period)));
  };
  // coarse peak estimate, then a window long enough for every transient
  // to fall far below the band
  const double t_probe = 5.0 / slowest;
  double peak0 = 0.0;
  {
    const size_t n = samples_for(t_probe);
    for (size_t i = 0; i < n; ++i)
      peak0 = std::max(peak0, std::abs(evaluate_step(d, t_probe * double(i) / double(n - 1)) - d.dc));
  }
  if (peak0 == 0.0) return 0.0;
  const double t_end = std::max(t_probe, (std::log(total / (band * peak0)) + 3.0) / slowest);
  const size_t n = samples_for(t_end);
  const double dt = t_end / double(n - 1);

  double peak = 0.0;
  std::vector<double> dev(n);
  for (size_t i = 0; i < n; ++i) {
    dev[i] = std::abs(evaluate_step(d, double(i) * dt) - d.dc);
    peak = std::max(peak, dev[i]);
  }
  const double tol = band * peak;
  size_t idx = n;
  for (size_t i = n; i-- > 0;)
    if (dev[i] > tol) {
      idx = i;
      break;
    }
  if (idx == n) return 0.0;
  if (idx + 1 >= n) throw NumericError("settling window too short");
  // bisection on the exit crossing between samples idx and idx + 1
  double lo = double(idx) * dt, hi = double(idx + 1) * dt;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(evaluate_step(d, mid) - d.dc) > tol)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hemtsq
