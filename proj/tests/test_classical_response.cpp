#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hemtsq/classical_response.hpp"
#include "hemtsq/config.hpp"
#include "hemtsq/verify/analytic.hpp"
#include "hemtsq/verify/extended_precision.hpp"

using namespace hemtsq;

namespace {

TransferFunction default_tf(double R_damp = 0.0) {
  const CircuitConfig cfg;
  return build_transfer_function(compute_coefficients(cfg), cfg.transistor, cfg.oscillators, cfg.source, cfg.r0,
                                 R_damp);
}

/// Stable fourth-order band-pass H(s) = N(k s) / D(k s) with known poles.
TransferFunction stable_quartic(double scale = 1.0) {
  // poles -1 +/- 3i, -0.5 +/- 1i (times 1/scale)
  const Complex p[4] = {{-1, 3}, {-1, -3}, {-0.5, 1}, {-0.5, -1}};
  std::vector<Complex> c = {1.0};
  for (const Complex& r : p) {
    std::vector<Complex> n(c.size() + 1, 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      n[k + 1] += c[k];
      n[k] -= c[k] * (r / scale);
    }
    c = n;
  }
  TransferFunction tf;
  tf.den.resize(5);
  for (int k = 0; k < 5; ++k) tf.den[size_t(k)] = c[size_t(k)].real() / c[0].real();
  tf.num = {0.0, 0.0, 2.0 * scale * scale};
  return tf;
}

}  // namespace

TEST(TransferFunction, NoTransconductanceNoOutput) {
  CircuitConfig cfg;
  cfg.transistor.g_m = 0.0;
  const auto tf = build_transfer_function(compute_coefficients(cfg), cfg.transistor, cfg.oscillators, cfg.source,
                                          cfg.r0);
  for (double c : tf.num) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(settling_time(tf), 0.0);
  const auto ts = step_response(tf, 1e-8, 1e-10);
  for (double y : ts.y) EXPECT_EQ(y, 0.0);
}

TEST(TransferFunction, ZeroGainAtDc) {
  const auto tf = default_tf();
  EXPECT_EQ(tf.num[0], 0.0);
  EXPECT_EQ(tf.num[1], 0.0);
  EXPECT_EQ(decompose_step(tf).dc, 0.0);
  const auto ts = step_response(tf, 1e-9, 1e-10);
  double peak = 0.0;
  for (double y : ts.y) peak = std::max(peak, std::abs(y));
  EXPECT_LE(std::abs(ts.y.front()), 1e-12 * peak);
}

TEST(TransferFunction, CoefficientsAgreeWithExtendedPrecision) {
  const CircuitConfig cfg;
  const auto tf = default_tf();
  const auto r = verify::reference_coefficients(cfg.transistor, cfg.oscillators, cfg.source, cfg.operating_point,
                                                cfg.noise_bandwidth, cfg.r0);
  for (int k = 0; k < 5; ++k) EXPECT_LT(verify::relative_error(tf.den[size_t(k)], r.den[k]), 1e-12) << "den " << k;
  EXPECT_LT(verify::relative_error(tf.num[2], r.num2), 1e-12);
}

TEST(TransferFunction, DampingOnlyTouchesCubicTerm) {
  const auto a = default_tf();
  const auto b = default_tf(250.0);
  EXPECT_TRUE(b.damped);
  for (int k : {0, 1, 2, 4}) EXPECT_EQ(a.den[size_t(k)], b.den[size_t(k)]);
  EXPECT_NEAR(b.den[3], a.den[3] / 250.0, 1e-12 * a.den[3]);
}

TEST(Roots, RecoverKnownPoles) {
  const auto tf = stable_quartic();
  const auto roots = polynomial_roots(tf.den);
  ASSERT_EQ(roots.size(), 4u);
  const Complex expected[4] = {{-1, 3}, {-1, -3}, {-0.5, 1}, {-0.5, -1}};
  for (const Complex& e : expected) {
    double best = 1e300;
    for (const Complex& r : roots) best = std::min(best, std::abs(r - e));
    EXPECT_LT(best, 1e-12);
  }
}

TEST(Roots, WidelySeparatedScales) {
  // the circuit polynomial spans many decades; roots must still be accurate
  const auto tf = default_tf();
  for (const Complex& p : polynomial_roots(tf.den))
    EXPECT_LT(std::abs(detail::poly_eval(tf.den, p)) / std::abs(detail::poly_deriv_eval(tf.den, p) * p), 1e-10);
}

TEST(Settling, FirstOrderSystem) {
  TransferFunction tf;
  const double tau = 3e-8;
  tf.num = {1.0};
  tf.den = {1.0, tau};
  EXPECT_NEAR(settling_time(tf), verify::first_order_settling(tau), 1e-6 * tau);
  EXPECT_NEAR(settling_time(tf) / tau, 3.912, 1e-3);
  const auto ts = step_response(tf, 10 * tau, tau / 2000.0);
  EXPECT_NEAR(settling_time(ts, 1.0), tau * std::log(50.0), 1e-3 * tau);
}

TEST(Settling, ZeroNumeratorSettlesImmediately) {
  TransferFunction tf;
  tf.num = {0.0};
  tf.den = {1.0, 2.0, 1.5};
  EXPECT_EQ(settling_time(tf), 0.0);
}

TEST(Settling, UniformTimeScaling) {
  const double base = settling_time(stable_quartic(1.0));
  for (double k : {0.5, 3.0, 1e-8}) EXPECT_NEAR(settling_time(stable_quartic(k)) / base, k, 1e-8) << "k = " << k;
}

TEST(Settling, UndampedPolesRaise) {
  TransferFunction tf;
  tf.num = {0.0, 0.0, 1.0};
  tf.den = {1.0, 0.0, 1.0};
  try {
    settling_time(tf);
    FAIL() << "expected NoSettlingError";
  } catch (const NoSettlingError& e) {
    EXPECT_EQ(e.roots().size(), 2u);
  }
}

TEST(StepResponse, AnalyticAndOdeAgree) {
  const auto tf = stable_quartic();
  const auto a = step_response(tf, 20.0, 0.01);
  const auto b = step_response_ode(tf, 20.0, 0.01);
  double peak = 0.0, diff = 0.0;
  for (size_t i = 0; i < a.y.size(); ++i) {
    peak = std::max(peak, std::abs(a.y[i]));
    diff = std::max(diff, std::abs(a.y[i] - b.y[i]));
  }
  EXPECT_LT(diff, 1e-6 * peak);
}

TEST(StepResponse, AnalyticAndOdeAgreeForCircuit) {
  const auto tf = default_tf();
  const auto a = step_response(tf, 200e-9, 1e-11);
  const auto b = step_response_ode(tf, 200e-9, 1e-11);
  double peak = 0.0, diff = 0.0;
  for (size_t i = 0; i < a.y.size(); ++i) {
    peak = std::max(peak, std::abs(a.y[i]));
    diff = std::max(diff, std::abs(a.y[i] - b.y[i]));
  }
  EXPECT_GT(peak, 0.0);
  EXPECT_LT(diff, 1e-6 * peak);
}

TEST(StepResponse, DefaultCircuitSettlesNearEightyNanoseconds) {
  const auto tf = default_tf();
  try {
    const double ts = settling_time(tf);
    EXPECT_GE(ts, 40e-9);
    EXPECT_LE(ts, 160e-9);
  } catch (const NoSettlingError& e) {
    std::ostringstream roots;
    for (const auto& p : e.roots()) roots << ' ' << p;
    ADD_FAILURE() << e.what() << ":" << roots.str();
  }
}
