#pragma once

// Closed-form reference results used as test oracles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "hemtsq/fock_space.hpp"
#include "hemtsq/hamiltonian.hpp"

namespace hemtsq::verify {

/// Plain Taylor series sum_{k < terms} M^k / k!.
inline Matrix taylor_expm(const Matrix& m, int terms = 60) {
  Matrix acc = Matrix::Identity(m.rows(), m.cols());
  Matrix term = acc;
  for (int k = 1; k < terms; ++k) {
    term = term * m / double(k);
    acc += term;
  }
  return acc;
}

/// Single-mode Gaussian state D(alpha) S(xi)|0> with
/// S(xi) = exp[(conj(xi) a^2 - xi a+^2) / 2].
struct GaussianMode {
  Complex xi{};
  Complex alpha{};

  double r() const { return std::abs(xi); }
  double centered_number() const { return std::pow(std::sinh(r()), 2); }
  Complex centered_square() const { return -std::polar(std::sinh(r()) * std::cosh(r()), std::arg(xi)); }

  double variance(double theta) const {
    return (2.0 * centered_number() + 1.0) / 4.0 + 0.5 * (centered_square() * std::polar(1.0, -2.0 * theta)).real();
  }
  double n_mean() const { return std::norm(alpha) + centered_number(); }
  double n_var() const {
    const double N = centered_number();
    const Complex M = centered_square();
    return N * (N + 1.0) + std::norm(M) + std::norm(alpha) * (2.0 * N + 1.0) +
           2.0 * (std::conj(alpha) * std::conj(alpha) * M).real();
  }
  double g2_paper() const { return 1.0 + (n_var() - n_mean()) / n_mean(); }
  double g2_standard() const { return 1.0 + (n_var() - n_mean()) / (n_mean() * n_mean()); }
};

/// Two-mode squeezed vacuum exp(conj(xi) a1 a2 - xi a1+ a2+)|0,0>.
struct TwoModeSqueezedVacuum {
  Complex xi{};

  double n_mean() const { return std::pow(std::sinh(std::abs(xi)), 2); }
  /// Var(X1 - X2) + Var(Y1 + Y2); <a1 a2> = -e^{i arg xi} sinh r cosh r.
  double epr() const {
    const double r = std::abs(xi);
    const double c = -std::cos(std::arg(xi)) * std::sinh(r) * std::cosh(r);
    return 2.0 * n_mean() + 1.0 - 2.0 * c;
  }
};

/// <a(t)> for H = w a+a + d a+ + conj(d) a starting from vacuum.
inline Complex driven_oscillator_mean(double omega, Complex d, double t) {
  return (d / omega) * (std::polar(1.0, -omega * t) - 1.0);
}

/// Normal-mode frequencies of the quadratic part of the ladder Hamiltonian
/// from the 4x4 Bogoliubov dynamical matrix [[A, B], [-B*, -A*]].
inline std::vector<double> normal_mode_frequencies(const LinearTerms& L) {
  Eigen::Matrix2cd A, B;
  A << L.omega1, -L.kc - L.k12, -L.kc + L.k12, L.omega2;
  B << 0.0, L.kc - L.k12, L.kc - L.k12, -2.0 * L.k22;
  Eigen::Matrix4cd D;
  D << A, B, -B.conjugate(), -A.conjugate();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(D);
  std::vector<double> w;
  for (int k = 0; k < 4; ++k)
    if (es.eigenvalues()(k).real() > 0.0) w.push_back(es.eigenvalues()(k).real());
  std::sort(w.begin(), w.end());
  return w;
}

/// 2% settling time of the unit step of 1 / (tau s + 1).
inline double first_order_settling(double tau, double band = 0.02) { return -tau * std::log(band); }

}  // namespace hemtsq::verify
