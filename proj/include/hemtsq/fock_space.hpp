#pragma once

// Dense linear algebra on truncated one- and two-mode Fock spaces.
// Two-mode basis ordering is |n1> (x) |n2> with n2 varying fastest, i.e.
// index = n1 * cutoff2 + n2.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <string>

#include "hemtsq/errors.hpp"

namespace hemtsq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct FockOperator {
  int cutoff1 = 0;
  int cutoff2 = 0;  // 0 = single-mode
  Matrix entries;

  bool single_mode() const { return cutoff2 == 0; }
  Eigen::Index dim() const { return entries.rows(); }

  FockOperator adjoint() const { return {cutoff1, cutoff2, entries.adjoint()}; }

  FockOperator& operator+=(const FockOperator& o) {
    check_same(o);
    entries += o.entries;
    return *this;
  }
  FockOperator& operator-=(const FockOperator& o) {
    check_same(o);
    entries -= o.entries;
    return *this;
  }
  FockOperator& operator*=(Complex s) {
    entries *= s;
    return *this;
  }

  void check_same(const FockOperator& o) const {
    if (o.cutoff1 != cutoff1 || o.cutoff2 != cutoff2)
      throw ValidationError("operator", "dimension mismatch");
  }
};

inline FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
inline FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
inline FockOperator operator*(Complex s, FockOperator a) { return a *= s; }
inline FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  a.check_same(b);
  return {a.cutoff1, a.cutoff2, a.entries * b.entries};
}

struct QuantumState {
  int cutoff1 = 0;
  int cutoff2 = 0;
  Vector amplitudes;

  bool single_mode() const { return cutoff2 == 0; }
  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }

  int cutoff(int mode) const {
    if (mode == 1) return cutoff1;
    if (mode == 2 && !single_mode()) return cutoff2;
    throw ValidationError("mode", "no mode " + std::to_string(mode) + " in this state");
  }

  /// Divides by the norm and returns the factor 1/||psi|| that was applied.
  double normalize() {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericError("cannot normalize a zero or non-finite state");
    amplitudes /= n;
    return 1.0 / n;
  }
};

namespace detail {

inline void require_cutoff(int cutoff, const char* field) {
  if (cutoff < 2) throw ValidationError(field, "cutoff must be >= 2 (got " + std::to_string(cutoff) + ")");
}

inline Eigen::Index total_dim(int c1, int c2) { return c2 == 0 ? c1 : Eigen::Index(c1) * c2; }

}  // namespace detail

inline FockOperator annihilation(int cutoff) {
  detail::require_cutoff(cutoff, "cutoff");
  FockOperator a{cutoff, 0, Matrix::Zero(cutoff, cutoff)};
  for (int n = 1; n < cutoff; ++n) a.entries(n - 1, n) = std::sqrt(double(n));
  return a;
}

inline FockOperator creation(int cutoff) { return annihilation(cutoff).adjoint(); }

inline FockOperator number_operator(int cutoff) {
  detail::require_cutoff(cutoff, "cutoff");
  FockOperator n{cutoff, 0, Matrix::Zero(cutoff, cutoff)};
  for (int k = 0; k < cutoff; ++k) n.entries(k, k) = double(k);
  return n;
}

inline FockOperator identity(int cutoff1, int cutoff2 = 0) {
  const auto d = detail::total_dim(cutoff1, cutoff2);
  return {cutoff1, cutoff2, Matrix::Identity(d, d)};
}

inline FockOperator zero_operator(int cutoff1, int cutoff2 = 0) {
  const auto d = detail::total_dim(cutoff1, cutoff2);
  return {cutoff1, cutoff2, Matrix::Zero(d, d)};
}

inline FockOperator commutator(const FockOperator& a, const FockOperator& b) { return a * b - b * a; }

/// Lifts a single-mode operator onto the two-mode space: op (x) I for mode 1,
/// I (x) op for mode 2.
inline FockOperator embed(const FockOperator& op, int mode, int cutoff_other) {
  if (!op.single_mode()) throw ValidationError("op", "embed expects a single-mode operator");
  if (op.dim() != op.cutoff1) throw ValidationError("op", "entries do not match cutoff");
  detail::require_cutoff(cutoff_other, "cutoff_other");
  const int c = op.cutoff1;
  if (mode == 1) {
    FockOperator out{c, cutoff_other, Matrix::Zero(Eigen::Index(c) * cutoff_other, Eigen::Index(c) * cutoff_other)};
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) {
        const Complex v = op.entries(i, j);
        if (v == Complex{}) continue;
        for (int k = 0; k < cutoff_other; ++k) out.entries(i * cutoff_other + k, j * cutoff_other + k) = v;
      }
    return out;
  }
  if (mode == 2) {
    FockOperator out{cutoff_other, c, Matrix::Zero(Eigen::Index(c) * cutoff_other, Eigen::Index(c) * cutoff_other)};
    for (int k = 0; k < cutoff_other; ++k)
      out.entries.block(Eigen::Index(k) * c, Eigen::Index(k) * c, c, c) = op.entries;
    return out;
  }
  throw ValidationError("mode", "must be 1 or 2");
}

inline bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

/// Matrix exponential (scaling and squaring with a Pade approximant).
inline Matrix expm(const Matrix& m) {
  if (!all_finite(m)) throw NumericError("expm: input has non-finite entries");
  Matrix out = m.exp();
  if (!all_finite(out)) throw NumericError("expm: result overflowed");
  return out;
}

inline FockOperator expm(const FockOperator& op) { return {op.cutoff1, op.cutoff2, expm(op.entries)}; }

inline QuantumState apply(const FockOperator& op, const QuantumState& psi) {
  if (op.cutoff1 != psi.cutoff1 || op.cutoff2 != psi.cutoff2)
    throw ValidationError("state", "operator/state dimension mismatch");
  return {psi.cutoff1, psi.cutoff2, op.entries * psi.amplitudes};
}

inline Complex expectation(const FockOperator& op, const QuantumState& psi) {
  if (op.cutoff1 != psi.cutoff1 || op.cutoff2 != psi.cutoff2)
    throw ValidationError("state", "operator/state dimension mismatch");
  return psi.amplitudes.dot(op.entries * psi.amplitudes);
}

/// ||op - op^dagger||_F / ||op||_F, 0 for the zero operator.
inline double hermiticity_defect(const Matrix& m) {
  const double n = m.norm();
  if (n == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / n;
}

inline double hermiticity_defect(const FockOperator& op) { return hermiticity_defect(op.entries); }

// ---------------------------------------------------------------------------
// States

inline QuantumState vacuum(int cutoff1, int cutoff2 = 0) {
  detail::require_cutoff(cutoff1, "cutoff1");
  if (cutoff2 != 0) detail::require_cutoff(cutoff2, "cutoff2");
  QuantumState s{cutoff1, cutoff2, Vector::Zero(detail::total_dim(cutoff1, cutoff2))};
  s.amplitudes(0) = 1.0;
  return s;
}

inline QuantumState fock_state(int cutoff1, int cutoff2, int n1, int n2 = 0) {
  QuantumState s = vacuum(cutoff1, cutoff2);
  if (n1 < 0 || n1 >= cutoff1) throw ValidationError("n1", "outside the truncated space");
  if (cutoff2 == 0) {
    s.amplitudes(0) = 0.0;
    s.amplitudes(n1) = 1.0;
    return s;
  }
  if (n2 < 0 || n2 >= cutoff2) throw ValidationError("n2", "outside the truncated space");
  s.amplitudes(0) = 0.0;
  s.amplitudes(Eigen::Index(n1) * cutoff2 + n2) = 1.0;
  return s;
}

/// Truncated single-mode coherent amplitudes, renormalized.
inline Vector coherent_amplitudes(int cutoff, Complex alpha) {
  Vector v(cutoff);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < cutoff; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(double(n + 1));
  }
  return v / v.norm();
}

inline QuantumState product_state(const Vector& mode1, const Vector& mode2) {
  const int c1 = int(mode1.size()), c2 = int(mode2.size());
  QuantumState s{c1, c2, Vector(Eigen::Index(c1) * c2)};
  for (int i = 0; i < c1; ++i) s.amplitudes.segment(Eigen::Index(i) * c2, c2) = mode1(i) * mode2;
  return s;
}

inline QuantumState coherent_state(int cutoff1, int cutoff2, Complex alpha1, Complex alpha2 = {}) {
  detail::require_cutoff(cutoff1, "cutoff1");
  if (cutoff2 == 0) return {cutoff1, 0, coherent_amplitudes(cutoff1, alpha1)};
  detail::require_cutoff(cutoff2, "cutoff2");
  return product_state(coherent_amplitudes(cutoff1, alpha1), coherent_amplitudes(cutoff2, alpha2));
}

/// a_mode |psi> computed directly from the basis layout (no dense operator).
inline QuantumState lower(const QuantumState& psi, int mode) {
  QuantumState out{psi.cutoff1, psi.cutoff2, Vector::Zero(psi.dim())};
  if (psi.single_mode()) {
    if (mode != 1) throw ValidationError("mode", "single-mode state has only mode 1");
    for (int n = 1; n < psi.cutoff1; ++n) out.amplitudes(n - 1) = std::sqrt(double(n)) * psi.amplitudes(n);
    return out;
  }
  const int c2 = psi.cutoff2;
  if (mode == 1) {
    for (int n1 = 1; n1 < psi.cutoff1; ++n1)
      out.amplitudes.segment(Eigen::Index(n1 - 1) * c2, c2) =
          std::sqrt(double(n1)) * psi.amplitudes.segment(Eigen::Index(n1) * c2, c2);
  } else if (mode == 2) {
    for (int n1 = 0; n1 < psi.cutoff1; ++n1)
      for (int n2 = 1; n2 < c2; ++n2)
        out.amplitudes(Eigen::Index(n1) * c2 + n2 - 1) =
            std::sqrt(double(n2)) * psi.amplitudes(Eigen::Index(n1) * c2 + n2);
  } else {
    throw ValidationError("mode", "must be 1 or 2");
  }
  return out;
}

/// a_mode^dagger |psi>; the top Fock level is truncated away.
inline QuantumState raise(const QuantumState& psi, int mode) {
  QuantumState out{psi.cutoff1, psi.cutoff2, Vector::Zero(psi.dim())};
  if (psi.single_mode()) {
    if (mode != 1) throw ValidationError("mode", "single-mode state has only mode 1");
    for (int n = 1; n < psi.cutoff1; ++n) out.amplitudes(n) = std::sqrt(double(n)) * psi.amplitudes(n - 1);
    return out;
  }
  const int c2 = psi.cutoff2;
  if (mode == 1) {
    for (int n1 = 1; n1 < psi.cutoff1; ++n1)
      out.amplitudes.segment(Eigen::Index(n1) * c2, c2) =
          std::sqrt(double(n1)) * psi.amplitudes.segment(Eigen::Index(n1 - 1) * c2, c2);
  } else if (mode == 2) {
    for (int n1 = 0; n1 < psi.cutoff1; ++n1)
      for (int n2 = 1; n2 < c2; ++n2)
        out.amplitudes(Eigen::Index(n1) * c2 + n2) =
            std::sqrt(double(n2)) * psi.amplitudes(Eigen::Index(n1) * c2 + n2 - 1);
  } else {
    throw ValidationError("mode", "must be 1 or 2");
  }
  return out;
}

/// exp(M) v where M is only available through its action v -> M v and an
/// upper bound on its 1-norm.
template <class Action>
Vector expm_apply_action(Action&& act, double norm_bound, const Vector& v, double tol = 1e-15) {
  if (!std::isfinite(norm_bound) || norm_bound < 0.0) throw NumericError("expm_apply: bad norm bound");
  const int steps = std::max(1, int(std::ceil(norm_bound)));
  if (steps > 1000000) throw NumericError("expm_apply: operator norm too large");
  const double inv = 1.0 / double(steps);
  Vector out = v;
  for (int s = 0; s < steps; ++s) {
    Vector term = out;
    Vector acc = out;
    for (int k = 1; k < 200; ++k) {
      term = act(term) * (inv / double(k));
      acc += term;
      if (term.norm() <= tol * acc.norm()) break;
    }
    out = acc;
  }
  if (!all_finite(out)) throw NumericError("expm_apply: result overflowed");
  return out;
}

/// exp(m) v without forming exp(m): Taylor series on sub-steps of norm <= 1.
inline Vector expm_apply(const Matrix& m, const Vector& v, double tol = 1e-15) {
  if (m.cols() != v.size()) throw ValidationError("state", "dimension mismatch");
  if (!all_finite(m)) throw NumericError("expm_apply: input has non-finite entries");
  const double norm1 = m.size() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
  return expm_apply_action([&](const Vector& x) -> Vector { return m * x; }, norm1, v, tol);
}

/// Applies a single-mode matrix to one mode of a two-mode state.
inline QuantumState apply_on_mode(const Matrix& op, const QuantumState& psi, int mode) {
  if (psi.single_mode()) {
    if (mode != 1 || op.rows() != psi.cutoff1) throw ValidationError("op", "dimension mismatch");
    return {psi.cutoff1, 0, op * psi.amplitudes};
  }
  const int c1 = psi.cutoff1, c2 = psi.cutoff2;
  // amplitudes viewed as a c1 x c2 row-major matrix Psi(n1, n2)
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> in(psi.amplitudes.data(), c1, c2);
  RowMat res;
  if (mode == 1) {
    if (op.rows() != c1 || op.cols() != c1) throw ValidationError("op", "dimension mismatch");
    res = op * in;
  } else if (mode == 2) {
    if (op.rows() != c2 || op.cols() != c2) throw ValidationError("op", "dimension mismatch");
    res = in * op.transpose();
  } else {
    throw ValidationError("mode", "must be 1 or 2");
  }
  QuantumState out{c1, c2, Vector(psi.dim())};
  Eigen::Map<RowMat>(out.amplitudes.data(), c1, c2) = res;
  return out;
}

/// Reusable exp(-i H t) for a Hermitian H via its eigendecomposition.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const FockOperator& h, double hermiticity_tol = 1e-10)
      : cutoff1_(h.cutoff1), cutoff2_(h.cutoff2) {
    if (!all_finite(h.entries)) throw NumericError("propagator: Hamiltonian has non-finite entries");
    if (hermiticity_defect(h) > hermiticity_tol)
      throw NumericError("propagator: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h.entries + h.entries.adjoint()));
    if (es.info() != Eigen::Success) throw NumericError("propagator: eigendecomposition failed");
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
  }

  QuantumState operator()(const QuantumState& psi, double t) const {
    if (psi.cutoff1 != cutoff1_ || psi.cutoff2 != cutoff2_)
      throw ValidationError("state", "propagator/state dimension mismatch");
    Vector c = vectors_.adjoint() * psi.amplitudes;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -values_(k) * t);
    return {cutoff1_, cutoff2_, vectors_ * c};
  }

  Matrix unitary(double t) const {
    Vector phases(values_.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -values_(k) * t);
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

  const Eigen::VectorXd& eigenvalues() const { return values_; }

 private:
  int cutoff1_, cutoff2_;
  Eigen::VectorXd values_;
  Matrix vectors_;
};

inline QuantumState propagate(const FockOperator& h, const QuantumState& psi, double t) {
  return HermitianPropagator(h)(psi, t);
}

}  // namespace hemtsq
