#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hemtsq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: out-of-range parameters, malformed config, bad flags.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numeric procedure could not produce a trustworthy result.
/// The CLI maps these to exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularCapacitanceError : public NumericError {
 public:
  explicit SingularCapacitanceError(double cm2)
      : NumericError("capacitance matrix is singular (C_M^2 = " + std::to_string(cm2) + " F^2)"),
        cm2_(cm2) {}
  double cm2() const noexcept { return cm2_; }

 private:
  double cm2_;
};

class DegenerateModeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class UndefinedCorrelationError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Raised when a step response has no finite settling time; carries the
/// poles that do not decay.
class NoSettlingError : public NumericError {
 public:
  NoSettlingError(const std::string& what, std::vector<std::complex<double>> roots)
      : NumericError(what), roots_(std::move(roots)) {}
  const std::vector<std::complex<double>>& roots() const noexcept { return roots_; }

 private:
  std::vector<std::complex<double>> roots_;
};

}  // namespace hemtsq
