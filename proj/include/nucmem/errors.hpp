#pragma once

#include <stdexcept>
#include <string>

namespace nucmem {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class UnstableSystem : public Error {
public:
  UnstableSystem(const std::string& what, double margin) : Error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

private:
  double margin_;
};

class SingularSolve : public Error {
public:
  SingularSolve(const std::string& what, double rcond) : Error(what), rcond_(rcond) {}
  /// Reciprocal condition estimate of the vectorized Lyapunov operator.
  double rcond() const noexcept { return rcond_; }

private:
  double rcond_;
};

class EigenSolverFailure : public Error {
public:
  using Error::Error;
};

class StepSizeRejected : public Error {
public:
  using Error::Error;
};

class NoSqueezing : public Error {
public:
  using Error::Error;
};

class ZeroDetuning : public Error {
public:
  using Error::Error;
};

class NoPositiveField : public Error {
public:
  using Error::Error;
};

class ValidityViolation : public Error {
public:
  using Error::Error;
};

}  // namespace nucmem
