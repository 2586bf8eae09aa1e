#pragma once

#include <stdexcept>
#include <string>

namespace sps {

/// Base class for all recoverable toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Two attack specs target the same (channel, machine) pair at the same time.
class OverlappingAttacks : public Error {
 public:
  using Error::Error;
};

/// The combined decay rate of the attacked swing mode is exactly zero; the
/// closed-form solution divides by it.
class DegenerateEigenvalue : public Error {
 public:
  using Error::Error;
};

/// Amplification coefficient pushes the attacked swing mode out of the
/// stable half-plane; no finite steady state exists.
class UnstableAmplification : public Error {
 public:
  using Error::Error;
};

class NonpositiveVdc : public Error {
 public:
  using Error::Error;
};

class InvalidVoltage : public Error {
 public:
  using Error::Error;
};

class NonfiniteState : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public Error {
 public:
  using Error::Error;
};

}  // namespace sps
