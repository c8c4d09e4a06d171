#pragma once

#include <stdexcept>
#include <string>

namespace speckle {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates an operation's precondition (maps to CLI exit 2).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Numerical failure of a well-posed request (maps to CLI exit 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonzeroPhase : public InvalidArgument {
 public:
  NonzeroPhase()
      : InvalidArgument("closed-form variance requires alpha_phase = squeeze_phase = 0") {}
};

class ZeroMean : public NumericalError {
 public:
  ZeroMean() : NumericalError("Fano factor undefined: mean photon number is zero") {}
};

class ZeroVariance : public NumericalError {
 public:
  ZeroVariance() : NumericalError("SNR undefined: photon-number variance is zero") {}
};

class UnphysicalState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoCrossing : public NumericalError {
 public:
  NoCrossing() : NumericalError("curve never falls below half of its peak on the sampled range") {}
};

class AllZero : public NumericalError {
 public:
  AllZero() : NumericalError("every object coefficient below Q is zero") {}
};

class TooDim : public NumericalError {
 public:
  explicit TooDim(double snr)
      : NumericalError("reconstruction SNR " + std::to_string(snr) +
                       " < 1 already for a single prolate mode") {}
};

}  // namespace speckle
