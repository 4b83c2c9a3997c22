#pragma once

#include <stdexcept>
#include <string>

namespace freeharness {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters outside the admissible family (sigma<0, tau<0, sigma*tau>=1, 1+alpha*beta<=0).
class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// A point or time outside the domain where an object is a probability measure.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Cauchy transform evaluated too close to the real support.
class NearSupport : public Error {
 public:
  using Error::Error;
};

/// Closed-form transform evaluated at a zero of its polynomial denominator.
class PoleHit : public Error {
 public:
  using Error::Error;
};

/// Total mass of a reconstructed measure differs from one.
class MassDefect : public Error {
 public:
  using Error::Error;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// Bridge normalizing constant underflowed.
class BridgeDensityZero : public Error {
 public:
  using Error::Error;
};

/// An invariant that the theory guarantees was violated numerically.
class InternalConsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace freeharness
