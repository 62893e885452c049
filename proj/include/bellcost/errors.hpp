#pragma once

#include <stdexcept>
#include <string>

namespace bellcost {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A correlator <AB>_xy was requested for a setting pair with p(x,y) = 0.
class UndefinedCorrelator : public Error {
 public:
  using Error::Error;
};

/// The brute-force search grid contains no model meeting the constraints.
class NoFeasibleModel : public Error {
 public:
  using Error::Error;
};

/// Source-first sampling requested for a model whose per-state setting
/// distributions do not factorize.
class OrderUnavailable : public Error {
 public:
  using Error::Error;
};

/// Empirical statistics requested from rounds that never visit some (x,y).
class MissingSetting : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input (JSON model files).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace bellcost
