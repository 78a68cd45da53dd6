#pragma once

#include <stdexcept>
#include <string>

namespace fewbody {

/// Base of every error raised by the library. Catch this to handle any
/// library failure; catch a subclass to react to one failure kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A discretization or quadrature is too coarse for the requested modes.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedSize : public Error {
 public:
  using Error::Error;
};

/// Objects built on different bases or particle counts were combined.
class MismatchError : public Error {
 public:
  using Error::Error;
};

class EmptyBasis : public Error {
 public:
  using Error::Error;
};

class InsufficientBasis : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class UnsupportedTrap : public Error {
 public:
  using Error::Error;
};

/// Job configuration rejected before any computation ran.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fewbody
