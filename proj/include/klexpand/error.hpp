#pragma once

#include <stdexcept>
#include <string>

namespace klexpand {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A Cholesky or LU factorization broke down.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// The geometric map has a non-positive Jacobian determinant somewhere it is needed.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Constructor or factory arguments violate their preconditions.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A dense oracle was asked to assemble a problem above its size cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// An operator handed to a solver violates its contract (e.g. symmetry).
class OperatorContractError : public Error {
 public:
  using Error::Error;
};

/// A truncated expansion asked for more terms than are available.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent benchmark configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace klexpand
