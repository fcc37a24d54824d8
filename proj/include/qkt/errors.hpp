#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qkt {

/// A finite-difference stencil would leave the patch domain.
class BoundaryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegreeOverflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operation called in a real dimension it does not support.
class DimensionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Singular or non positive definite matrix, or a degenerate linear system.
class LinearAlgebraError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input violates a domain restriction (nonpositive conformal factor, bad box).
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NotQKTError : public std::runtime_error {
public:
  NotQKTError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

}  // namespace qkt
