#pragma once

#include <stdexcept>
#include <string>

namespace hgff {

// Base class for every deliberate failure mode of the library. Callers that
// want blanket handling catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the mathematical domain (d < 2, rho > d, negative weights...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Request exceeds a configured size cap (dense matrices, enumeration).
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& msg) : Error(msg) {}
};

// m = 0 with no boundary: I - P is singular and the field does not exist.
class MasslessWithoutBoundary : public Error {
 public:
  explicit MasslessWithoutBoundary(const std::string& msg) : Error(msg) {}
};

// A linear system that should determine hitting probabilities has no
// unique solution (walk cannot reach the boundary).
class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

// Walk is not irreducible where a diagnostic requires it.
class ReducibleChain : public Error {
 public:
  explicit ReducibleChain(const std::string& msg) : Error(msg) {}
};

// Statistics requested from an accumulator holding zero samples.
class EmptyStats : public Error {
 public:
  explicit EmptyStats(const std::string& msg) : Error(msg) {}
};

}  // namespace hgff
