#pragma once

#include <stdexcept>
#include <string>

namespace vnom {

/// Failure categories. The CLI maps them onto exit codes.
enum class ErrorKind {
  kValidation,  // malformed input or violated precondition
  kCapacity,    // request exceeds a configured guard
  kNumerical,   // numerical breakdown (singular covariance, non-finite values)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorKind::kCapacity, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

const char* to_string(ErrorKind kind);

}  // namespace vnom
