#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

// Broad failure classes. The CLI maps them onto exit codes 2/3/4.
enum class ErrorKind { Schema, Domain, Numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Short machine-readable identifier, e.g. "below-mean".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message)
      : Error(ErrorKind::Schema, "schema", message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message, std::string code = "domain")
      : Error(ErrorKind::Domain, std::move(code), message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message, std::string code = "numeric")
      : Error(ErrorKind::Numeric, std::move(code), message) {}
};

// Requested level a does not exceed the mean slope dpsi(0).
class BelowMeanError : public DomainError {
 public:
  BelowMeanError(double level, double mean)
      : DomainError("level " + std::to_string(level) + " is not above the mean slope " +
                        std::to_string(mean),
                    "below-mean"),
        mean_(mean) {}
  double mean() const noexcept { return mean_; }

 private:
  double mean_;
};

// Requested level a is at or beyond the plateau of dpsi (essential supremum).
class SaturationError : public DomainError {
 public:
  SaturationError(double level, double plateau)
      : DomainError("level " + std::to_string(level) + " reaches the saturation plateau " +
                        std::to_string(plateau),
                    "saturation"),
        plateau_(plateau) {}
  double plateau() const noexcept { return plateau_; }

 private:
  double plateau_;
};

}  // namespace ldp
