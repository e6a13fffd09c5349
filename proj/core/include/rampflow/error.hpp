#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rampflow {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the command line front end.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const noexcept { return "error"; }
};

/// Invalid user-facing configuration. `field()` names the offending key,
/// e.g. "kernel.delta"; the message continues it ("must lie in ...").
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + " " + message),
        field_(std::move(field)) {}
  std::string_view kind() const noexcept override { return "config_error"; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A function was evaluated outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "domain_error"; }
};

/// The discrete solution left the invariant region [0, 1].
class InvariantViolation : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override {
    return "invariant_violation";
  }
};

}  // namespace rampflow
