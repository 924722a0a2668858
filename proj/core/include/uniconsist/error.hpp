#pragma once

#include <stdexcept>
#include <string>

namespace uniconsist {

// Argument outside the mathematical domain of an operation (e.g. t outside (0,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller violated a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A structural assumption on a weight profile or kernel failed.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string assumption, const std::string& what)
      : std::runtime_error(assumption + ": " + what), assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

}  // namespace uniconsist
