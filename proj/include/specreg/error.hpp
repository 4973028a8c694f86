#pragma once

#include <stdexcept>
#include <string>

namespace specreg {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SPECREG_ERROR(Name, Kind)                                       \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message) : Error(Kind, message) {} \
  };

SPECREG_ERROR(ParameterOutOfRange, "parameter-out-of-range")
SPECREG_ERROR(UnknownFilter, "unknown-filter")
SPECREG_ERROR(UnknownIdentifier, "unknown-identifier")
SPECREG_ERROR(DomainError, "domain-error")
SPECREG_ERROR(UnboundVariable, "unbound-variable")
SPECREG_ERROR(Uncertified, "uncertified")
SPECREG_ERROR(ConvergenceFailure, "convergence-failure")
SPECREG_ERROR(DimensionError, "dimension-error")
SPECREG_ERROR(InputError, "input-error")
SPECREG_ERROR(PreconditionViolation, "precondition-violation")

#undef SPECREG_ERROR

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error("syntax-error", message + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& message, double alpha, double lambda)
      : Error("hypothesis-violation", message), alpha_(alpha), lambda_(lambda) {}
  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }

 private:
  double alpha_;
  double lambda_;
};

}  // namespace specreg
