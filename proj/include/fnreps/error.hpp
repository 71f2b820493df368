#pragma once

#include <stdexcept>
#include <string>

namespace fnreps {

enum class Errc {
  DivisionByZeroPossible,
  BadWitness,
  DomainViolation,
  ConstantPolynomial,
  EndpointRoot,
  NotBoundedBelow,
  RangeViolation,
  EmptyRange,
  ParseError,
  Unsupported,
  Timeout,
  UnknownSuite,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::DivisionByZeroPossible: return "DivisionByZeroPossible";
    case Errc::BadWitness: return "BadWitness";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::ConstantPolynomial: return "ConstantPolynomial";
    case Errc::EndpointRoot: return "EndpointRoot";
    case Errc::NotBoundedBelow: return "NotBoundedBelow";
    case Errc::RangeViolation: return "RangeViolation";
    case Errc::EmptyRange: return "EmptyRange";
    case Errc::ParseError: return "ParseError";
    case Errc::Unsupported: return "Unsupported";
    case Errc::Timeout: return "Timeout";
    case Errc::UnknownSuite: return "UnknownSuite";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fnreps
