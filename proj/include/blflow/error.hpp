#pragma once

#include <stdexcept>
#include <string>

namespace blflow {

enum class ErrorKind {
  Domain,               // argument outside the mathematical domain (e.g. y_j <= 0)
  Structural,           // object violates a type invariant (rank, symmetry, shape)
  Input,                // malformed problem file or option
  NonConvergence,       // iteration budget exhausted
  CertificateRejected,  // a certificate fails a positivity requirement
  UnsupportedScale,     // dimension beyond what the quadrature supports
  NumericalAnomaly,     // singular solve, non-monotone refinement and similar
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace blflow
