#pragma once

#include <stdexcept>
#include <string>

namespace radvac {

enum class ErrorKind {
  kInvalidParameter,
  kIntegrationFailure,
  kStepSizeUnderflow,
  kInvalidProfile,
  kDegenerateFlowMap,
  kOrderTooHigh,
  kBlowUpDetected,
  kStepRejected,
  kAprioriViolated,
  kIterationDiverged,
  kWindowMismatch,
  kInsufficientSamples,
  kConfigInvalid,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a non-finite value or a collapsing Jacobian appears.
class BlowUpError : public Error {
 public:
  BlowUpError(double tau, double r, const std::string& what);
  double tau() const { return tau_; }
  double r() const { return r_; }

 private:
  double tau_;
  double r_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace radvac
