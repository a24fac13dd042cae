#include "radvac/error.hpp"

#include <fmt/format.h>

namespace radvac {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter: return "invalid-parameter";
    case ErrorKind::kIntegrationFailure: return "integration-failure";
    case ErrorKind::kStepSizeUnderflow: return "step-size-underflow";
    case ErrorKind::kInvalidProfile: return "invalid-profile";
    case ErrorKind::kDegenerateFlowMap: return "degenerate-flow-map";
    case ErrorKind::kOrderTooHigh: return "order-too-high";
    case ErrorKind::kBlowUpDetected: return "blow-up-detected";
    case ErrorKind::kStepRejected: return "step-rejected";
    case ErrorKind::kAprioriViolated: return "apriori-violated";
    case ErrorKind::kIterationDiverged: return "iteration-diverged";
    case ErrorKind::kWindowMismatch: return "window-mismatch";
    case ErrorKind::kInsufficientSamples: return "insufficient-samples";
    case ErrorKind::kConfigInvalid: return "config-invalid";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

BlowUpError::BlowUpError(double tau, double r, const std::string& what)
    : Error(ErrorKind::kBlowUpDetected, fmt::format("{} at tau={:.6g}, r={:.6g}", what, tau, r)),
      tau_(tau),
      r_(r) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace radvac
