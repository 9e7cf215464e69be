#include "gwmm/error.hpp"

namespace gwmm {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::domain: return "Domain-Error";
    case Errc::config: return "Config-Error";
    case Errc::infinite_derivative: return "Infinite-Derivative";
    case Errc::unresolved_touchpoint: return "Unresolved-Touchpoint";
    case Errc::no_convergence: return "No-Convergence";
    case Errc::precision_loss: return "Precision-Loss";
    case Errc::derivative_order_not_found: return "Derivative-Order-Not-Found";
    case Errc::assumption_violated: return "Assumption-Violated";
    case Errc::not_a_fixed_point: return "Not-A-Fixed-Point";
    case Errc::insufficient_samples: return "Insufficient-Conditioned-Samples";
    case Errc::budget_exceeded: return "Budget-Exceeded";
    case Errc::internal: return "Internal-Error";
  }
  return "Unknown-Error";
}

}  // namespace gwmm
