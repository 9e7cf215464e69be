#pragma once

#include <stdexcept>
#include <string>

namespace gwmm {

enum class Errc {
  domain,
  config,
  infinite_derivative,
  unresolved_touchpoint,
  no_convergence,
  precision_loss,
  derivative_order_not_found,
  assumption_violated,
  not_a_fixed_point,
  insufficient_samples,
  budget_exceeded,
  internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gwmm
