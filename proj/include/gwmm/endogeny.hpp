#pragma once

#include <utility>
#include <vector>

#include "gwmm/distribution.hpp"

namespace gwmm {

enum class Verdict { endogenous, non_endogenous };
const char* verdict_name(Verdict v);

struct EndogenyReport {
  double x = 0;
  double f_prime = 0;
  Verdict verdict = Verdict::endogenous;
  double b_star = 0;
  std::vector<std::pair<int, double>> iterates;  // (n, h^n(b0))
  bool trivial = false;                          // x in {0,1}
  bool used_bisection = false;
};

// h(b) = R(2R(x) - R(x-b)) - R(R(x)) for a fixed point x of f.
double h_map(const OffspringDistribution& d, double x, double b);

EndogenyReport decide_endogeny(const OffspringDistribution& d, double x, int max_iter = 1000000);

}  // namespace gwmm
