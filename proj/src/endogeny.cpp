#include "gwmm/endogeny.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gwmm {

const char* verdict_name(Verdict v) { return v == Verdict::endogenous ? "endogenous" : "non_endogenous"; }

namespace {

void require_fixed(const OffspringDistribution& d, double x) {
  if (!(x >= 0 && x <= 1)) fail(Errc::domain, "endogeny: x outside [0,1]");
  const double r = std::abs(eval_f(d, x) - x);
  if (r > 1e-9) {
    std::ostringstream os;
    os << "x=" << x << " is not a fixed point of f (|f(x)-x|=" << r << ")";
    fail(Errc::not_a_fixed_point, os.str());
  }
}

}  // namespace

double h_map(const OffspringDistribution& d, double x, double b) {
  require_fixed(d, x);
  const double bmax = std::min(x, 1 - x);
  if (!(b >= -1e-12 && b <= bmax + 1e-12)) fail(Errc::domain, "h_map: b outside [0, min(x,1-x)]");
  b = std::clamp(b, 0.0, bmax);
  const double Rx = eval_R(d, x);
  double inner = 2 * Rx - eval_R(d, std::max(0.0, x - b));
  if (inner < -1e-12 || inner > 1 + 1e-12) fail(Errc::domain, "h_map: inner argument left [0,1]");
  inner = std::clamp(inner, 0.0, 1.0);
  return eval_R(d, inner) - eval_R(d, Rx);
}

EndogenyReport decide_endogeny(const OffspringDistribution& d, double x, int max_iter) {
  require_fixed(d, x);
  EndogenyReport rep;
  rep.x = x;
  if (x == 0 || x == 1) {
    rep.trivial = true;
    rep.f_prime = d.finite_mean() ? jet_f(d, x, 1)[1] : std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.f_prime = jet_f(d, x, 1)[1];
  if (rep.f_prime <= 1 + 1e-9) return rep;

  rep.verdict = Verdict::non_endogenous;
  const double bmax = std::min(x, 1 - x);
  const double b0 = bmax * 1e-3;
  double b = b0;
  rep.iterates.push_back({0, b});
  bool done = false;
  for (int n = 1; n <= max_iter; ++n) {
    const double nb = h_map(d, x, b);
    if (n <= 64 || n % 1024 == 0) rep.iterates.push_back({n, nb});
    const bool close = std::abs(nb - b) <= 1e-12;
    b = nb;
    if (close) {
      if (rep.iterates.back().first != n) rep.iterates.push_back({n, nb});
      done = true;
      break;
    }
  }
  if (!done) {
    // h(b) - b is positive below b* and negative above it
    double lo = b0, hi = bmax;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (h_map(d, x, mid) - mid > 0) lo = mid;
      else hi = mid;
    }
    b = 0.5 * (lo + hi);
    rep.used_bisection = true;
  }
  rep.b_star = b;
  return rep;
}

}  // namespace gwmm
