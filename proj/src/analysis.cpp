#include "gwmm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gwmm {

const char* stability_name(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable_left: return "unstable_left";
    case Stability::unstable_right: return "unstable_right";
    case Stability::unstable_both: return "unstable_both";
  }
  return "?";
}

const char* endpoint_criterion_name(EndpointCriterion c) {
  switch (c) {
    case EndpointCriterion::no_endpoint_atoms: return "no_endpoint_atoms";
    case EndpointCriterion::endpoint_atoms: return "endpoint_atoms";
    case EndpointCriterion::boundary_case: return "boundary_case";
  }
  return "?";
}

double max_identity_deviation(const OffspringDistribution& d, int grid_size) {
  double worst = 0;
  for (int i = 0; i <= grid_size - 1; ++i) {
    double x = static_cast<double>(i) / (grid_size - 1);
    worst = std::max(worst, std::abs(eval_f(d, x) - x));
  }
  return worst;
}

bool is_identity(const OffspringDistribution& d, int grid_size, double tol) {
  if (grid_size < 100) fail(Errc::domain, "is_identity: grid_size must be >= 100");
  return max_identity_deviation(d, grid_size) <= tol;
}

double r_fixed_point(const OffspringDistribution& d) {
  double lo = 0, hi = 1;
  while (true) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (eval_R(d, mid) - mid > 0) lo = mid;
    else hi = mid;
  }
  double a = std::abs(eval_R(d, lo) - lo), b = std::abs(eval_R(d, hi) - hi);
  return a <= b ? lo : hi;
}

EndpointCriterion endpoint_atom_criterion(const OffspringDistribution& d) {
  const double p1 = d.p1();
  if (!d.finite_mean()) return p1 > 0 ? EndpointCriterion::endpoint_atoms : EndpointCriterion::boundary_case;
  const double v = p1 * d.mean();
  if (std::abs(v - 1) <= 1e-12) return EndpointCriterion::boundary_case;
  return v < 1 ? EndpointCriterion::no_endpoint_atoms : EndpointCriterion::endpoint_atoms;
}

namespace {

double gap(const OffspringDistribution& d, double x) { return eval_f(d, x) - x; }

double bisect_root(const OffspringDistribution& d, double lo, double hi) {
  double dlo = gap(d, lo);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double dm = gap(d, mid);
    if (dm == 0) return mid;
    if ((dm > 0) == (dlo > 0)) {
      lo = mid;
      dlo = dm;
    } else {
      hi = mid;
    }
  }
  return std::abs(gap(d, lo)) <= std::abs(gap(d, hi)) ? lo : hi;
}

double slope_gap(const OffspringDistribution& d, double x) { return jet_f(d, x, 1)[1] - 1; }

// Point of minimal |f(x)-x| in [lo,hi]; by a root of f'(x)-1 when bracketed.
double refine_touch(const OffspringDistribution& d, double lo, double hi) {
  double slo = slope_gap(d, lo), shi = slope_gap(d, hi);
  if ((slo > 0) != (shi > 0)) {
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      double sm = slope_gap(d, mid);
      if ((sm > 0) == (slo > 0)) {
        lo = mid;
        slo = sm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double a = lo, b = hi;
  for (int i = 0; i < 120; ++i) {
    double c = b - g * (b - a), e = a + g * (b - a);
    if (std::abs(gap(d, c)) < std::abs(gap(d, e))) b = e;
    else a = c;
  }
  return 0.5 * (a + b);
}

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

FixedPointSet find_fixed_points(const OffspringDistribution& d, const AnalysisOptions& opt) {
  if (!(opt.tol > 0) || opt.grid < 100) fail(Errc::domain, "find_fixed_points: need tol > 0 and grid >= 100");
  FixedPointSet out;
  if (is_identity(d, std::max(opt.identity_grid, 100), opt.identity_tol)) {
    out.identity = true;
    return out;
  }

  const int n = opt.grid;
  std::vector<double> xs(n + 1), ds(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = static_cast<double>(i) / n;
    ds[i] = gap(d, xs[i]);
  }

  struct Cand {
    double x;
    bool touch;
  };
  std::vector<Cand> cand{{0.0, false}, {1.0, false}};
  const double r = r_fixed_point(d);
  cand.push_back({r, false});

  for (int i = 0; i < n; ++i) {
    if (i > 0 && ds[i] == 0) cand.push_back({xs[i], false});
    if (sgn(ds[i]) * sgn(ds[i + 1]) < 0) cand.push_back({bisect_root(d, xs[i], xs[i + 1]), false});
  }

  const double scan_threshold = std::max(1e-5, 1e3 * opt.touch_threshold);
  for (int i = 1; i < n; ++i) {
    const double a = std::abs(ds[i - 1]), b = std::abs(ds[i]), c = std::abs(ds[i + 1]);
    const int s = sgn(ds[i]);
    if (s == 0 || sgn(ds[i - 1]) != s || sgn(ds[i + 1]) != s) continue;
    if (!(b < a && b <= c) || b > scan_threshold) continue;
    const double x = refine_touch(d, xs[i - 1], xs[i + 1]);
    const double m = std::abs(gap(d, x));
    if (m <= opt.tol) {
      cand.push_back({x, true});
    } else if (m <= opt.touch_threshold) {
      std::ostringstream os;
      os.precision(12);
      os << "near-tangency at x=" << x << " with |f(x)-x|=" << m << " between tol " << opt.tol
         << " and touch threshold " << opt.touch_threshold;
      fail(Errc::unresolved_touchpoint, os.str());
    }
  }

  // A multiple root located by bisection is only accurate to a cube root of
  // the rounding level; the fixed point of R is known to full precision.
  for (auto& c : cand)
    if (std::abs(c.x - r) < 1e-5) c.x = r;
  std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) { return a.x < b.x; });
  std::vector<Cand> uniq;
  for (const auto& c : cand) {
    if (!uniq.empty() && std::abs(c.x - uniq.back().x) < 1e-9) {
      uniq.back().touch = uniq.back().touch || c.touch;
      if (c.x == 0.0 || c.x == 1.0 || c.x == r) uniq.back().x = c.x;
      continue;
    }
    uniq.push_back(c);
  }

  const double delta0 = 10 * std::sqrt(opt.tol);
  auto side_sign = [&](std::size_t i, int dir) {
    const std::size_t j = dir > 0 ? i + 1 : i - 1;
    const double q = uniq[i].x, nb = uniq[j].x;
    const double step = std::min(delta0, std::abs(nb - q) / 2);
    double v = gap(d, q + dir * step);
    if (std::abs(v) < 1e-14) v = gap(d, 0.5 * (q + nb));
    return sgn(v);
  };

  for (std::size_t i = 0; i < uniq.size(); ++i) {
    FixedPointRecord rec;
    rec.q = uniq[i].x;
    rec.touchpoint = uniq[i].touch;
    const bool left_unstable = i > 0 && side_sign(i, -1) < 0;
    const bool right_unstable = i + 1 < uniq.size() && side_sign(i, +1) > 0;
    if (left_unstable && right_unstable) rec.stability = Stability::unstable_both;
    else if (left_unstable) rec.stability = Stability::unstable_left;
    else if (right_unstable) rec.stability = Stability::unstable_right;
    rec.q_minus = left_unstable ? uniq[i - 1].x : rec.q;
    rec.q_plus = right_unstable ? uniq[i + 1].x : rec.q;
    try {
      rec.xi = jet_f(d, rec.q, 1)[1];
    } catch (const Error& e) {
      if (e.code() != Errc::infinite_derivative) throw;
      rec.xi = std::numeric_limits<double>::infinity();
    }
    if (std::abs(rec.xi - 1) <= 1e-9) {
      auto j = jet_f(d, rec.q, opt.max_order);
      for (int k = 2; k <= opt.max_order; ++k)
        if (std::abs(j[k]) > 1e-7) {
          rec.order_k = k;
          break;
        }
    }
    out.points.push_back(rec);
  }
  return out;
}

LimitLaw limit_law(const FixedPointSet& fps) {
  LimitLaw law;
  if (fps.identity) {
    law.identity_uniform = true;
    return law;
  }
  for (const auto& p : fps.points)
    if (p.unstable()) law.atoms.push_back({p.q, p.q_plus - p.q_minus});
  return law;
}

LimitLaw limit_law(const OffspringDistribution& d, const AnalysisOptions& opt) {
  return limit_law(find_fixed_points(d, opt));
}

}  // namespace gwmm
