#include "gwmm/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gwmm/mcsim.hpp"
#include "parallel.hpp"

namespace gwmm {

const char* precision_name(Precision p) { return p == Precision::extended ? "extended" : "double"; }

std::vector<double> case_a_grid(int count, double lo, double hi) {
  if (count < 3 || !(lo > 0) || !(hi > lo)) fail(Errc::domain, "case_a_grid: need count >= 3 and 0 < lo < hi");
  const int pos = count / 2;            // positive side gets the extra point for even counts
  const int neg = count - 1 - pos;
  std::vector<double> g;
  auto side = [&](int m) {
    std::vector<double> s(m);
    for (int i = 0; i < m; ++i)
      s[i] = m == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1));
    return s;
  };
  auto ns = side(neg);
  for (auto it = ns.rbegin(); it != ns.rend(); ++it) g.push_back(-*it);
  g.push_back(0.0);
  for (double v : side(pos)) g.push_back(v);
  return g;
}

namespace {

constexpr int kTaylorOrder = 16;

// Iterates the conditioned map in offset coordinates y = z - q~, which keeps
// the relative precision of x/xi^n no matter how close the start is to q~.
template <class T>
class OffsetMap {
 public:
  OffsetMap(const OffspringDistribution& d, const FixedPointRecord& fp) : d_(d) {
    q_ = fp.q;
    qm_ = fp.q_minus;
    L_ = static_cast<T>(fp.q_plus) - static_cast<T>(fp.q_minus);
    qt_ = (q_ - qm_) / L_;
    xi_ = static_cast<T>(fp.xi);
    auto jet = jet_f(d, static_cast<T>(fp.q), kTaylorOrder);
    c_.assign(kTaylorOrder + 1, T(0));
    T Lp = 1;
    for (int j = 1; j <= kTaylorOrder; ++j) {
      c_[j] = jet[j] * Lp;
      Lp *= L_;
    }
    xi_ = c_[1];
    const T eps = std::is_same_v<T, double> ? T(1e-20) : T(1e-24);
    radius_ = T(1e-2);
    for (int j = kTaylorOrder - 1; j <= kTaylorOrder; ++j)
      if (c_[j] != 0) radius_ = std::min(radius_, std::pow(eps * std::abs(c_[1]) / std::abs(c_[j]), T(1) / (j - 1)));
    radius_ = std::min({radius_, qt_ > 0 ? qt_ / 2 : radius_, qt_ < 1 ? (1 - qt_) / 2 : radius_});
  }

  T xi() const { return xi_; }
  T qt() const { return qt_; }

  T step(T y) const {
    if (y <= -qt_) return -qt_;
    if (y >= 1 - qt_) return 1 - qt_;
    if (std::abs(y) <= radius_) {
      T r = 0;
      for (int j = kTaylorOrder; j >= 1; --j) r = (r + c_[j]) * y;
      return r;
    }
    T arg = std::clamp(q_ + L_ * y, qm_, qm_ + L_);
    T v = static_cast<T>(eval_f(d_, arg));
    return std::clamp((v - q_) / L_, -qt_, 1 - qt_);
  }

  // g_n(x) = f~^n(q~ + x/xi^n)
  T g(T x, int n) const {
    T y = x * std::pow(xi_, -T(n));
    if (x != 0 && (y == 0 || std::abs(y) < std::numeric_limits<T>::min()))
      fail(Errc::precision_loss, "offset x/xi^n underflowed before convergence");
    for (int i = 0; i < n; ++i) {
      y = step(y);
      if (y == -qt_ || y == 1 - qt_) break;
    }
    return qt_ + y;
  }

  T radius() const { return radius_; }

 private:
  const OffspringDistribution& d_;
  T q_, qm_, L_, qt_, xi_;
  T radius_;
  std::vector<T> c_;
};

template <class T>
struct Limit {
  double value;
  int n;
  bool monotone;
};

template <class T>
Limit<T> iterate_limit(const OffsetMap<T>& m, double x, const CaseAOptions& opt) {
  if (x == 0) return {static_cast<double>(m.qt()), 0, true};
  if (m.qt() == 0 && x < 0) return {0.0, 0, true};
  if (m.qt() == 1 && x > 0) return {1.0, 0, true};
  const T xx = x;
  int n = 1;
  while (n < opt.max_n && std::abs(xx) * std::pow(m.xi(), -T(n)) > m.radius()) ++n;
  T prev = m.g(xx, n);
  int sign_flips = 0, last_sign = 0;
  for (++n; n <= opt.max_n; ++n) {
    T cur = m.g(xx, n);
    T diff = cur - prev;
    if (std::abs(diff) > T(1e-14)) {
      int s = diff > 0 ? 1 : -1;
      if (last_sign != 0 && s != last_sign) ++sign_flips;
      last_sign = s;
    }
    prev = cur;
    if (std::abs(diff) < T(opt.cauchy_tol)) return {static_cast<double>(cur), n, sign_flips == 0};
  }
  std::ostringstream os;
  os << "Case A iteration at x=" << x << " did not meet the Cauchy criterion within max_n=" << opt.max_n;
  fail(Errc::no_convergence, os.str());
}

void check_case_a(const FixedPointRecord& fp) {
  if (!(fp.xi > 1) || !std::isfinite(fp.xi)) fail(Errc::domain, "Case A needs 1 < xi < inf");
  if (!(fp.q_plus > fp.q_minus)) fail(Errc::domain, "Case A needs an unstable fixed point");
}

template <class T>
CaseA solve_case_a_t(const OffspringDistribution& d, const FixedPointRecord& fp, const std::vector<double>& grid,
                     const CaseAOptions& opt) {
  OffsetMap<T> m(d, fp);
  CaseA out;
  out.q = fp.q;
  out.q_minus = fp.q_minus;
  out.q_plus = fp.q_plus;
  out.xi = fp.xi;
  out.scale = fp.q_plus - fp.q_minus;
  out.q_tilde = static_cast<double>(m.qt());
  out.x = grid;
  out.F.assign(grid.size(), 0);
  out.iterations.assign(grid.size(), 0);
  std::vector<char> mono(grid.size(), 1);
  std::vector<double> resid(grid.size(), 0);
  detail::parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
    auto r = iterate_limit(m, grid[i], opt);
    out.F[i] = r.value;
    out.iterations[i] = r.n;
    mono[i] = r.monotone;
    const double inner = iterate_limit(m, grid[i] / fp.xi, opt).value;
    resid[i] = std::abs(r.value - conditioned_f(d, fp, inner));
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.monotone_tail = out.monotone_tail && mono[i];
    out.max_residual = std::max(out.max_residual, resid[i]);
  }
  return out;
}

}  // namespace

double conditioned_f(const OffspringDistribution& d, const FixedPointRecord& fp, double z) {
  const double L = fp.q_plus - fp.q_minus;
  const double arg = std::clamp(fp.q_minus + L * z, 0.0, 1.0);
  return (eval_f(d, arg) - fp.q_minus) / L;
}

CaseA solve_case_a(const OffspringDistribution& d, const FixedPointRecord& fp, const std::vector<double>& grid,
                   const CaseAOptions& opt) {
  check_case_a(fp);
  if (opt.precision == Precision::extended) return solve_case_a_t<long double>(d, fp, grid, opt);
  return solve_case_a_t<double>(d, fp, grid, opt);
}

double case_a_value(const OffspringDistribution& d, const FixedPointRecord& fp, double x, const CaseAOptions& opt) {
  check_case_a(fp);
  if (opt.precision == Precision::extended) return iterate_limit(OffsetMap<long double>(d, fp), x, opt).value;
  return iterate_limit(OffsetMap<double>(d, fp), x, opt).value;
}

CaseB solve_case_b(const OffspringDistribution& d, const FixedPointRecord& fp, int max_order) {
  if (!(std::abs(fp.xi - 1) <= 1e-9)) fail(Errc::domain, "Case B needs xi = 1");
  if (!(fp.q_plus > fp.q_minus)) fail(Errc::domain, "Case B needs an unstable fixed point");
  auto jet = jet_f(d, fp.q, max_order);
  CaseB out;
  out.q = fp.q;
  for (int k = 2; k <= max_order; ++k)
    if (std::abs(jet[k]) > 1e-7) {
      out.k = k;
      break;
    }
  if (out.k == 0) fail(Errc::derivative_order_not_found, "all derivatives of order 2.." + std::to_string(max_order) + " vanish");
  out.derivative_k = jet.derivative(out.k);
  double fact = 1;
  for (int i = 2; i <= out.k - 2; ++i) fact *= i;
  out.a = std::pow(out.k * fact / std::abs(out.derivative_k), 1.0 / (out.k - 1));
  const double L = fp.q_plus - fp.q_minus;
  out.mass_plus = (fp.q_plus - fp.q) / L;
  out.mass_minus = (fp.q - fp.q_minus) / L;
  return out;
}

CaseC solve_case_c(const OffspringDistribution& d, const CaseCOptions& opt) {
  if (d.finite_mean()) fail(Errc::assumption_violated, "Case C needs an infinite-mean law");
  CaseC out;
  out.K = d.min_support();
  out.p_K = d.p_min_support();
  out.fit_lo = opt.fit_lo;
  out.fit_hi = opt.fit_hi > 0 ? opt.fit_hi : (d.truncation() > 0 ? d.truncation() / 10 : 100000);
  if (out.fit_hi <= out.fit_lo + 10) fail(Errc::config, "Case C fit window too small");
  const auto p = d.masses(out.fit_hi);
  long double S = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx, ly;
  for (long k = 1; k <= out.fit_hi; ++k) {
    S += static_cast<long double>(k) * p[k - 1];
    if (k < out.fit_lo) continue;
    if (!(S > 0)) fail(Errc::assumption_violated, "partial sums vanish in the fit window");
    lx.push_back(std::log(static_cast<double>(k)));
    ly.push_back(std::log(static_cast<double>(S)));
  }
  const double n = static_cast<double>(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (icpt + slope * lx[i]);
    ss += e * e;
  }
  out.rho = slope;
  out.c = std::exp(icpt);
  out.fit_rms = std::sqrt(ss / n);
  out.exponent = out.K * (1 - out.rho);
  std::ostringstream os;
  os.precision(6);
  if (out.fit_rms > opt.max_rms) {
    os << "log-log fit of partial sums has rms residual " << out.fit_rms << " > " << opt.max_rms;
    fail(Errc::assumption_violated, os.str());
  }
  if (!(out.rho > 0 && out.rho < 1)) {
    os << "fitted rho=" << out.rho << " outside (0,1)";
    fail(Errc::assumption_violated, os.str());
  }
  if (!(out.exponent < 1)) {
    os << "K(1-rho)=" << out.exponent << " is not below 1";
    fail(Errc::assumption_violated, os.str());
  }
  const double g = std::tgamma(1 + out.rho);
  out.C0 = out.c * g * std::pow(out.p_K, 1 - out.rho) / (1 - out.rho);
  out.C1 = out.p_K * std::pow(out.c * g / (1 - out.rho), static_cast<double>(out.K));
  if (std::abs(out.C0 - 1) < 1e-9 && std::abs(out.C1 - 1) < 1e-9)
    fail(Errc::internal, "both Case C constants equal 1, which cannot happen for a valid law");
  return out;
}

double endpoint_slope(const OffspringDistribution& d, bool at_zero, int jlo, int jhi) {
  if (jhi - jlo < 1) fail(Errc::config, "endpoint_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = jhi - jlo + 1;
  for (int j = jlo; j <= jhi; ++j) {
    const double t = std::ldexp(1.0, -j);
    const double v = at_zero ? eval_f_near_zero(d, t) : eval_one_minus_f_near_one(d, t);
    if (!(v > 0)) fail(Errc::precision_loss, "endpoint_slope: f vanished at t=2^-" + std::to_string(j));
    const double x = std::log(t), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// P(T <= y | W in the conditioning interval) for T = -alpha^n log(distance to the end),
// by iterating the end-accurate form of f.
double conditional_cdf(const OffspringDistribution& d, bool at_zero, int n, double scale, double end_dist, double y) {
  auto step = [&](double t) { return at_zero ? eval_f_near_zero(d, t) : eval_one_minus_f_near_one(d, t); };
  double t = std::exp(-y / scale), z = end_dist;
  for (int i = 0; i < n; ++i) {
    t = step(t);
    z = step(z);
  }
  return 1 - t / z;
}

double conditional_quantile(const OffspringDistribution& d, bool at_zero, int n, double scale, double end_dist,
                            double p) {
  double lo = 0, hi = 1;
  while (conditional_cdf(d, at_zero, n, scale, end_dist, hi) < p && hi < 1e6) hi *= 2;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (conditional_cdf(d, at_zero, n, scale, end_dist, mid) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CaseCVerification verify_case_c_scaling(const OffspringDistribution& d, const CaseC& regime, int depth_n,
                                        std::size_t samples, std::uint64_t seed, unsigned threads) {
  if (std::abs(regime.C0 - 1) < 1e-9 && std::abs(regime.C1 - 1) < 1e-9)
    fail(Errc::domain, "verify_case_c_scaling: needs C0 != 1 or C1 != 1");
  if (depth_n < 1) fail(Errc::config, "verify_case_c_scaling: depth_n must be >= 1");
  auto fps = find_fixed_points(d);
  if (fps.identity || fps.points.size() < 2) fail(Errc::domain, "verify_case_c_scaling: no endpoint atoms");
  CaseCVerification out;
  out.probs = {0.1, 0.25, 0.5, 0.75, 0.9};
  out.truncation = d.truncation();
  out.samples = samples;
  out.pool = samples;
  out.seed = seed;
  out.at_zero.boundary = 0;
  out.at_zero.interval_end = fps.points.front().q_plus;
  out.at_one.boundary = 1;
  out.at_one.interval_end = fps.points.back().q_minus;
  if (!(out.at_zero.interval_end > 0) || !(out.at_one.interval_end < 1))
    fail(Errc::domain, "verify_case_c_scaling: endpoints are not atoms of the limit law");

  auto levels = sample_rde_levels(d, depth_n, samples, seed, threads);
  const double alpha = regime.exponent;
  for (int n = 1; n <= depth_n; ++n) {
    const double scale = std::pow(alpha, n);
    std::vector<double> z, o;
    for (const auto& v : levels[n - 1]) {
      if (v.w <= out.at_zero.interval_end) z.push_back(-scale * std::log(v.w));
      if (v.w >= out.at_one.interval_end) o.push_back(-scale * std::log(v.wbar));
    }
    auto add = [&](CaseCSide& side, std::vector<double>& vals, bool at_zero) {
      if (vals.size() < 100)
        fail(Errc::insufficient_samples, "fewer than 100 samples in the conditioning interval at n=" + std::to_string(n));
      const double end_dist = at_zero ? side.interval_end : 1 - side.interval_end;
      CaseCLevel lv;
      lv.n = n;
      lv.accepted = vals.size();
      lv.acceptance = static_cast<double>(vals.size()) / samples;
      EmpiricalCDF e(std::move(vals));
      const auto& sv = e.sorted();
      lv.min_value = sv.front();
      const double top = sv.back();
      lv.floor_fraction =
          static_cast<double>(sv.end() - std::lower_bound(sv.begin(), sv.end(), top)) / static_cast<double>(sv.size());
      for (double p : out.probs) {
        lv.quantiles.push_back(e.quantile(p));
        lv.analytic.push_back(conditional_quantile(d, at_zero, n, scale, end_dist, p));
        lv.resolved.push_back(p < 1 - lv.floor_fraction && lv.quantiles.back() < top);
      }
      if (!side.levels.empty()) {
        const auto& prev = side.levels.back();
        for (std::size_t i = 0; i < prev.quantiles.size(); ++i) {
          if (prev.resolved[i] && lv.resolved[i])
            lv.drift = std::max(lv.drift, std::abs(lv.quantiles[i] - prev.quantiles[i]));
          lv.analytic_drift = std::max(lv.analytic_drift, std::abs(lv.analytic[i] - prev.analytic[i]));
        }
      }
      side.levels.push_back(std::move(lv));
    };
    add(out.at_zero, z, true);
    add(out.at_one, o, false);
  }
  for (auto* side : {&out.at_zero, &out.at_one}) {
    const auto& L = side->levels;
    side->stabilizes = L.size() >= 3 && L.back().drift < L[1].drift;
    side->analytic_stabilizes = L.size() >= 3 && L.back().analytic_drift < L[1].analytic_drift;
  }
  out.consistent = out.at_zero.stabilizes == out.at_one.stabilizes &&
                   out.at_zero.analytic_stabilizes == out.at_one.analytic_stabilizes;
  return out;
}

ScalingRegime solve_scaling(const OffspringDistribution& d, const FixedPointRecord& fp, const CaseAOptions& aopt) {
  if (std::isinf(fp.xi)) return solve_case_c(d);
  if (std::abs(fp.xi - 1) <= 1e-9) return solve_case_b(d, fp);
  if (fp.xi > 1) return solve_case_a(d, fp, case_a_grid(), aopt);
  fail(Errc::domain, "fixed point is stable (xi < 1): no atom to rescale");
}

}  // namespace gwmm
