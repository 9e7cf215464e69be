#include <cmath>

#include "doctest.h"
#include "gwmm/scaling.hpp"
#include "oracles.hpp"

using namespace gwmm;

namespace {

constexpr double kInflectP2 = 0.70511944486103183;

FixedPointRecord nearest(const OffspringDistribution& d, double q) {
  auto fps = find_fixed_points(d);
  const FixedPointRecord* best = &fps.points.front();
  for (auto& r : fps.points)
    if (std::abs(r.q - q) < std::abs(best->q - q)) best = &r;
  return *best;
}

// Dichotomy point of n -> f~^n(q~ + x / n^(1/(k-1))) on one side, by bisection on x.
double brute_threshold(const OffspringDistribution& d, const FixedPointRecord& fp, int k, int sign, long n) {
  const double L = fp.q_plus - fp.q_minus;
  const double qt = (fp.q - fp.q_minus) / L;
  auto ft = oracle::conditioned([&](double x) { return eval_f(d, std::clamp(x, 0.0, 1.0)); }, fp.q_minus, L);
  const double scale = std::pow(static_cast<double>(n), 1.0 / (k - 1));
  auto escapes = [&](double x) {
    double z = qt + sign * x / scale;
    for (long i = 0; i < n; ++i) z = ft(z);
    return sign > 0 ? z > (qt + 1) / 2 : z < qt / 2;
  };
  double lo = 0, hi = 1;
  while (!escapes(hi)) hi *= 2;
  for (int i = 0; i < 40; ++i) {
    const double m = 0.5 * (lo + hi);
    if (escapes(m)) hi = m;
    else lo = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("case A grid layout") {
  auto g = case_a_grid(200);
  CHECK(g.size() == 200);
  CHECK(std::count(g.begin(), g.end(), 0.0) == 1);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(g.front() == doctest::Approx(-1e3));
  CHECK(g.back() == doctest::Approx(1e3));
  CHECK_THROWS_AS(case_a_grid(2), Error);
}

TEST_CASE("case A on the regular binary tree") {
  auto d = OffspringDistribution::regular(2);
  auto fp = nearest(d, 0.6);
  const double q = oracle::golden();
  CHECK(fp.xi == doctest::Approx(4 * q * q).epsilon(1e-9));
  for (auto prec : {Precision::double_precision, Precision::extended}) {
    CaseAOptions opt;
    opt.precision = prec;
    auto a = solve_case_a(d, fp, case_a_grid(200), opt);
    CAPTURE(precision_name(prec));
    CHECK(a.max_residual <= 1e-8);
    CHECK(a.monotone_tail);
    CHECK(a.q_tilde == doctest::Approx(q).epsilon(1e-12));
    for (std::size_t i = 0; i < a.x.size(); ++i) {
      if (a.x[i] == 0) CHECK(a.F[i] == doctest::Approx(q).epsilon(1e-14));
      if (i) CHECK(a.F[i] >= a.F[i - 1]);
    }
    CHECK(a.F.front() <= 1e-12);
    CHECK(a.F.back() >= 1 - 1e-12);
    // unit slope at 0
    const double slope = (case_a_value(d, fp, 1e-2, opt) - case_a_value(d, fp, -1e-2, opt)) / 2e-2;
    CHECK(slope == doctest::Approx(1.0).epsilon(0.05));
    // the functional equation against the closed-form regular map
    for (std::size_t i = 0; i < a.x.size(); i += 7) {
      const double inner = case_a_value(d, fp, a.x[i] / a.xi, opt);
      CHECK(std::abs(a.F[i] - oracle::f_regular(2, inner)) <= 1e-8);
    }
  }
}

TEST_CASE("case A on an interior point of a finite law uses the conditioned map") {
  auto d = parse_distribution("finite:1=0.55,3=0.45");
  auto fps = find_fixed_points(d);
  REQUIRE(fps.points.size() == 5);
  const auto& fp = fps.points[2];
  REQUIRE(fp.xi > 1);
  auto a = solve_case_a(d, fp, case_a_grid(100));
  CHECK(a.max_residual <= 1e-8);
  // tails decay like a power of |x| here, so the grid ends are only close to 0 and 1
  CHECK(a.F.front() <= 1e-3);
  CHECK(a.F.back() >= 1 - 1e-3);
  auto ft = oracle::conditioned([&](double x) { return eval_f(d, x); }, fp.q_minus, fp.q_plus - fp.q_minus);
  for (std::size_t i = 0; i < a.x.size(); i += 9)
    CHECK(std::abs(a.F[i] - ft(case_a_value(d, fp, a.x[i] / a.xi))) <= 1e-8);
}

TEST_CASE("case A errors") {
  auto d = OffspringDistribution::regular(2);
  auto fp = nearest(d, 0.6);
  CaseAOptions opt;
  opt.max_n = 3;
  CHECK_THROWS_AS(case_a_value(d, fp, 5.0, opt), Error);
  try {
    case_a_value(d, fp, 5.0, opt);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_convergence);
  }
  CHECK_THROWS_AS(solve_case_a(d, nearest(d, 0.0), case_a_grid()), Error);
}

TEST_CASE("case B at the boundary fixed points of p1=0.5, p2=0.25, p4=0.25") {
  auto d = parse_distribution("finite:1=0.5,2=0.25,4=0.25");
  auto fp0 = nearest(d, 0.0);
  CHECK(fp0.xi == doctest::Approx(1.0).epsilon(1e-12));
  auto b = solve_case_b(d, fp0);
  CHECK(b.k == 2);
  // second derivative at 0 from a one-sided stencil on a library-free f
  oracle::Law p{{1, 0.5}, {2, 0.25}, {4, 0.25}};
  const double f2 = static_cast<double>(oracle::forward_second([&](long double x) { return oracle::f(p, x); }, 0.0L, 1e-4L));
  CHECK(b.derivative_k == doctest::Approx(f2).epsilon(1e-4));
  CHECK(b.a == doctest::Approx(2 / std::abs(f2)).epsilon(1e-4));
  CHECK(b.mass_plus == 1);
  CHECK(b.mass_minus == 0);
  // the dichotomy point of the iteration reproduces a in conditioned units
  const double L = fp0.q_plus - fp0.q_minus;
  CHECK(brute_threshold(d, fp0, b.k, +1, 100000) == doctest::Approx(b.a / L).epsilon(0.05));

  auto fp1 = nearest(d, 1.0);
  auto b1 = solve_case_b(d, fp1);
  CHECK(b1.mass_minus == 1);
  CHECK(b1.mass_plus == 0);
  CHECK(b1.derivative_k < 0);
  CHECK(brute_threshold(d, fp1, b1.k, -1, 100000) == doctest::Approx(b1.a / (fp1.q_plus - fp1.q_minus)).epsilon(0.05));
}

TEST_CASE("case B at a cubic inflection") {
  auto d = OffspringDistribution::finite({{2, kInflectP2}, {12, 1 - kInflectP2}});
  auto fp = nearest(d, 0.67);
  auto b = solve_case_b(d, fp);
  CHECK(b.k == 3);
  CHECK(b.mass_plus > 0);
  CHECK(b.mass_minus > 0);
  CHECK(b.mass_plus + b.mass_minus == doctest::Approx(1.0).epsilon(1e-12));
  // masses from direct iteration: the stable points reached from q -+ 1e-3
  auto F = [&](double x) { return eval_f(d, x); };
  auto settle = [&](double x) {
    for (long i = 0; i < 100000000L; ++i) {
      const double y = F(x);
      if (y == x) break;
      x = y;
    }
    return x;
  };
  const double lo = settle(fp.q - 1e-3), hi = settle(fp.q + 1e-3);
  CHECK(b.mass_plus == doctest::Approx((hi - fp.q) / (hi - lo)).epsilon(1e-6));
  const double L = fp.q_plus - fp.q_minus;
  CHECK(brute_threshold(d, fp, 3, +1, 100000) == doctest::Approx(b.a / L).epsilon(0.05));
  CHECK(brute_threshold(d, fp, 3, -1, 100000) == doctest::Approx(b.a / L).epsilon(0.05));
}

TEST_CASE("case B refuses when no derivative order is found") {
  auto d = OffspringDistribution::geometric(0.5);
  FixedPointRecord fp;
  fp.q = 0.5;
  fp.xi = 1;
  fp.q_minus = 0;
  fp.q_plus = 1;
  fp.stability = Stability::unstable_both;
  try {
    solve_case_b(d, fp);
    FAIL("expected Derivative-Order-Not-Found");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::derivative_order_not_found);
  }
}

TEST_CASE("case C for the power law") {
  auto d = OffspringDistribution::power_law(1.5);
  auto c = solve_case_c(d);
  CHECK(c.K == 1);
  CHECK(c.rho == doctest::Approx(0.5).epsilon(0.02));
  CHECK(c.rho == doctest::Approx(oracle::partial_sum_slope(1.5, 100, 100000)).epsilon(1e-6));
  CHECK(c.exponent == doctest::Approx(1 - c.rho));
  CHECK(c.exponent > 0);
  CHECK(c.exponent < 1);
  CHECK(std::abs(c.C1 - std::pow(c.C0, c.K) * std::pow(c.p_K, 1 - c.K * (1 - c.rho))) <= 1e-6);
  CHECK(endpoint_slope(d, true) == doctest::Approx(c.exponent).epsilon(0.05));
  CHECK(endpoint_slope(d, false) == doctest::Approx(c.exponent).epsilon(0.05));
  // the slope from a library-free evaluation of f near 0
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int j = 10; j <= 30; ++j) {
    const double t = std::ldexp(1.0, -j);
    const double x = std::log(t), y = std::log(eval_f(d, t));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  CHECK((21 * sxy - sx * sy) / (21 * sxx - sx * sx) == doctest::Approx(c.exponent).epsilon(0.05));
  CHECK(std::holds_alternative<CaseC>(solve_scaling(d, nearest(d, 0.0))));
}

TEST_CASE("case C rejects laws outside the assumption") {
  try {
    solve_case_c(parse_distribution("finite:1=0.5,3=0.5"));
    FAIL("expected Assumption-Violated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::assumption_violated);
  }
}

TEST_CASE("case C Monte Carlo verification") {
  auto d = OffspringDistribution::power_law(1.5, 100000);
  auto c = solve_case_c(d);
  auto v = verify_case_c_scaling(d, c, 4, 6000, 3);
  for (auto* side : {&v.at_zero, &v.at_one}) {
    REQUIRE(side->levels.size() == 4);
    for (auto& l : side->levels) {
      CHECK(l.min_value > 0);
      CHECK(l.accepted >= 100);
      for (std::size_t i = 1; i < l.analytic.size(); ++i) CHECK(l.analytic[i] > l.analytic[i - 1]);
    }
    CHECK(side->analytic_stabilizes);
    // Monte Carlo against the exact conditional quantiles at the first level
    const auto& l1 = side->levels.front();
    for (std::size_t i = 0; i < l1.quantiles.size(); ++i)
      CHECK(l1.quantiles[i] == doctest::Approx(l1.analytic[i]).epsilon(0.1));
  }
  CHECK(v.consistent);
  try {
    verify_case_c_scaling(d, c, 2, 50, 3);
    FAIL("expected Insufficient-Conditioned-Samples");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_samples);
  }
}

TEST_CASE("regime selection") {
  auto reg = OffspringDistribution::regular(2);
  CHECK(std::holds_alternative<CaseA>(solve_scaling(reg, nearest(reg, 0.6))));
  auto b = parse_distribution("finite:1=0.5,2=0.25,4=0.25");
  CHECK(std::holds_alternative<CaseB>(solve_scaling(b, nearest(b, 0.0))));
  CHECK_THROWS_AS(solve_scaling(reg, nearest(reg, 0.0)), Error);
}
