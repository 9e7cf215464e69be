#include <cmath>

#include "doctest.h"
#include "gwmm/jet.hpp"

using gwmm::Jet;

TEST_CASE("order-0 jets reduce to plain arithmetic") {
  Jet<double> a(0, 1.25), b(0, -0.5);
  CHECK((a * b).value() == 1.25 * -0.5);
  CHECK((a / b).value() == 1.25 / -0.5);
  CHECK((a + b).value() == 0.75);
  CHECK(gwmm::exp(a).value() == std::exp(1.25));
  CHECK(gwmm::log(a).value() == std::log(1.25));
}

TEST_CASE("products and quotients follow the truncated Cauchy rules") {
  auto t = Jet<double>::variable(5, 0.0);
  auto one_minus = 1.0 - t;
  auto geo = Jet<double>::constant(5, 1.0) / one_minus;  // 1/(1-t) = sum t^k
  for (int k = 0; k <= 5; ++k) CHECK(geo[k] == doctest::Approx(1.0));
  auto sq = geo * geo;  // sum (k+1) t^k
  for (int k = 0; k <= 5; ++k) CHECK(sq[k] == doctest::Approx(k + 1.0));
  auto p = gwmm::ipow(one_minus, 3);
  CHECK(p[0] == 1);
  CHECK(p[1] == -3);
  CHECK(p[2] == 3);
  CHECK(p[3] == -1);
  CHECK(p[4] == 0);
}

TEST_CASE("exp, log and real powers") {
  auto t = Jet<double>::variable(6, 0.0);
  auto e = gwmm::exp(t);
  double fact = 1;
  for (int k = 0; k <= 6; ++k) {
    if (k) fact *= k;
    CHECK(e[k] == doctest::Approx(1 / fact));
  }
  auto l = gwmm::log(1.0 + t);
  for (int k = 1; k <= 6; ++k) CHECK(l[k] == doctest::Approx((k % 2 ? 1.0 : -1.0) / k));
  // (1+t)^0.5 binomial series
  auto s = gwmm::pow(1.0 + t, 0.5);
  double c = 1;
  for (int k = 0; k <= 6; ++k) {
    CHECK(s[k] == doctest::Approx(c));
    c *= (0.5 - k) / (k + 1);
  }
}

TEST_CASE("pow of a zero base with a non-integer exponent has no jet") {
  auto t = Jet<double>::variable(3, 0.0);
  CHECK_THROWS_AS(gwmm::pow(t, 0.5), gwmm::Error);
}

TEST_CASE("composition matches the chain rule") {
  // outer = sin-like polynomial at y0 = 0.3 expanded in (y - y0); inner = x^2 at x0 = 0.5
  const double x0 = 0.5;
  auto x = Jet<double>::variable(4, x0);
  auto inner = x * x;
  auto y = Jet<double>::variable(4, inner.value());
  auto outer = gwmm::exp(y);
  auto comp = gwmm::compose(outer, inner);
  auto direct = gwmm::exp(x * x);
  for (int k = 0; k <= 4; ++k) CHECK(comp[k] == doctest::Approx(direct[k]).epsilon(1e-12));
}

TEST_CASE("eval and derivative accessors") {
  auto t = Jet<double>::variable(3, 2.0);
  auto cube = t * t * t;  // expansion of x^3 at 2
  CHECK(cube.derivative(1) == doctest::Approx(12));
  CHECK(cube.derivative(2) == doctest::Approx(12));
  CHECK(cube.derivative(3) == doctest::Approx(6));
  CHECK(cube.eval(0.1) == doctest::Approx(std::pow(2.1, 3)));
}
