#pragma once

// Reference computations written without the library, used to check it.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using Law = std::map<long, double>;

inline long double G(const Law& p, long double x) {
  long double s = 0;
  for (auto [k, pk] : p) s += pk * std::pow(x, static_cast<long double>(k));
  return s;
}
inline long double f(const Law& p, long double x) { return 1 - G(p, 1 - G(p, x)); }

inline double mean(const Law& p) {
  double m = 0;
  for (auto [k, pk] : p) m += k * pk;
  return m;
}

// Truncated series sum_k p(1-p)^(k-1) x^k.
inline double G_geometric_series(double p, double x, int terms) {
  double s = 0, w = p;
  double xk = x;
  for (int k = 1; k <= terms; ++k) {
    s += w * xk;
    w *= 1 - p;
    xk *= x;
  }
  return s;
}

inline double G_regular(int d, double x) { return std::pow(x, d); }
inline double f_regular(int d, double x) { return 1 - std::pow(1 - std::pow(x, d), d); }

// Power-law PGF by direct summation, normalized by the same partial sums.
inline double G_powerlaw_direct(double alpha, double x, long terms) {
  long double num = 0, den = 0, xk = 1;
  for (long k = 1; k <= terms; ++k) {
    const long double w = std::pow(static_cast<long double>(k), -static_cast<long double>(alpha));
    xk *= x;
    num += w * xk;
    den += w;
  }
  // tail of the normalizer: sum_{k>terms} k^-alpha by the integral with Euler-Maclaurin correction
  const long double n = terms;
  den += std::pow(n, 1 - static_cast<long double>(alpha)) / (alpha - 1) - 0.5L * std::pow(n, -static_cast<long double>(alpha));
  return static_cast<double>(num / den);
}

// Central differences of order 1..4 with step h.
inline long double derivative(const std::function<long double(long double)>& F, long double x, int order, long double h) {
  switch (order) {
    case 1: return (F(x + h) - F(x - h)) / (2 * h);
    case 2: return (F(x + h) - 2 * F(x) + F(x - h)) / (h * h);
    case 3: return (F(x + 2 * h) - 2 * F(x + h) + 2 * F(x - h) - F(x - 2 * h)) / (2 * h * h * h);
    case 4: return (F(x + 2 * h) - 4 * F(x + h) + 6 * F(x) - 4 * F(x - h) + F(x - 2 * h)) / (h * h * h * h);
  }
  return NAN;
}

// Central difference with one Richardson step: error O(h^4).
inline long double richardson(const std::function<long double(long double)>& F, long double x, int order, long double h) {
  return (4 * derivative(F, x, order, h / 2) - derivative(F, x, order, h)) / 3;
}

// One-sided (forward) second derivative, second-order accurate.
inline long double forward_second(const std::function<long double(long double)>& F, long double x, long double h) {
  return (2 * F(x) - 5 * F(x + h) + 4 * F(x + 2 * h) - F(x + 3 * h)) / (h * h);
}

inline double iterate(const std::function<double(double)>& F, double x, int n) {
  for (int i = 0; i < n; ++i) x = F(x);
  return x;
}

inline double bisect(const std::function<double(double)>& F, double lo, double hi, int iters = 200) {
  double flo = F(lo);
  for (int i = 0; i < iters; ++i) {
    const double m = 0.5 * (lo + hi);
    const double fm = F(m);
    if ((fm > 0) == (flo > 0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

// Interior fixed point of f for regular(2): root of x^2 + x - 1.
inline double golden() { return (std::sqrt(5.0) - 1) / 2; }

// h(b) for regular(2), from R(y) = 1 - y^2.
inline double h_regular2(double x, double b) {
  auto R = [](double y) { return 1 - y * y; };
  return R(2 * R(x) - R(x - b)) - R(R(x));
}

// Least-squares slope of log S(n) against log n for S(n) = sum_{k<=n} k p_k,
// p_k = k^-alpha / zeta(alpha).
inline double partial_sum_slope(double alpha, long lo, long hi) {
  long double S = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (long k = 1; k <= hi; ++k) {
    S += std::pow(static_cast<long double>(k), 1 - static_cast<long double>(alpha));
    if (k < lo) continue;
    const double x = std::log(static_cast<double>(k)), y = std::log(static_cast<double>(S));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Conditioned map on [lo, lo + L].
inline std::function<double(double)> conditioned(const std::function<double(double)>& F, double lo, double L) {
  return [=](double z) { return (F(lo + L * z) - lo) / L; };
}

}  // namespace oracle
