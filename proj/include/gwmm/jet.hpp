#pragma once

// Truncated Taylor series in one variable. coeffs[j] is the j-th derivative
// divided by j!, at the expansion point coeffs[0].

#include <cmath>
#include <cstddef>
#include <vector>

#include "gwmm/error.hpp"

namespace gwmm {

template <class T>
class Jet {
 public:
  Jet() : c_(1, T(0)) {}
  Jet(int order, T value) : c_(static_cast<std::size_t>(order) + 1, T(0)) { c_[0] = value; }

  // The independent variable t expanded at x0.
  static Jet variable(int order, T x0) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = T(1);
    return j;
  }
  static Jet constant(int order, T v) { return Jet(order, v); }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  T value() const { return c_[0]; }
  T operator[](int j) const { return c_[static_cast<std::size_t>(j)]; }
  T& operator[](int j) { return c_[static_cast<std::size_t>(j)]; }
  const std::vector<T>& coeffs() const { return c_; }

  // j-th derivative at the expansion point.
  T derivative(int j) const {
    T fact = 1;
    for (int i = 2; i <= j; ++i) fact *= T(i);
    return c_[static_cast<std::size_t>(j)] * fact;
  }

  // Evaluate the polynomial at displacement h from the expansion point.
  T eval(T h) const {
    T r = 0;
    for (int j = order(); j >= 0; --j) r = r * h + c_[static_cast<std::size_t>(j)];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    for (int j = 0; j <= order(); ++j) (*this)[j] += o[j];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int j = 0; j <= order(); ++j) (*this)[j] -= o[j];
    return *this;
  }
  Jet& operator+=(T s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(T s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(T s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator/=(T s) {
    for (auto& v : c_) v /= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, T s) { return a += s; }
  friend Jet operator+(T s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, T s) { return a -= s; }
  friend Jet operator-(T s, const Jet& a) {
    Jet r = -a;
    r[0] += s;
    return r;
  }
  friend Jet operator*(Jet a, T s) { return a *= s; }
  friend Jet operator*(T s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, T s) { return a /= s; }
  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const int n = a.order();
    Jet r(n, T(0));
    for (int k = 0; k <= n; ++k) {
      T s = 0;
      for (int i = 0; i <= k; ++i) s += a[i] * b[k - i];
      r[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    const int n = a.order();
    Jet r(n, T(0));
    for (int k = 0; k <= n; ++k) {
      T s = a[k];
      for (int i = 1; i <= k; ++i) s -= b[i] * r[k - i];
      r[k] = s / b[0];
    }
    return r;
  }

 private:
  std::vector<T> c_;
};

template <class T>
Jet<T> ipow(Jet<T> base, unsigned e) {
  Jet<T> r = Jet<T>::constant(base.order(), T(1));
  while (e) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return r;
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  const int n = a.order();
  Jet<T> b(n, exp(a[0]));
  for (int k = 1; k <= n; ++k) {
    T s = 0;
    for (int i = 1; i <= k; ++i) s += T(i) * a[i] * b[k - i];
    b[k] = s / T(k);
  }
  return b;
}

template <class T>
Jet<T> log(const Jet<T>& a) {
  using std::log;
  const int n = a.order();
  if (!(a[0] > 0)) fail(Errc::domain, "jet log: nonpositive expansion value");
  Jet<T> b(n, log(a[0]));
  for (int k = 1; k <= n; ++k) {
    T s = 0;
    for (int i = 1; i < k; ++i) s += T(i) * b[i] * a[k - i];
    b[k] = (a[k] - s / T(k)) / a[0];
  }
  return b;
}

// a^r for real r. A zero expansion value is only allowed for integer r >= 0.
template <class T>
Jet<T> pow(const Jet<T>& a, T r) {
  using std::pow;
  const int n = a.order();
  if (r >= 0 && r == std::floor(r) && r < T(64)) return ipow(a, static_cast<unsigned>(r));
  if (a[0] == T(0)) {
    if (n == 0) return Jet<T>(0, T(0));
    fail(Errc::infinite_derivative, "jet pow: non-analytic at zero base");
  }
  if (a[0] < 0) fail(Errc::domain, "jet pow: negative base");
  Jet<T> b(n, pow(a[0], r));
  for (int k = 1; k <= n; ++k) {
    T s = 0;
    for (int i = 1; i <= k; ++i) s += (r * T(i) - T(k - i)) * a[i] * b[k - i];
    b[k] = s / (T(k) * a[0]);
  }
  return b;
}

// outer is a jet expanded at inner.value(); returns the jet of outer(inner(t)).
template <class T>
Jet<T> compose(const Jet<T>& outer, const Jet<T>& inner) {
  const int n = inner.order();
  Jet<T> d = inner;
  d[0] = 0;
  Jet<T> r = Jet<T>::constant(n, outer[outer.order()]);
  for (int j = outer.order() - 1; j >= 0; --j) {
    r = r * d;
    r[0] += outer[j];
  }
  return r;
}

}  // namespace gwmm
