#include "gwmm/distribution.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace gwmm {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::finite: return "finite";
    case Kind::regular: return "regular";
    case Kind::geometric: return "geometric";
    case Kind::involution_b: return "invb";
    case Kind::involution_c: return "invc";
    case Kind::power_law: return "powerlaw";
  }
  return "?";
}

namespace detail {

// Li_s(x)/zeta(s) for 1 < s < 2. Near x = 1 we use
//   Li_s(e^m) = Gamma(1-s) (-m)^(s-1) + sum_k zeta(s-k) m^k / k!,  |m| < 2 pi.
struct PolylogTable {
  long double s = 0;
  long double zeta_s = 0;
  long double gamma_1ms = 0;
  std::vector<long double> z;  // zeta(s-k)/k!
  static constexpr long double split = 0.5L;

  explicit PolylogTable(long double s_) : s(s_) {
    zeta_s = boost::math::zeta(s);
    gamma_1ms = boost::math::tgamma(1.0L - s);
    long double fact = 1;
    for (int k = 0; k < 36; ++k) {
      if (k > 0) fact *= k;
      z.push_back(boost::math::zeta(s - k) / fact);
    }
  }
};

template <class V>
struct Num;
template <>
struct Num<double> {
  using T = double;
  static double value(double v) { return v; }
  static double konst(double, double c) { return c; }
  static double pow(double a, double r) { return std::pow(a, r); }
  static double log(double a) { return std::log(a); }
};
template <>
struct Num<long double> {
  using T = long double;
  static long double value(long double v) { return v; }
  static long double konst(long double, long double c) { return c; }
  static long double pow(long double a, long double r) { return std::pow(a, r); }
  static long double log(long double a) { return std::log(a); }
};
template <class T>
struct Num<Jet<T>> {
  using V = Jet<T>;
  static T value(const V& v) { return v.value(); }
  static V konst(const V& like, T c) { return V::constant(like.order(), c); }
  static V pow(const V& a, T r) { return gwmm::pow(a, r); }
  static V log(const V& a) { return gwmm::log(a); }
};

template <class V, class T>
V poly_small(const PolylogTable& t, const V& x) {
  using N = Num<V>;
  const T x0 = N::value(x);
  V sum = N::konst(x, T(0));
  V pk = x;
  for (long k = 1; k < 400; ++k) {
    const T w = std::pow(static_cast<T>(k), -static_cast<T>(t.s));
    sum += pk * w;
    if (std::pow(x0, static_cast<T>(k)) * w < T(1e-22)) break;
    pk = pk * x;
  }
  return sum / static_cast<T>(t.zeta_s);
}

// 1 - Li_s(e^m)/zeta(s) for m near 0, without cancellation.
template <class V, class T>
V poly_tail_complement_log(const PolylogTable& t, const V& m) {
  using N = Num<V>;
  V neg = -m;
  V sing = N::pow(neg, static_cast<T>(t.s - 1)) * static_cast<T>(t.gamma_1ms);
  V ser = N::konst(m, T(0));
  for (int k = static_cast<int>(t.z.size()) - 1; k >= 1; --k) {
    ser += static_cast<T>(t.z[k]);
    ser = ser * m;
  }
  V r = sing + ser;
  return -r / static_cast<T>(t.zeta_s);
}

template <class V, class T>
V poly_tail_complement(const PolylogTable& t, const V& x) {
  return poly_tail_complement_log<V, T>(t, Num<V>::log(x));
}

template <class V, class T>
V eval_G_impl(const OffspringDistribution& d, const std::vector<double>& coef,
              const PolylogTable* poly, const V& x) {
  using N = Num<V>;
  const T p = static_cast<T>(d.parameter());
  switch (d.kind()) {
    case Kind::finite: {
      V r = N::konst(x, static_cast<T>(coef.back()));
      for (std::size_t i = coef.size() - 1; i-- > 0;) r = r * x + static_cast<T>(coef[i]);
      return r;
    }
    case Kind::regular: return N::pow(x, p);
    case Kind::geometric: return p * x / (T(1) - (T(1) - p) * x);
    case Kind::involution_b: {
      if (p == T(1)) return x;
      V y = N::pow(T(1) - x, T(1) / p);
      return N::pow(T(1) - y, p);
    }
    case Kind::involution_c: {
      if (p == T(1)) return x;
      return T(1) - N::pow(T(1) - N::pow(x, p), T(1) / p);
    }
    case Kind::power_law: {
      if (N::value(x) <= static_cast<T>(PolylogTable::split)) return poly_small<V, T>(*poly, x);
      return T(1) - poly_tail_complement<V, T>(*poly, x);
    }
  }
  fail(Errc::internal, "unknown kind");
}

template <class V, class T>
V eval_R_impl(const OffspringDistribution& d, const std::vector<double>& coef,
              const PolylogTable* poly, const V& x) {
  using N = Num<V>;
  const T p = static_cast<T>(d.parameter());
  switch (d.kind()) {
    case Kind::geometric: return (T(1) - x) / (T(1) - (T(1) - p) * x);
    case Kind::involution_b: {
      if (p == T(1)) return T(1) - x;
      V y = N::pow(T(1) - x, T(1) / p);
      return T(1) - N::pow(T(1) - y, p);
    }
    case Kind::involution_c: {
      if (p == T(1)) return T(1) - x;
      return N::pow(T(1) - N::pow(x, p), T(1) / p);
    }
    case Kind::power_law:
      if (N::value(x) > static_cast<T>(PolylogTable::split)) return poly_tail_complement<V, T>(*poly, x);
      return T(1) - poly_small<V, T>(*poly, x);
    default: return T(1) - eval_G_impl<V, T>(d, coef, poly, x);
  }
}

template <class T>
T eval_Rc_impl(const OffspringDistribution& d, const PolylogTable* poly, T u) {
  using std::expm1, std::log1p, std::pow;
  const T p = static_cast<T>(d.parameter());
  switch (d.kind()) {
    case Kind::finite: {
      T s = 0;
      const T l = log1p(-u);
      for (auto [k, pk] : d.table()) s += static_cast<T>(pk) * -expm1(static_cast<T>(k) * l);
      return s;
    }
    case Kind::regular: return -expm1(p * log1p(-u));
    case Kind::geometric: return u / (p + (T(1) - p) * u);
    case Kind::involution_b:
      if (p == T(1)) return u;
      return -expm1(p * log1p(-pow(u, T(1) / p)));
    case Kind::involution_c:
      if (p == T(1)) return u;
      return pow(-expm1(p * log1p(-u)), T(1) / p);
    case Kind::power_law:
      if (u < T(1) - static_cast<T>(PolylogTable::split)) return poly_tail_complement_log<T, T>(*poly, log1p(-u));
      return T(1) - poly_small<T, T>(*poly, T(1) - u);
  }
  fail(Errc::internal, "unknown kind");
}

}  // namespace detail

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << what << ": argument " << x << " outside [0,1]";
    fail(Errc::domain, os.str());
  }
}

std::string fmt_num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// (-1)^k binom(r, k) for k = 0..kmax, i.e. prod_{j<=k} (j-1-r)/j.
std::vector<double> signed_binom(double r, long kmax) {
  std::vector<double> b(static_cast<std::size_t>(kmax) + 1);
  b[0] = 1;
  for (long k = 1; k <= kmax; ++k) b[k] = b[k - 1] * ((k - 1) - r) / k;
  return b;
}

}  // namespace

OffspringDistribution OffspringDistribution::finite(const std::map<long, double>& table) {
  if (table.empty()) fail(Errc::config, "finite law: empty table");
  double sum = 0;
  for (auto [k, p] : table) {
    if (k < 1) fail(Errc::config, "finite law: offspring counts must be >= 1");
    if (k > 100000) fail(Errc::config, "finite law: offspring count above 100000");
    if (!(p >= 0) || !std::isfinite(p)) fail(Errc::config, "finite law: probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) fail(Errc::config, "finite law: probabilities sum to " + fmt_num(sum));
  OffspringDistribution d;
  d.kind_ = Kind::finite;
  for (auto [k, p] : table)
    if (p > 0) d.table_[k] = p / sum;
  d.coef_.assign(static_cast<std::size_t>(d.table_.rbegin()->first) + 1, 0.0);
  for (auto [k, p] : d.table_) d.coef_[k] = p;
  d.build_sampling_table();
  return d;
}

OffspringDistribution OffspringDistribution::regular(int deg) {
  if (deg < 2 || deg > 1000) fail(Errc::config, "regular law: need 2 <= d <= 1000");
  OffspringDistribution d;
  d.kind_ = Kind::regular;
  d.param_ = deg;
  return d;
}

OffspringDistribution OffspringDistribution::geometric(double p) {
  if (!(p > 0 && p < 1)) fail(Errc::config, "geometric law: need 0 < p < 1");
  OffspringDistribution d;
  d.kind_ = Kind::geometric;
  d.param_ = p;
  return d;
}

OffspringDistribution OffspringDistribution::involution_b(int n) {
  if (n < 1 || n > 64) fail(Errc::config, "invb law: need 1 <= n <= 64");
  OffspringDistribution d;
  d.kind_ = Kind::involution_b;
  d.param_ = n;
  d.trunc_ = n == 1 ? 0 : 1000000;
  d.build_sampling_table();
  return d;
}

OffspringDistribution OffspringDistribution::involution_c(int n) {
  if (n < 1 || n > 64) fail(Errc::config, "invc law: need 1 <= n <= 64");
  OffspringDistribution d;
  d.kind_ = Kind::involution_c;
  d.param_ = n;
  d.trunc_ = n == 1 ? 0 : 1000000;
  d.build_sampling_table();
  return d;
}

OffspringDistribution OffspringDistribution::power_law(double alpha, long truncation) {
  if (!(alpha > 1 && alpha < 2)) fail(Errc::config, "powerlaw: need 1 < alpha < 2");
  if (truncation < 10000 || truncation > 100000000)
    fail(Errc::config, "powerlaw: need 1e4 <= N <= 1e8");
  OffspringDistribution d;
  d.kind_ = Kind::power_law;
  d.param_ = alpha;
  d.trunc_ = truncation;
  d.poly_ = std::make_shared<const detail::PolylogTable>(alpha);
  d.build_sampling_table();
  return d;
}

void OffspringDistribution::build_sampling_table() {
  std::vector<double> pm;
  if (kind_ == Kind::finite) {
    pm.assign(coef_.begin() + 1, coef_.end());
  } else if (trunc_ > 0) {
    pm = masses(trunc_);
  } else {
    return;
  }
  auto cdf = std::make_shared<std::vector<double>>(pm.size());
  long double acc = 0;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    acc += pm[i];
    (*cdf)[i] = static_cast<double>(acc);
  }
  const double total = static_cast<double>(acc);
  for (auto& c : *cdf) c /= total;
  cdf->back() = 1.0;
  auto guide = std::make_shared<std::vector<std::uint32_t>>(cdf->size() + 1);
  std::size_t k = 0;
  for (std::size_t j = 0; j < guide->size(); ++j) {
    const double level = static_cast<double>(j) / cdf->size();
    while (k + 1 < cdf->size() && (*cdf)[k] < level) ++k;
    (*guide)[j] = static_cast<std::uint32_t>(k);
  }
  cdf_ = cdf;
  guide_ = guide;
}

double OffspringDistribution::mass(long k) const {
  if (k < 1) return 0;
  switch (kind_) {
    case Kind::finite: {
      auto it = table_.find(k);
      return it == table_.end() ? 0.0 : it->second;
    }
    case Kind::regular: return k == static_cast<long>(param_) ? 1.0 : 0.0;
    case Kind::geometric: return param_ * std::pow(1 - param_, static_cast<double>(k - 1));
    case Kind::power_law: return std::pow(static_cast<double>(k), -param_) / static_cast<double>(poly_->zeta_s);
    default: return masses(k).back();
  }
}

std::vector<double> OffspringDistribution::masses(long kmax) const {
  std::vector<double> out(static_cast<std::size_t>(std::max(kmax, 0L)), 0.0);
  const int n = static_cast<int>(param_);
  if (kind_ == Kind::involution_b && n > 1) {
    // G = sum_i binom(n,i) (-1)^i (1-x)^{i/n}
    double cni = 1;
    for (int i = 1; i <= n; ++i) {
      cni = cni * (n - i + 1) / i;
      const double sign = (i % 2) ? -1.0 : 1.0;
      auto b = signed_binom(static_cast<double>(i) / n, kmax);
      for (long k = 1; k <= kmax; ++k) out[k - 1] += sign * cni * b[k];
    }
    return out;
  }
  if (kind_ == Kind::involution_c && n > 1) {
    // G = -sum_{j>=1} binom(1/n, j) (-x^n)^j
    auto b = signed_binom(1.0 / n, kmax / n + 1);
    for (long j = 1; j * n <= kmax; ++j) out[j * n - 1] = -b[j];
    return out;
  }
  if ((kind_ == Kind::involution_b || kind_ == Kind::involution_c) && n == 1) {
    if (kmax >= 1) out[0] = 1;
    return out;
  }
  for (long k = 1; k <= kmax; ++k) out[k - 1] = mass(k);
  return out;
}

bool OffspringDistribution::finite_mean() const {
  switch (kind_) {
    case Kind::power_law: return false;
    case Kind::involution_b:
    case Kind::involution_c: return param_ == 1;
    default: return true;
  }
}

double OffspringDistribution::mean() const {
  if (!finite_mean()) return std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::finite: {
      double m = 0;
      for (auto [k, p] : table_) m += k * p;
      return m;
    }
    case Kind::regular: return param_;
    case Kind::geometric: return 1 / param_;
    default: return 1;
  }
}

long OffspringDistribution::min_support() const {
  switch (kind_) {
    case Kind::finite: return table_.begin()->first;
    case Kind::regular:
    case Kind::involution_b:
    case Kind::involution_c: return static_cast<long>(param_);
    default: return 1;
  }
}

std::string OffspringDistribution::spec() const {
  switch (kind_) {
    case Kind::finite: {
      std::string s = "finite:";
      bool first = true;
      for (auto [k, p] : table_) {
        if (!first) s += ',';
        first = false;
        s += std::to_string(k) + "=" + fmt_num(p);
      }
      return s;
    }
    case Kind::power_law: return "powerlaw:" + fmt_num(param_) + "," + std::to_string(trunc_);
    case Kind::geometric: return "geometric:" + fmt_num(param_);
    default: return std::string(kind_name(kind_)) + ":" + std::to_string(static_cast<long>(param_));
  }
}

long OffspringDistribution::sample_offspring(double u) const {
  switch (kind_) {
    case Kind::regular: return static_cast<long>(param_);
    case Kind::geometric: return 1 + static_cast<long>(std::floor(std::log(u) / std::log1p(-param_)));
    default: break;
  }
  if (!cdf_) return 1;
  const auto& c = *cdf_;
  // guide table (Chen-Asau): start at the first entry that can hold u
  std::size_t k = (*guide_)[static_cast<std::size_t>(u * c.size())];
  while (k + 1 < c.size() && c[k] < u) ++k;
  return static_cast<long>(k) + 1;
}

template <class T>
T OffspringDistribution::G(T x) const {
  return detail::eval_G_impl<T, T>(*this, coef_, poly_.get(), x);
}
template <class T>
T OffspringDistribution::R(T x) const {
  return detail::eval_R_impl<T, T>(*this, coef_, poly_.get(), x);
}
template <class T>
T OffspringDistribution::Rc(T u) const {
  return detail::eval_Rc_impl<T>(*this, poly_.get(), u);
}
template <class T>
Jet<T> OffspringDistribution::G(const Jet<T>& x) const {
  return detail::eval_G_impl<Jet<T>, T>(*this, coef_, poly_.get(), x);
}
template <class T>
Jet<T> OffspringDistribution::R(const Jet<T>& x) const {
  return detail::eval_R_impl<Jet<T>, T>(*this, coef_, poly_.get(), x);
}

template double OffspringDistribution::G<double>(double) const;
template long double OffspringDistribution::G<long double>(long double) const;
template double OffspringDistribution::R<double>(double) const;
template long double OffspringDistribution::R<long double>(long double) const;
template double OffspringDistribution::Rc<double>(double) const;
template long double OffspringDistribution::Rc<long double>(long double) const;
template Jet<double> OffspringDistribution::G<double>(const Jet<double>&) const;
template Jet<long double> OffspringDistribution::G<long double>(const Jet<long double>&) const;
template Jet<double> OffspringDistribution::R<double>(const Jet<double>&) const;
template Jet<long double> OffspringDistribution::R<long double>(const Jet<long double>&) const;

double eval_G(const OffspringDistribution& d, double x) {
  check_unit(x, "eval_G");
  return std::clamp(d.G(x), 0.0, 1.0);
}

double eval_R(const OffspringDistribution& d, double x) {
  check_unit(x, "eval_R");
  return std::clamp(d.R(x), 0.0, 1.0);
}

// f = Rc(G(x)): avoids rounding R(x) near 1, where R can be arbitrarily steep.
double eval_f(const OffspringDistribution& d, double x) {
  check_unit(x, "eval_f");
  return std::clamp(d.Rc(std::clamp(d.G(x), 0.0, 1.0)), 0.0, 1.0);
}

double eval_f_near_zero(const OffspringDistribution& d, double t) {
  check_unit(t, "eval_f_near_zero");
  return std::clamp(d.Rc(std::clamp(d.G(t), 0.0, 1.0)), 0.0, 1.0);
}

double eval_one_minus_f_near_one(const OffspringDistribution& d, double t) {
  check_unit(t, "eval_one_minus_f_near_one");
  return std::clamp(d.G(std::clamp(d.Rc(t), 0.0, 1.0)), 0.0, 1.0);
}

long double eval_f(const OffspringDistribution& d, long double x) {
  if (!(x >= 0 && x <= 1)) fail(Errc::domain, "eval_f: argument outside [0,1]");
  return std::clamp(d.Rc(std::clamp(d.G(x), 0.0L, 1.0L)), 0.0L, 1.0L);
}

namespace {

template <class T>
Jet<T> jet_f_impl(const OffspringDistribution& d, T q, int order) {
  if (!(q >= 0 && q <= 1)) fail(Errc::domain, "jet_f: point outside [0,1]");
  if (order < 0) fail(Errc::domain, "jet_f: negative order");
  if ((q == 0 || q == 1) && !d.finite_mean() && order >= 1)
    fail(Errc::infinite_derivative, "jet_f: derivative diverges at an endpoint for an infinite-mean law");
  Jet<T> inner = d.R(Jet<T>::variable(order, q));
  T r = std::clamp(inner.value(), T(0), T(1));
  inner[0] = r;
  Jet<T> outer = d.R(Jet<T>::variable(order, r));
  Jet<T> f = compose(outer, inner);
  f[0] = std::clamp(f[0], T(0), T(1));
  return f;
}

}  // namespace

Jet<double> jet_f(const OffspringDistribution& d, double q, int order) { return jet_f_impl<double>(d, q, order); }
Jet<long double> jet_f(const OffspringDistribution& d, long double q, int order) {
  return jet_f_impl<long double>(d, q, order);
}

double inverse_G(const OffspringDistribution& d, double y) {
  check_unit(y, "inverse_G");
  if (y == 0 || y == 1) return y;
  const double p = d.parameter();
  double x = -1;
  switch (d.kind()) {
    case Kind::regular: x = std::pow(y, 1 / p); break;
    case Kind::geometric: x = y / (p + (1 - p) * y); break;
    case Kind::involution_b: x = p == 1 ? y : 1 - std::pow(1 - std::pow(y, 1 / p), p); break;
    case Kind::involution_c: x = p == 1 ? y : std::pow(1 - std::pow(1 - y, p), 1 / p); break;
    default: break;
  }
  if (x >= 0) return std::clamp(x, 0.0, 1.0);
  // G is increasing: bisection, finished by a few Newton steps.
  double lo = 0, hi = 1;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    double mid = 0.5 * (lo + hi);
    if (d.G(mid) < y) lo = mid;
    else hi = mid;
  }
  x = 0.5 * (lo + hi);
  for (int i = 0; i < 3 && x > 0 && x < 1; ++i) {
    auto j = d.G(Jet<double>::variable(1, x));
    if (!(j[1] > 0)) break;
    double nx = x - (j[0] - y) / j[1];
    if (nx < lo || nx > hi) break;
    x = nx;
  }
  return x;
}

}  // namespace gwmm
