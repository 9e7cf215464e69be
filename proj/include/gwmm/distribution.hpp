#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gwmm/jet.hpp"

namespace gwmm {

enum class Kind { finite, regular, geometric, involution_b, involution_c, power_law };

const char* kind_name(Kind k);

namespace detail {
struct PolylogTable;
}

// Offspring law on {1,2,...}. Immutable after construction.
//
// The power-law kind is p_k = k^-alpha / zeta(alpha) on all of {1,2,...} for
// analytic evaluation; its truncation N only shapes the sampling table and the
// partial-sum fit window.
class OffspringDistribution {
 public:
  static OffspringDistribution finite(const std::map<long, double>& table);
  static OffspringDistribution regular(int d);
  static OffspringDistribution geometric(double p);
  static OffspringDistribution involution_b(int n);
  static OffspringDistribution involution_c(int n);
  static OffspringDistribution power_law(double alpha, long truncation = 1000000);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  long truncation() const { return trunc_; }
  const std::map<long, double>& table() const { return table_; }

  double mass(long k) const;
  // p_1..p_kmax (index 0 holds p_1).
  std::vector<double> masses(long kmax) const;
  double mean() const;  // +inf when infinite
  bool finite_mean() const;
  double p1() const { return mass(1); }
  long min_support() const;
  double p_min_support() const { return mass(min_support()); }

  // Canonical text spec, parseable by parse_distribution().
  std::string spec() const;

  template <class T>
  T G(T x) const;
  template <class T>
  T R(T x) const;
  // R(1-u), accurate for small u.
  template <class T>
  T Rc(T u) const;
  template <class T>
  Jet<T> G(const Jet<T>& x) const;
  template <class T>
  Jet<T> R(const Jet<T>& x) const;

  // Offspring count for a uniform u in (0,1); heavy-tailed kinds draw from the
  // truncated normalized table.
  long sample_offspring(double u) const;

 private:
  OffspringDistribution() = default;
  void build_sampling_table();

  Kind kind_ = Kind::finite;
  double param_ = 0;
  long trunc_ = 0;
  std::map<long, double> table_;
  std::vector<double> coef_;  // finite: dense p_0..p_max for Horner
  std::shared_ptr<const detail::PolylogTable> poly_;
  std::shared_ptr<const std::vector<double>> cdf_;  // sampling table, cdf_[k-1] = P(M <= k)
  std::shared_ptr<const std::vector<std::uint32_t>> guide_;  // guide_[j]: first k-1 with cdf >= j/size
};

double eval_G(const OffspringDistribution& d, double x);
double eval_R(const OffspringDistribution& d, double x);
double eval_f(const OffspringDistribution& d, double x);
long double eval_f(const OffspringDistribution& d, long double x);
// f(t) and 1 - f(1-t) with full relative precision for tiny t.
double eval_f_near_zero(const OffspringDistribution& d, double t);
double eval_one_minus_f_near_one(const OffspringDistribution& d, double t);
Jet<double> jet_f(const OffspringDistribution& d, double q, int order);
Jet<long double> jet_f(const OffspringDistribution& d, long double q, int order);
double inverse_G(const OffspringDistribution& d, double y);

// Text grammar: finite:k=p,...  geometric:p  regular:d  powerlaw:alpha[,N]
// invb:n  invc:n.  A leading '{' selects the JSON form.
OffspringDistribution parse_distribution(const std::string& spec);
OffspringDistribution distribution_from_json(const std::string& json_text);
std::string distribution_to_json(const OffspringDistribution& d);

// Substitute {p} and {1-p} in a family template.
std::string instantiate_family(const std::string& tmpl, double p);

}  // namespace gwmm
