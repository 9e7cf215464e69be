#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gwmm/distribution.hpp"

namespace gwmm {

enum class Boundary { uniform, bernoulli, bivariate };
const char* boundary_name(Boundary b);

struct SimConfig {
  int depth = 2;  // levels below the root; the root is a min level when depth is even
  Boundary boundary = Boundary::uniform;
  double x = 0.5;  // Bernoulli leaves take value 1 with probability 1 - x
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::uint64_t node_budget = 100000000;
  unsigned threads = 0;
  bool pruned = false;  // alpha-beta cutoffs; same law, different draw consumption
};

void validate(const SimConfig& cfg);

// One root value for sample index `index`. Throws Budget-Exceeded.
double sample_root(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index);
// As sample_root; requires odd depth (max at the root).
double sample_root_odd(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index);

struct BitPair {
  int first;
  int second;
};
BitPair sample_bivariate_root(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index);

struct SimResult {
  std::vector<double> values;  // accepted samples, in index order
  std::size_t budget_exceeded = 0;
  std::uint64_t nodes = 0;
};
SimResult simulate(const OffspringDistribution& d, const SimConfig& cfg);

struct BivariateResult {
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};  // counts[first][second]
  std::size_t accepted = 0;
  std::size_t budget_exceeded = 0;
  double p10() const { return accepted ? static_cast<double>(counts[1][0]) / accepted : 0; }
  double p01() const { return accepted ? static_cast<double>(counts[0][1]) / accepted : 0; }
};
BivariateResult simulate_bivariate(const OffspringDistribution& d, const SimConfig& cfg);

class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(std::vector<double> samples);
  double operator()(double x) const;
  std::size_t size() const { return v_.size(); }
  const std::vector<double>& sorted() const { return v_; }
  double quantile(double p) const;

 private:
  std::vector<double> v_;
};

double ks_statistic(const EmpiricalCDF& e, const std::function<double(double)>& cdf);
double ks_two_sample(const EmpiricalCDF& a, const EmpiricalCDF& b);
// 99% Kolmogorov bounds.
double ks_bound(std::size_t n);
double ks_bound_two_sample(std::size_t n, std::size_t m);

// Population-dynamics sampler for the even-level recursion
//   W_{2n} = min_{i<=M} max_{j<=M_i} W_{2n-2}^{(i,j)}
// with uniform leaves. Level 1 is sampled exactly; level n >= 2 draws its
// grandchildren from the level n-1 sample pool. Each entry keeps w and 1-w
// so both ends of [0,1] keep full relative precision.
struct PoolValue {
  double w;
  double wbar;
};
std::vector<std::vector<PoolValue>> sample_rde_levels(const OffspringDistribution& d, int levels,
                                                      std::size_t samples, std::uint64_t seed,
                                                      unsigned threads = 0);

}  // namespace gwmm
