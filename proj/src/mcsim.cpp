#include "gwmm/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "philox.hpp"

namespace gwmm {

const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::uniform: return "uniform";
    case Boundary::bernoulli: return "bernoulli";
    case Boundary::bivariate: return "bivariate";
  }
  return "?";
}

void validate(const SimConfig& cfg) {
  if (cfg.depth < 0) fail(Errc::config, "simulation depth must be >= 0");
  if (cfg.samples < 1) fail(Errc::config, "simulation needs at least one sample");
  if (cfg.node_budget < static_cast<std::uint64_t>(cfg.depth) + 1) fail(Errc::config, "node budget below depth");
  if (cfg.boundary != Boundary::uniform && !(cfg.x > 0 && cfg.x < 1))
    fail(Errc::config, "Bernoulli boundary needs 0 < x < 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BudgetHit {};

class Walker {
 public:
  Walker(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index)
      : d_(d), cfg_(cfg), rng_(cfg.seed, index) {}

  std::uint64_t nodes() const { return nodes_; }

  double value(int r) {
    tick();
    if (r == 0) return leaf();
    const long m = d_.sample_offspring(rng_.uniform());
    if (r == 1) {
      // leaf level inlined; same draws as the recursive form
      nodes_ += static_cast<std::uint64_t>(m);
      if (nodes_ > cfg_.node_budget) throw BudgetHit{};
      double best = -kInf;
      for (long i = 0; i < m; ++i) best = std::max(best, leaf());
      return best;
    }
    if (r % 2 == 0) {
      double best = kInf;
      for (long i = 0; i < m; ++i) best = std::min(best, value(r - 1));
      return best;
    }
    double best = -kInf;
    for (long i = 0; i < m; ++i) best = std::max(best, value(r - 1));
    return best;
  }

  double pruned(int r, double alpha, double beta) {
    tick();
    if (r == 0) return leaf();
    const long m = d_.sample_offspring(rng_.uniform());
    if (r % 2 == 0) {
      double best = kInf;
      for (long i = 0; i < m; ++i) {
        best = std::min(best, pruned(r - 1, alpha, std::min(beta, best)));
        if (best <= alpha) break;
      }
      return best;
    }
    double best = -kInf;
    for (long i = 0; i < m; ++i) {
      best = std::max(best, pruned(r - 1, std::max(alpha, best), beta));
      if (best >= beta) break;
    }
    return best;
  }

  // Bit 0 is the first coordinate, bit 1 the second. min = AND, max = OR.
  unsigned pair(int r) {
    tick();
    if (r == 0) {
      unsigned a = rng_.uniform() > cfg_.x ? 1u : 0u;
      unsigned b = rng_.uniform() > cfg_.x ? 2u : 0u;
      return a | b;
    }
    const long m = d_.sample_offspring(rng_.uniform());
    if (r % 2 == 0) {
      unsigned acc = 3u;
      for (long i = 0; i < m; ++i) acc &= pair(r - 1);
      return acc;
    }
    unsigned acc = 0u;
    for (long i = 0; i < m; ++i) acc |= pair(r - 1);
    return acc;
  }

 private:
  void tick() {
    if (++nodes_ > cfg_.node_budget) throw BudgetHit{};
  }
  double leaf() {
    const double u = rng_.uniform();
    if (cfg_.boundary == Boundary::uniform) return u;
    return u > cfg_.x ? 1.0 : 0.0;
  }

  const OffspringDistribution& d_;
  const SimConfig& cfg_;
  detail::Philox rng_;
  std::uint64_t nodes_ = 0;
};

double run_one(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index, std::uint64_t* nodes) {
  Walker w(d, cfg, index);
  double v;
  try {
    v = cfg.pruned ? w.pruned(cfg.depth, -kInf, kInf) : w.value(cfg.depth);
  } catch (const BudgetHit&) {
    if (nodes) *nodes = w.nodes();
    fail(Errc::budget_exceeded, "tree sample exceeded the node budget");
  }
  if (nodes) *nodes = w.nodes();
  return v;
}

}  // namespace

double sample_root(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index) {
  validate(cfg);
  if (cfg.boundary == Boundary::bivariate) fail(Errc::config, "sample_root: use sample_bivariate_root");
  return run_one(d, cfg, index, nullptr);
}

double sample_root_odd(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index) {
  if (cfg.depth % 2 == 0) fail(Errc::config, "sample_root_odd: depth must be odd");
  return sample_root(d, cfg, index);
}

BitPair sample_bivariate_root(const OffspringDistribution& d, const SimConfig& cfg, std::size_t index) {
  validate(cfg);
  Walker w(d, cfg, index);
  unsigned v;
  try {
    v = w.pair(cfg.depth);
  } catch (const BudgetHit&) {
    fail(Errc::budget_exceeded, "tree sample exceeded the node budget");
  }
  return {static_cast<int>(v & 1u), static_cast<int>((v >> 1) & 1u)};
}

SimResult simulate(const OffspringDistribution& d, const SimConfig& cfg) {
  validate(cfg);
  if (cfg.boundary == Boundary::bivariate) fail(Errc::config, "simulate: use simulate_bivariate");
  std::vector<double> vals(cfg.samples);
  std::vector<std::uint64_t> nodes(cfg.samples);
  std::vector<char> bad(cfg.samples, 0);
  detail::parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    try {
      vals[i] = run_one(d, cfg, i, &nodes[i]);
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
      bad[i] = 1;
    }
  });
  SimResult r;
  r.values.reserve(cfg.samples);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    r.nodes += nodes[i];
    if (bad[i]) ++r.budget_exceeded;
    else r.values.push_back(vals[i]);
  }
  return r;
}

BivariateResult simulate_bivariate(const OffspringDistribution& d, const SimConfig& cfg) {
  validate(cfg);
  std::vector<signed char> out(cfg.samples, -1);
  detail::parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    try {
      auto p = sample_bivariate_root(d, cfg, i);
      out[i] = static_cast<signed char>(p.first | (p.second << 1));
    } catch (const Error& e) {
      if (e.code() != Errc::budget_exceeded) throw;
    }
  });
  BivariateResult r;
  for (auto v : out) {
    if (v < 0) {
      ++r.budget_exceeded;
      continue;
    }
    ++r.counts[v & 1][(v >> 1) & 1];
    ++r.accepted;
  }
  return r;
}

EmpiricalCDF::EmpiricalCDF(std::vector<double> samples) : v_(std::move(samples)) {
  std::sort(v_.begin(), v_.end());
}

double EmpiricalCDF::operator()(double x) const {
  if (v_.empty()) return 0;
  return static_cast<double>(std::upper_bound(v_.begin(), v_.end(), x) - v_.begin()) / v_.size();
}

double EmpiricalCDF::quantile(double p) const {
  if (v_.empty()) fail(Errc::insufficient_samples, "quantile of an empty sample");
  auto k = static_cast<std::size_t>(std::ceil(p * v_.size()));
  k = std::clamp<std::size_t>(k, 1, v_.size());
  return v_[k - 1];
}

double ks_statistic(const EmpiricalCDF& e, const std::function<double(double)>& cdf) {
  const auto& v = e.sorted();
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    // ties: only the last of a run of equal values carries the full step
    const double F = cdf(v[i]);
    d = std::max(d, (i + 1) / n - F);
    if (i == 0 || v[i - 1] != v[i]) d = std::max(d, F - i / n);
  }
  return d;
}

double ks_two_sample(const EmpiricalCDF& a, const EmpiricalCDF& b) {
  const auto& x = a.sorted();
  const auto& y = b.sorted();
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  return d;
}

double ks_bound(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

double ks_bound_two_sample(std::size_t n, std::size_t m) {
  return 1.63 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

std::vector<std::vector<PoolValue>> sample_rde_levels(const OffspringDistribution& d, int levels,
                                                      std::size_t samples, std::uint64_t seed, unsigned threads) {
  if (levels < 1 || samples < 1) fail(Errc::config, "sample_rde_levels: need levels >= 1 and samples >= 1");
  std::vector<std::vector<PoolValue>> out;
  for (int lev = 1; lev <= levels; ++lev) {
    std::vector<PoolValue> cur(samples);
    const std::vector<PoolValue>* pool = out.empty() ? nullptr : &out.back();
    const double P = pool ? static_cast<double>(pool->size()) : 0;
    detail::parallel_for(samples, threads, [&](std::size_t s) {
      detail::Philox rng(seed, (static_cast<std::uint64_t>(lev) << 40) + s);
      const long m = d.sample_offspring(rng.uniform());
      if (!pool) {
        // max of k uniforms is U^(1/k); keep the smallest over the M children
        double best_log = 0;
        for (long i = 0; i < m; ++i) {
          const long k = d.sample_offspring(rng.uniform());
          best_log = std::min(best_log, std::log(rng.uniform()) / static_cast<double>(k));
        }
        cur[s] = {std::exp(best_log), -std::expm1(best_log)};
        return;
      }
      // the max of k uniform picks from a sorted pool has index floor(P U^(1/k))
      std::size_t best = pool->size() - 1;
      for (long i = 0; i < m; ++i) {
        const long k = d.sample_offspring(rng.uniform());
        const double t = std::exp(std::log(rng.uniform()) / static_cast<double>(k));
        const auto idx = std::min(pool->size() - 1, static_cast<std::size_t>(P * t));
        best = std::min(best, idx);
      }
      cur[s] = (*pool)[best];
    });
    std::sort(cur.begin(), cur.end(), [](const PoolValue& a, const PoolValue& b) {
      return a.w < b.w || (a.w == b.w && a.wbar > b.wbar);
    });
    out.push_back(std::move(cur));
  }
  return out;
}

}  // namespace gwmm
