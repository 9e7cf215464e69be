#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "gwmm/analysis.hpp"

namespace gwmm {

enum class Precision { double_precision, extended };
const char* precision_name(Precision p);

// Fluctuation law around an atom with 1 < xi < inf, in conditioned units:
// F(x) = lim f~^n(q~ + x/xi^n), f~ the map rescaled to [q-, q+].
struct CaseA {
  double q = 0, q_minus = 0, q_plus = 0;
  double xi = 0;
  double q_tilde = 0;  // (q - q-)/(q+ - q-)
  double scale = 0;    // q+ - q-
  std::vector<double> x;
  std::vector<double> F;
  std::vector<int> iterations;
  bool monotone_tail = true;
  double max_residual = 0;  // max |F(x) - f~(F(x/xi))| over the grid
};

struct CaseB {
  double q = 0;
  int k = 0;
  double derivative_k = 0;  // f^(k)(q)
  double a = 0;             // positive; V = +a w.p. mass_plus, -a w.p. mass_minus
  double mass_plus = 0;
  double mass_minus = 0;
};

struct CaseC {
  long K = 0;
  double p_K = 0;
  double rho = 0;
  double c = 0;
  double exponent = 0;  // K(1-rho)
  double C0 = 0;
  double C1 = 0;
  double fit_rms = 0;
  long fit_lo = 0, fit_hi = 0;
};

using ScalingRegime = std::variant<CaseA, CaseB, CaseC>;

struct CaseAOptions {
  int max_n = 5000;
  double cauchy_tol = 1e-12;
  Precision precision = Precision::double_precision;
  unsigned threads = 0;
};

// 0 plus geometric spacing of |x| over [lo, hi] on both sides; count points total.
std::vector<double> case_a_grid(int count = 200, double lo = 1e-3, double hi = 1e3);

CaseA solve_case_a(const OffspringDistribution& d, const FixedPointRecord& fp, const std::vector<double>& grid,
                   const CaseAOptions& opt = {});
// Single evaluation of the Case A limit at x.
double case_a_value(const OffspringDistribution& d, const FixedPointRecord& fp, double x,
                    const CaseAOptions& opt = {});
// The conditioned map f~ for the interval [q-, q+] of fp.
double conditioned_f(const OffspringDistribution& d, const FixedPointRecord& fp, double z);

CaseB solve_case_b(const OffspringDistribution& d, const FixedPointRecord& fp, int max_order = 12);

struct CaseCOptions {
  long fit_lo = 100;
  long fit_hi = 0;  // 0: truncation/10 (1e5 for laws without a truncation)
  double max_rms = 0.05;
};
CaseC solve_case_c(const OffspringDistribution& d, const CaseCOptions& opt = {});

// Least-squares slope of log f(t) (at_zero) or log(1 - f(1-t)) against log t
// over t = 2^-j, j = jlo..jhi.
double endpoint_slope(const OffspringDistribution& d, bool at_zero, int jlo = 10, int jhi = 30);

struct CaseCLevel {
  int n = 0;
  std::size_t accepted = 0;
  double acceptance = 0;
  std::vector<double> quantiles;  // Monte Carlo, at CaseCVerification::probs
  std::vector<double> analytic;   // exact conditional quantiles from f^n
  std::vector<char> resolved;     // quantile lies above the pool floor atom
  double floor_fraction = 0;      // share of accepted samples equal to the largest value
  double drift = 0;               // max change of resolved quantiles from level n-1
  double analytic_drift = 0;
  double min_value = 0;
};

struct CaseCSide {
  double boundary = 0;      // 0 or 1
  double interval_end = 0;  // q+ for 0, q- for 1
  std::vector<CaseCLevel> levels;
  bool stabilizes = false;           // Monte Carlo drift at the last level below the drift at level 2
  bool analytic_stabilizes = false;  // same test on the exact quantiles
};

struct CaseCVerification {
  std::vector<double> probs;
  CaseCSide at_zero, at_one;
  bool consistent = false;  // both ends agree on stabilization
  long truncation = 0;
  std::size_t samples = 0;
  std::size_t pool = 0;
  std::uint64_t seed = 0;
};

CaseCVerification verify_case_c_scaling(const OffspringDistribution& d, const CaseC& regime, int depth_n,
                                        std::size_t samples, std::uint64_t seed, unsigned threads = 0);

// Picks the regime from xi: A for 1 < xi < inf, B for xi = 1, C for xi = inf.
ScalingRegime solve_scaling(const OffspringDistribution& d, const FixedPointRecord& fp, const CaseAOptions& aopt = {});

}  // namespace gwmm
