#include "gwmm/gwmm.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "commands.hpp"
#include "gwmm/error.hpp"

struct gwmm_dist {
  gwmm::OffspringDistribution d;
  std::string spec;
};

struct gwmm_result {
  nlohmann::json json;
  std::string json_text;
  std::string csv;
};

namespace {

thread_local std::string last_error;

gwmm_status to_status(gwmm::Errc c) {
  using gwmm::Errc;
  switch (c) {
    case Errc::domain: return GWMM_E_DOMAIN;
    case Errc::config: return GWMM_E_CONFIG;
    case Errc::infinite_derivative: return GWMM_E_INFINITE_DERIVATIVE;
    case Errc::unresolved_touchpoint: return GWMM_E_UNRESOLVED_TOUCHPOINT;
    case Errc::no_convergence: return GWMM_E_NO_CONVERGENCE;
    case Errc::precision_loss: return GWMM_E_PRECISION_LOSS;
    case Errc::derivative_order_not_found: return GWMM_E_DERIVATIVE_ORDER_NOT_FOUND;
    case Errc::assumption_violated: return GWMM_E_ASSUMPTION_VIOLATED;
    case Errc::not_a_fixed_point: return GWMM_E_NOT_A_FIXED_POINT;
    case Errc::insufficient_samples: return GWMM_E_INSUFFICIENT_SAMPLES;
    case Errc::budget_exceeded: return GWMM_E_BUDGET_EXCEEDED;
    case Errc::internal: return GWMM_E_INTERNAL;
  }
  return GWMM_E_INTERNAL;
}

template <class F>
gwmm_status guarded(F&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const gwmm::Error& e) {
    last_error = std::string(gwmm::errc_name(e.code())) + ": " + e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GWMM_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GWMM_E_INTERNAL;
  }
}

gwmm_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return GWMM_E_NULL_ARGUMENT;
}

template <class Fn>
gwmm_status run_command(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out, Fn fn) {
  if (!d) return null_arg("dist");
  if (!out) return null_arg("out");
  *out = nullptr;
  gwmm_options o;
  gwmm_options_init(&o);
  if (opt) o = *opt;
  return guarded([&] {
    auto res = fn(d->d, o);
    auto r = std::make_unique<gwmm_result>();
    r->json_text = res.json.dump(2);
    r->json = std::move(res.json);
    r->csv = std::move(res.csv);
    *out = r.release();
    if (res.budget_dominant) {
      last_error = "Budget-Exceeded: more than half of the tree samples exceeded the node budget";
      return GWMM_E_BUDGET_EXCEEDED;
    }
    return GWMM_OK;
  });
}

template <class Fn>
gwmm_status eval1(const gwmm_dist* d, double* out, Fn fn) {
  if (!d) return null_arg("dist");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = fn(d->d);
    return GWMM_OK;
  });
}

}  // namespace

extern "C" {

void gwmm_options_init(gwmm_options* opt) {
  if (!opt) return;
  *opt = gwmm_options{};
  opt->grid = 0;
  opt->depth = 0;
  opt->samples = 10000;
  opt->seed = 1;
  opt->node_budget = 100000000;
  opt->threads = 0;
  opt->precision = GWMM_PRECISION_DOUBLE;
  opt->boundary = GWMM_BOUNDARY_UNIFORM;
  opt->x = 0.5;
  opt->q = 0;
  opt->scan_lo = 0;
  opt->scan_hi = 1;
  opt->scan_step = 0;
}

const char* gwmm_version(void) { return gwmm::cmd::kVersion; }

const char* gwmm_last_error(void) { return last_error.c_str(); }

const char* gwmm_status_name(gwmm_status s) {
  switch (s) {
    case GWMM_OK: return "OK";
    case GWMM_E_DOMAIN: return "Domain";
    case GWMM_E_CONFIG: return "Config";
    case GWMM_E_UNRESOLVED_TOUCHPOINT: return "Unresolved-Touchpoint";
    case GWMM_E_NO_CONVERGENCE: return "No-Convergence";
    case GWMM_E_ASSUMPTION_VIOLATED: return "Assumption-Violated";
    case GWMM_E_BUDGET_EXCEEDED: return "Budget-Exceeded";
    case GWMM_E_INFINITE_DERIVATIVE: return "Infinite-Derivative";
    case GWMM_E_PRECISION_LOSS: return "Precision-Loss";
    case GWMM_E_DERIVATIVE_ORDER_NOT_FOUND: return "Derivative-Order-Not-Found";
    case GWMM_E_NOT_A_FIXED_POINT: return "Not-A-Fixed-Point";
    case GWMM_E_INSUFFICIENT_SAMPLES: return "Insufficient-Conditioned-Samples";
    case GWMM_E_NULL_ARGUMENT: return "Null-Argument";
    case GWMM_E_NOT_FOUND: return "Not-Found";
    case GWMM_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

int gwmm_exit_code(gwmm_status s) {
  switch (s) {
    case GWMM_OK: return 0;
    case GWMM_E_CONFIG:
    case GWMM_E_DOMAIN:
    case GWMM_E_NOT_A_FIXED_POINT:
    case GWMM_E_NULL_ARGUMENT:
    case GWMM_E_NOT_FOUND: return 2;
    case GWMM_E_UNRESOLVED_TOUCHPOINT: return 3;
    case GWMM_E_NO_CONVERGENCE:
    case GWMM_E_ASSUMPTION_VIOLATED:
    case GWMM_E_INFINITE_DERIVATIVE:
    case GWMM_E_PRECISION_LOSS:
    case GWMM_E_DERIVATIVE_ORDER_NOT_FOUND:
    case GWMM_E_INSUFFICIENT_SAMPLES: return 4;
    case GWMM_E_BUDGET_EXCEEDED: return 5;
    case GWMM_E_INTERNAL: return 1;
  }
  return 1;
}

gwmm_status gwmm_dist_parse(const char* spec, gwmm_dist** out) {
  if (!spec) return null_arg("spec");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto d = gwmm::parse_distribution(spec);
    auto h = std::make_unique<gwmm_dist>(gwmm_dist{d, d.spec()});
    *out = h.release();
    return GWMM_OK;
  });
}

void gwmm_dist_free(gwmm_dist* d) { delete d; }

const char* gwmm_dist_spec(const gwmm_dist* d) { return d ? d->spec.c_str() : ""; }

gwmm_status gwmm_dist_mean(const gwmm_dist* d, double* out) {
  return eval1(d, out, [](const gwmm::OffspringDistribution& dd) { return dd.mean(); });
}

gwmm_status gwmm_dist_mass(const gwmm_dist* d, long k, double* out) {
  return eval1(d, out, [k](const gwmm::OffspringDistribution& dd) { return dd.mass(k); });
}

gwmm_status gwmm_eval_G(const gwmm_dist* d, double x, double* out) {
  return eval1(d, out, [x](const gwmm::OffspringDistribution& dd) { return gwmm::eval_G(dd, x); });
}

gwmm_status gwmm_eval_R(const gwmm_dist* d, double x, double* out) {
  return eval1(d, out, [x](const gwmm::OffspringDistribution& dd) { return gwmm::eval_R(dd, x); });
}

gwmm_status gwmm_eval_f(const gwmm_dist* d, double x, double* out) {
  return eval1(d, out, [x](const gwmm::OffspringDistribution& dd) { return gwmm::eval_f(dd, x); });
}

gwmm_status gwmm_inverse_G(const gwmm_dist* d, double y, double* out) {
  return eval1(d, out, [y](const gwmm::OffspringDistribution& dd) { return gwmm::inverse_G(dd, y); });
}

gwmm_status gwmm_jet_f(const gwmm_dist* d, double q, int order, double* coeffs) {
  if (!d) return null_arg("dist");
  if (!coeffs) return null_arg("coeffs");
  return guarded([&] {
    if (order < 0) gwmm::fail(gwmm::Errc::config, "jet order must be >= 0");
    auto j = gwmm::jet_f(d->d, q, order);
    for (int i = 0; i <= order; ++i) coeffs[i] = j[i];
    return GWMM_OK;
  });
}

gwmm_status gwmm_analyze(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out) {
  return run_command(d, opt, out, gwmm::cmd::analyze);
}

gwmm_status gwmm_curve(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out) {
  return run_command(d, opt, out, gwmm::cmd::curve);
}

gwmm_status gwmm_scan(const char* family, const gwmm_options* opt, gwmm_result** out) {
  if (!family) return null_arg("family");
  if (!out) return null_arg("out");
  *out = nullptr;
  gwmm_options o;
  gwmm_options_init(&o);
  if (opt) o = *opt;
  return guarded([&] {
    auto res = gwmm::cmd::scan(family, o);
    auto r = std::make_unique<gwmm_result>();
    r->json_text = res.json.dump(2);
    r->json = std::move(res.json);
    r->csv = std::move(res.csv);
    *out = r.release();
    return GWMM_OK;
  });
}

gwmm_status gwmm_simulate(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out) {
  return run_command(d, opt, out, gwmm::cmd::simulate);
}

gwmm_status gwmm_scaling(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out) {
  return run_command(d, opt, out, gwmm::cmd::scaling);
}

gwmm_status gwmm_endogeny(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out) {
  return run_command(d, opt, out, gwmm::cmd::endogeny);
}

const char* gwmm_result_json(const gwmm_result* r) { return r ? r->json_text.c_str() : ""; }

const char* gwmm_result_csv(const gwmm_result* r) { return r ? r->csv.c_str() : ""; }

gwmm_status gwmm_result_get_double(const gwmm_result* r, const char* pointer, double* out) {
  if (!r) return null_arg("result");
  if (!pointer) return null_arg("pointer");
  if (!out) return null_arg("out");
  return guarded([&] {
    nlohmann::json::json_pointer p(pointer);
    if (!r->json.contains(p)) {
      last_error = std::string("no value at ") + pointer;
      return GWMM_E_NOT_FOUND;
    }
    const auto& v = r->json.at(p);
    if (v.is_number()) {
      *out = v.get<double>();
    } else if (v.is_boolean()) {
      *out = v.get<bool>() ? 1.0 : 0.0;
    } else if (v.is_string() && (v == "inf" || v == "-inf" || v == "nan")) {
      const auto s = v.get<std::string>();
      *out = s == "nan" ? std::numeric_limits<double>::quiet_NaN()
                        : (s == "inf" ? 1.0 : -1.0) * std::numeric_limits<double>::infinity();
    } else {
      last_error = std::string("value at ") + pointer + " is not numeric";
      return GWMM_E_NOT_FOUND;
    }
    return GWMM_OK;
  });
}

void gwmm_result_free(gwmm_result* r) { delete r; }

}  // extern "C"
