// gwmm: command-line front end over the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gwmm/gwmm.h"

namespace {

struct Common {
  std::string dist;
  std::string out;
  std::string json_out;
  bool quiet = false;
};

std::string load_spec(const std::string& s) {
  if (s.empty() || s[0] != '@') return s;
  std::ifstream in(s.substr(1));
  if (!in) throw CLI::ValidationError("--dist", "cannot read " + s.substr(1));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << text;
  return static_cast<bool>(f);
}

int report(gwmm_status st, gwmm_result* r, const Common& c) {
  if (r) {
    if (!c.quiet) std::cout << gwmm_result_json(r) << '\n';
    if (!c.json_out.empty() && !write_file(c.json_out, gwmm_result_json(r))) {
      std::cerr << "gwmm: cannot write " << c.json_out << '\n';
      gwmm_result_free(r);
      return 2;
    }
    if (!c.out.empty() && !write_file(c.out, gwmm_result_csv(r))) {
      std::cerr << "gwmm: cannot write " << c.out << '\n';
      gwmm_result_free(r);
      return 2;
    }
    gwmm_result_free(r);
  }
  if (st != GWMM_OK) std::cerr << "gwmm: " << gwmm_last_error() << '\n';
  return gwmm_exit_code(st);
}

using DistCommand = gwmm_status (*)(const gwmm_dist*, const gwmm_options*, gwmm_result**);

int run_dist(DistCommand fn, const gwmm_options& opt, const Common& c) {
  gwmm_dist* d = nullptr;
  gwmm_status st = gwmm_dist_parse(load_spec(c.dist).c_str(), &d);
  if (st != GWMM_OK) {
    std::cerr << "gwmm: " << gwmm_last_error() << '\n';
    return gwmm_exit_code(st);
  }
  gwmm_result* r = nullptr;
  st = fn(d, &opt, &r);
  gwmm_dist_free(d);
  return report(st, r, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimax recursions on Galton-Watson trees"};
  app.set_version_flag("--version", std::string(gwmm_version()));
  app.require_subcommand(1);

  gwmm_options opt;
  gwmm_options_init(&opt);
  Common c;
  std::string precision = "double";
  std::string boundary = "uniform";
  std::uint64_t samples = opt.samples;

  auto common = [&](CLI::App* sub, bool needs_dist) {
    if (needs_dist)
      sub->add_option("--dist", c.dist, "distribution spec, JSON object, or @file")->required();
    sub->add_option("--out", c.out, "write the CSV table here");
    sub->add_option("--json", c.json_out, "write the JSON report here");
    sub->add_flag("--quiet", c.quiet, "do not print the JSON report");
    sub->add_option("--seed", opt.seed, "random seed")->capture_default_str();
    sub->add_option("--precision", precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}))
        ->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores");
  };

  auto* analyze = app.add_subcommand("analyze", "fixed points, stability and the limit law");
  common(analyze, true);
  analyze->add_option("--grid", opt.grid, "sign-change scan points");

  auto* curve = app.add_subcommand("curve", "CSV of x, f(x) - x");
  common(curve, true);
  curve->add_option("--grid", opt.grid, "number of points (default 1001)");

  std::string family;
  auto* scan = app.add_subcommand("scan", "fixed-point structure across a one-parameter family");
  common(scan, false);
  scan->add_option("--family", family, "spec template with {p} and {1-p}")->required();
  scan->add_option("--lo", opt.scan_lo, "first parameter")->capture_default_str();
  scan->add_option("--hi", opt.scan_hi, "last parameter")->capture_default_str();
  scan->add_option("--step", opt.scan_step, "parameter step");
  scan->add_option("--grid", opt.grid, "number of rows when --step is not given");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo root values with the analytic comparison");
  common(simulate, true);
  simulate->add_option("--depth", opt.depth, "tree depth (default 4)");
  simulate->add_option("--samples", samples, "tree samples")->capture_default_str();
  simulate->add_option("--boundary", boundary, "uniform, bernoulli or bivariate")
      ->check(CLI::IsMember({"uniform", "bernoulli", "bivariate"}))
      ->capture_default_str();
  simulate->add_option("--x", opt.x, "Bernoulli leaves are 1 with probability 1-x");
  simulate->add_option("--node-budget", opt.node_budget, "max nodes per tree sample")->capture_default_str();
  simulate->add_flag("--pruned", opt.pruned, "alpha-beta pruned sampler");

  auto* scaling = app.add_subcommand("scaling", "rescaled fluctuation law around an atom");
  common(scaling, true);
  scaling->add_option("--q", opt.q, "pick the fixed point nearest to q");
  scaling->add_option("--grid", opt.grid, "case A table size (default 200)");
  scaling->add_option("--depth", opt.depth, "case C: levels of Monte Carlo verification");
  scaling->add_option("--samples", samples, "case C: Monte Carlo pool size")->capture_default_str();

  auto* endogeny = app.add_subcommand("endogeny", "bivariate uniqueness at a fixed point");
  common(endogeny, true);
  endogeny->add_option("--x", opt.x, "fixed point (default: first interior fixed point)");
  endogeny->add_option("--depth", opt.depth, "even depth for a bivariate Monte Carlo check");
  endogeny->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  opt.samples = samples;
  opt.precision = precision == "extended" ? GWMM_PRECISION_EXTENDED : GWMM_PRECISION_DOUBLE;
  static const std::map<std::string, gwmm_boundary> boundaries = {
      {"uniform", GWMM_BOUNDARY_UNIFORM}, {"bernoulli", GWMM_BOUNDARY_BERNOULLI}, {"bivariate", GWMM_BOUNDARY_BIVARIATE}};
  opt.boundary = boundaries.at(boundary);
  for (auto* sub : {simulate, endogeny})
    if (sub->parsed() && sub->count("--x")) opt.has_x = 1;
  if (scaling->parsed() && scaling->count("--q")) opt.has_q = 1;

  try {
    if (analyze->parsed()) return run_dist(gwmm_analyze, opt, c);
    if (curve->parsed()) return run_dist(gwmm_curve, opt, c);
    if (simulate->parsed()) return run_dist(gwmm_simulate, opt, c);
    if (scaling->parsed()) return run_dist(gwmm_scaling, opt, c);
    if (endogeny->parsed()) return run_dist(gwmm_endogeny, opt, c);
    if (scan->parsed()) {
      gwmm_result* r = nullptr;
      const gwmm_status st = gwmm_scan(family.c_str(), &opt, &r);
      return report(st, r, c);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "gwmm: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
