#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "gwmm/analysis.hpp"
#include "gwmm/endogeny.hpp"
#include "gwmm/mcsim.hpp"
#include "gwmm/scaling.hpp"

namespace gwmm::cmd {

const char* const kVersion = "0.3.0";

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

Precision precision_of(const gwmm_options& o) {
  return o.precision == GWMM_PRECISION_EXTENDED ? Precision::extended : Precision::double_precision;
}

Boundary boundary_of(const gwmm_options& o) {
  switch (o.boundary) {
    case GWMM_BOUNDARY_UNIFORM: return Boundary::uniform;
    case GWMM_BOUNDARY_BERNOULLI: return Boundary::bernoulli;
    case GWMM_BOUNDARY_BIVARIATE: return Boundary::bivariate;
  }
  fail(Errc::config, "unknown boundary code");
}

json options_json(const gwmm_options& o) {
  json j;
  j["grid"] = o.grid;
  j["depth"] = o.depth;
  j["samples"] = o.samples;
  j["seed"] = o.seed;
  j["node_budget"] = o.node_budget;
  j["threads"] = o.threads;
  j["precision"] = precision_name(precision_of(o));
  j["boundary"] = boundary_name(boundary_of(o));
  j["x"] = o.has_x ? json(o.x) : json(nullptr);
  j["q"] = o.has_q ? json(o.q) : json(nullptr);
  j["scan"] = {{"lo", o.scan_lo}, {"hi", o.scan_hi}, {"step", o.scan_step}};
  j["pruned"] = o.pruned != 0;
  return j;
}

json meta(const char* command, const json& target, const gwmm_options& o) {
  json j;
  j["tool"] = "gwmm";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = {{"target", target}, {"options", options_json(o)}};
  j["seed"] = o.seed;
  j["precision"] = precision_name(precision_of(o));
  return j;
}

json dist_target(const OffspringDistribution& d) {
  return {{"spec", d.spec()}, {"distribution", json::parse(distribution_to_json(d))}};
}

std::string preamble(const json& m) {
  std::ostringstream os;
  os << "# tool: gwmm " << m["version"].get<std::string>() << "\n";
  os << "# command: " << m["command"].get<std::string>() << "\n";
  os << "# seed: " << m["seed"].get<std::uint64_t>() << "\n";
  os << "# precision: " << m["precision"].get<std::string>() << "\n";
  os << "# config: " << m["config"].dump() << "\n";
  return os.str();
}

json fp_json(const FixedPointRecord& r) {
  json j;
  j["q"] = r.q;
  j["xi"] = jnum(r.xi);
  j["order_k"] = r.order_k ? json(*r.order_k) : json(nullptr);
  j["stability"] = stability_name(r.stability);
  j["q_minus"] = r.q_minus;
  j["q_plus"] = r.q_plus;
  j["touchpoint"] = r.touchpoint;
  return j;
}

json law_json(const LimitLaw& law) {
  if (law.identity_uniform) return {{"type", "identity_uniform"}};
  json atoms = json::array();
  for (auto& a : law.atoms) atoms.push_back({{"location", a.location}, {"mass", a.mass}});
  return {{"type", "discrete"}, {"atoms", atoms}};
}

AnalysisOptions analysis_options(const gwmm_options& o) {
  AnalysisOptions a;
  if (o.grid > 0) a.grid = o.grid;
  return a;
}

double p1_mu(const OffspringDistribution& d) {
  return d.finite_mean() ? d.p1() * d.mean() : (d.p1() > 0 ? std::numeric_limits<double>::infinity() : 0.0);
}

// Root CDF at depth under uniform leaves: f^n for depth 2n, G(f^(n-1)) for depth 2n-1.
double root_cdf(const OffspringDistribution& d, int depth, double x) {
  double v = x;
  for (int i = 0; i < depth / 2; ++i) v = eval_f(d, v);
  if (depth % 2) v = eval_G(d, v);
  return v;
}

}  // namespace

Output analyze(const OffspringDistribution& d, const gwmm_options& opt) {
  Output out;
  out.json = meta("analyze", dist_target(d), opt);
  auto fps = find_fixed_points(d, analysis_options(opt));
  auto law = limit_law(fps);
  auto& j = out.json;
  j["identity"] = fps.identity;
  j["max_identity_deviation"] = max_identity_deviation(d, 1001);
  j["fixed_points"] = json::array();
  for (auto& r : fps.points) j["fixed_points"].push_back(fp_json(r));
  j["limit_law"] = law_json(law);
  j["endpoint_criterion"] = endpoint_criterion_name(endpoint_atom_criterion(d));
  j["p1"] = d.p1();
  j["mean"] = jnum(d.mean());
  j["p1_mu"] = jnum(p1_mu(d));
  j["r_fixed_point"] = r_fixed_point(d);

  std::ostringstream os;
  os << preamble(j) << "q,xi,order_k,stability,q_minus,q_plus,atom_mass\n";
  for (auto& r : fps.points) {
    os << num(r.q) << ',' << num(r.xi) << ',' << (r.order_k ? std::to_string(*r.order_k) : "") << ','
       << stability_name(r.stability) << ',' << num(r.q_minus) << ',' << num(r.q_plus) << ','
       << num(r.unstable() ? r.q_plus - r.q_minus : 0.0) << '\n';
  }
  out.csv = os.str();
  return out;
}

Output curve(const OffspringDistribution& d, const gwmm_options& opt) {
  const int n = opt.grid > 0 ? opt.grid : 1001;
  if (n < 2) fail(Errc::config, "curve: grid must be >= 2");
  Output out;
  out.json = meta("curve", dist_target(d), opt);
  std::ostringstream os;
  os << preamble(out.json) << "x,f,f_minus_x\n";
  json crossings = json::array();
  double max_abs = 0, prev = 0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    const double f = eval_f(d, x);
    const double g = f - x;
    max_abs = std::max(max_abs, std::abs(g));
    if (i > 0 && ((prev < 0 && g > 0) || (prev > 0 && g < 0)))
      crossings.push_back({{"x_lo", static_cast<double>(i - 1) / (n - 1)}, {"x_hi", x}, {"direction", g > 0 ? "up" : "down"}});
    if (g != 0) prev = g;
    os << num(x) << ',' << num(f) << ',' << num(g) << '\n';
  }
  out.json["points"] = n;
  out.json["max_abs"] = max_abs;
  out.json["sign_changes"] = crossings;
  out.csv = os.str();
  return out;
}

namespace {

struct ScanRow {
  double p = 0;
  std::string status = "ok";
  std::string message;
  FixedPointSet fps;
  std::string criterion;
  double p1mu = 0;
  std::string sig;
};

ScanRow scan_row(const std::string& family, double p, const AnalysisOptions& aopt) {
  ScanRow row;
  row.p = p;
  try {
    auto d = parse_distribution(instantiate_family(family, p));
    row.criterion = endpoint_criterion_name(endpoint_atom_criterion(d));
    row.p1mu = p1_mu(d);
    row.fps = find_fixed_points(d, aopt);
  } catch (const Error& e) {
    row.status = errc_name(e.code());
    row.message = e.what();
  }
  std::ostringstream sig;
  sig << row.status << '|' << row.criterion << '|';
  if (row.fps.identity) sig << "identity";
  else {
    sig << row.fps.points.size();
    for (auto& r : row.fps.points) sig << ',' << stability_name(r.stability);
  }
  row.sig = sig.str();
  return row;
}

json transition_kind(const ScanRow& a, const ScanRow& b) {
  json k = json::array();
  if (a.status != b.status) k.push_back("error");
  if (a.criterion != b.criterion) k.push_back("endpoint_criterion");
  if (a.fps.points.size() != b.fps.points.size() || a.fps.identity != b.fps.identity) k.push_back("fixed_point_count");
  else if (a.sig != b.sig && a.status == b.status && a.criterion == b.criterion) k.push_back("stability");
  return k;
}

std::string join_q(const ScanRow& r, bool stab) {
  std::string s;
  for (std::size_t i = 0; i < r.fps.points.size(); ++i) {
    if (i) s += ';';
    s += stab ? stability_name(r.fps.points[i].stability) : num(r.fps.points[i].q);
  }
  return s;
}

}  // namespace

Output scan(const std::string& family, const gwmm_options& opt) {
  if (family.find("{p}") == std::string::npos && family.find("{1-p}") == std::string::npos)
    fail(Errc::config, "scan: family must contain {p} or {1-p}");
  const double lo = opt.scan_lo, hi = opt.scan_hi;
  if (!(hi > lo)) fail(Errc::config, "scan: need lo < hi");
  int rows;
  double step;
  if (opt.scan_step > 0) {
    step = opt.scan_step;
    rows = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  } else {
    rows = opt.grid > 1 ? opt.grid : 41;
    step = (hi - lo) / (rows - 1);
  }
  if (rows > 100000) fail(Errc::config, "scan: more than 1e5 rows");
  const AnalysisOptions aopt;
  Output out;
  out.json = meta("scan", {{"family", family}}, opt);
  std::vector<ScanRow> grid;
  for (int i = 0; i < rows; ++i) {
    double p = lo + i * step;
    p = std::round(p * 1e12) / 1e12;
    grid.push_back(scan_row(family, p, aopt));
  }
  std::ostringstream os;
  os << preamble(out.json) << "p,status,n_fixed,fixed_points,stabilities,endpoint_criterion,p1_mu\n";
  json rj = json::array();
  for (auto& r : grid) {
    os << num(r.p) << ',' << r.status << ',' << (r.fps.identity ? -1 : static_cast<long>(r.fps.points.size())) << ','
       << join_q(r, false) << ',' << join_q(r, true) << ',' << r.criterion << ',' << num(r.p1mu) << '\n';
    json row = {{"p", r.p}, {"status", r.status}, {"identity", r.fps.identity}, {"criterion", r.criterion},
                {"p1_mu", jnum(r.p1mu)}};
    json pts = json::array();
    for (auto& f : r.fps.points) pts.push_back(fp_json(f));
    row["fixed_points"] = pts;
    if (!r.message.empty()) row["error"] = r.message;
    rj.push_back(row);
  }
  json trans = json::array();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (grid[i].sig == grid[i + 1].sig) continue;
    double a = grid[i].p, b = grid[i + 1].p;
    for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
      const double m = 0.5 * (a + b);
      if (scan_row(family, m, aopt).sig == grid[i].sig) a = m;
      else b = m;
    }
    trans.push_back({{"p_lo", a}, {"p_hi", b}, {"p", 0.5 * (a + b)}, {"kind", transition_kind(grid[i], grid[i + 1])},
                     {"from", grid[i].sig}, {"to", grid[i + 1].sig}});
  }
  out.json["rows"] = rj;
  out.json["transitions"] = trans;
  out.csv = os.str();
  return out;
}

Output simulate(const OffspringDistribution& d, const gwmm_options& opt) {
  SimConfig cfg;
  cfg.depth = opt.depth > 0 ? opt.depth : 4;
  cfg.boundary = boundary_of(opt);
  if (opt.has_x) cfg.x = opt.x;
  cfg.samples = opt.samples;
  cfg.seed = opt.seed;
  cfg.node_budget = opt.node_budget;
  cfg.threads = opt.threads;
  cfg.pruned = opt.pruned != 0;
  validate(cfg);

  Output out;
  out.json = meta("simulate", dist_target(d), opt);
  auto& j = out.json;
  j["depth"] = cfg.depth;
  j["boundary"] = boundary_name(cfg.boundary);
  j["truncation"] = d.truncation();
  std::ostringstream os;
  os << preamble(j);

  if (cfg.boundary == Boundary::bivariate) {
    auto r = simulate_bivariate(d, cfg);
    const double n = static_cast<double>(r.accepted);
    j["accepted"] = r.accepted;
    j["budget_exceeded"] = r.budget_exceeded;
    j["counts"] = {{"00", r.counts[0][0]}, {"01", r.counts[0][1]}, {"10", r.counts[1][0]}, {"11", r.counts[1][1]}};
    j["p10"] = r.p10();
    j["p01"] = r.p01();
    const double m1 = n > 0 ? (r.counts[1][0] + r.counts[1][1]) / n : 0;
    j["marginal_first_one"] = m1;
    j["marginal_expected"] = 1 - cfg.x;
    os << "outcome,count,fraction,predicted\n";
    double pred = std::numeric_limits<double>::quiet_NaN();
    if (cfg.depth % 2 == 0) {
      double b = cfg.x * (1 - cfg.x);
      for (int i = 0; i < cfg.depth / 2; ++i) b = h_map(d, cfg.x, b);
      pred = b;
      const double se = n > 0 ? std::sqrt(std::max(pred * (1 - pred), 1e-300) / n) : 0;
      j["p10_predicted"] = pred;
      j["p10_se"] = se;
      j["p10_z"] = se > 0 ? (r.p10() - pred) / se : 0.0;
      j["p10_pass"] = std::abs(r.p10() - pred) <= 3 * se;
    }
    const char* names[2][2] = {{"00", "01"}, {"10", "11"}};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        os << names[a][b] << ',' << r.counts[a][b] << ',' << num(n > 0 ? r.counts[a][b] / n : 0) << ',';
        if ((a != b) && !std::isnan(pred)) os << num(pred);
        os << '\n';
      }
    out.budget_dominant = 2 * r.budget_exceeded > cfg.samples;
    out.csv = os.str();
    return out;
  }

  auto r = simulate(d, cfg);
  j["accepted"] = r.values.size();
  j["budget_exceeded"] = r.budget_exceeded;
  j["nodes"] = r.nodes;
  out.budget_dominant = 2 * r.budget_exceeded > cfg.samples;
  if (r.values.empty()) {
    out.csv = os.str();
    return out;
  }
  EmpiricalCDF e(r.values);
  if (cfg.boundary == Boundary::bernoulli) {
    const double n = static_cast<double>(e.size());
    const double zero = e(0.5);
    const double pred = root_cdf(d, cfg.depth, cfg.x);
    const double se = std::sqrt(std::max(pred * (1 - pred), 1e-300) / n);
    j["p_zero"] = zero;
    j["p_zero_predicted"] = pred;
    j["p_zero_se"] = se;
    j["p_zero_pass"] = std::abs(zero - pred) <= 3 * se;
    os << "outcome,fraction,predicted\n0," << num(zero) << ',' << num(pred) << "\n1," << num(1 - zero) << ','
       << num(1 - pred) << '\n';
    out.csv = os.str();
    return out;
  }
  const int depth = cfg.depth;
  const double ks = ks_statistic(e, [&](double x) { return root_cdf(d, depth, x); });
  j["ks"] = {{"statistic", ks}, {"bound", ks_bound(e.size())}, {"pass", ks <= ks_bound(e.size())},
             {"reference", depth % 2 ? "G(f^(n-1)(x))" : "f^n(x)"}};
  j["quantiles"] = {{"0.1", e.quantile(0.1)}, {"0.5", e.quantile(0.5)}, {"0.9", e.quantile(0.9)}};
  auto fps = find_fixed_points(d);
  if (!fps.identity) {
    json atoms = json::array();
    const auto law = limit_law(fps);
    for (auto& a : law.atoms) {
      const double frac = e(a.location + 1e-3) - e(std::nextafter(a.location - 1e-3, -1.0));
      atoms.push_back({{"location", a.location}, {"mass", a.mass}, {"fraction_within_1e-3", frac},
                       {"se", std::sqrt(frac * (1 - frac) / e.size())}});
    }
    j["atoms"] = atoms;
  }
  os << "x,empirical,analytic\n";
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    os << num(x) << ',' << num(e(x)) << ',' << num(root_cdf(d, depth, x)) << '\n';
  }
  out.csv = os.str();
  return out;
}

namespace {

const FixedPointRecord& select_fixed_point(const FixedPointSet& fps, const gwmm_options& opt) {
  if (fps.identity) fail(Errc::domain, "f is the identity: the limit law is uniform and has no atoms");
  if (opt.has_q) {
    const FixedPointRecord* best = &fps.points.front();
    for (auto& r : fps.points)
      if (std::abs(r.q - opt.q) < std::abs(best->q - opt.q)) best = &r;
    return *best;
  }
  for (auto& r : fps.points)
    if (r.unstable() && r.q > 0 && r.q < 1) return r;
  for (auto& r : fps.points)
    if (r.unstable()) return r;
  fail(Errc::domain, "no unstable fixed point");
}

}  // namespace

Output scaling(const OffspringDistribution& d, const gwmm_options& opt) {
  auto fps = find_fixed_points(d);
  const auto& fp = select_fixed_point(fps, opt);
  Output out;
  out.json = meta("scaling", dist_target(d), opt);
  auto& j = out.json;
  j["fixed_point"] = fp_json(fp);
  std::ostringstream os;
  os << preamble(j);

  if (std::isinf(fp.xi)) {
    auto c = solve_case_c(d);
    j["case"] = "C";
    j["K"] = c.K;
    j["p_K"] = c.p_K;
    j["rho"] = c.rho;
    j["c"] = c.c;
    j["exponent"] = c.exponent;
    j["C0"] = c.C0;
    j["C1"] = c.C1;
    j["C1_identity_residual"] = std::abs(c.C1 - std::pow(c.C0, c.K) * std::pow(c.p_K, 1 - c.K * (1 - c.rho)));
    j["fit"] = {{"rms", c.fit_rms}, {"lo", c.fit_lo}, {"hi", c.fit_hi}};
    j["slope_at_0"] = endpoint_slope(d, true);
    j["slope_at_1"] = endpoint_slope(d, false);
    if (opt.depth > 0) {
      auto v = verify_case_c_scaling(d, c, opt.depth, opt.samples, opt.seed, opt.threads);
      json vj;
      vj["probs"] = v.probs;
      vj["truncation"] = v.truncation;
      vj["samples"] = v.samples;
      vj["consistent"] = v.consistent;
      os << "side,n,accepted,acceptance,floor_fraction,drift,analytic_drift";
      for (double p : v.probs) os << ",mc_" << num(p);
      for (double p : v.probs) os << ",exact_" << num(p);
      os << '\n';
      for (auto* side : {&v.at_zero, &v.at_one}) {
        json sj;
        sj["interval_end"] = side->interval_end;
        sj["stabilizes"] = side->stabilizes;
        sj["analytic_stabilizes"] = side->analytic_stabilizes;
        json levels = json::array();
        for (auto& l : side->levels) {
          levels.push_back({{"n", l.n}, {"accepted", l.accepted}, {"acceptance", l.acceptance},
                            {"quantiles", l.quantiles}, {"exact", l.analytic}, {"resolved", l.resolved},
                            {"floor_fraction", l.floor_fraction}, {"drift", l.drift},
                            {"analytic_drift", l.analytic_drift}, {"min_value", l.min_value}});
          os << num(side->boundary) << ',' << l.n << ',' << l.accepted << ',' << num(l.acceptance) << ','
             << num(l.floor_fraction) << ',' << num(l.drift) << ',' << num(l.analytic_drift);
          for (std::size_t i = 0; i < l.quantiles.size(); ++i)
            os << ',' << (l.resolved[i] ? num(l.quantiles[i]) : std::string());
          for (double q : l.analytic) os << ',' << num(q);
          os << '\n';
        }
        sj["levels"] = levels;
        vj[side == &v.at_zero ? "at_0" : "at_1"] = sj;
      }
      j["verification"] = vj;
    }
  } else if (std::abs(fp.xi - 1) <= 1e-9) {
    auto b = solve_case_b(d, fp);
    j["case"] = "B";
    j["k"] = b.k;
    j["derivative_k"] = b.derivative_k;
    j["a"] = b.a;
    j["a_conditioned"] = b.a / (fp.q_plus - fp.q_minus);
    j["mass_plus"] = b.mass_plus;
    j["mass_minus"] = b.mass_minus;
    os << "q,k,derivative_k,a,mass_plus,mass_minus\n"
       << num(b.q) << ',' << b.k << ',' << num(b.derivative_k) << ',' << num(b.a) << ',' << num(b.mass_plus) << ','
       << num(b.mass_minus) << '\n';
  } else if (fp.xi > 1) {
    CaseAOptions aopt;
    aopt.precision = precision_of(opt);
    aopt.threads = opt.threads;
    auto a = solve_case_a(d, fp, case_a_grid(opt.grid > 0 ? opt.grid : 200), aopt);
    j["case"] = "A";
    j["xi"] = a.xi;
    j["q_tilde"] = a.q_tilde;
    j["scale"] = a.scale;
    j["max_residual"] = a.max_residual;
    j["monotone_tail"] = a.monotone_tail;
    bool mono = true;
    for (std::size_t i = 1; i < a.F.size(); ++i) mono = mono && a.F[i] >= a.F[i - 1];
    j["table_monotone"] = mono;
    j["F_first"] = a.F.front();
    j["F_last"] = a.F.back();
    j["points"] = a.x.size();
    os << "x,F,iterations\n";
    for (std::size_t i = 0; i < a.x.size(); ++i) os << num(a.x[i]) << ',' << num(a.F[i]) << ',' << a.iterations[i] << '\n';
  } else {
    fail(Errc::domain, "selected fixed point is stable (xi < 1): no atom to rescale");
  }
  out.csv = os.str();
  return out;
}

Output endogeny(const OffspringDistribution& d, const gwmm_options& opt) {
  double x;
  if (opt.has_x) {
    x = opt.x;
  } else {
    auto fps = find_fixed_points(d);
    if (fps.identity) {
      x = 0.5;
    } else {
      x = std::numeric_limits<double>::quiet_NaN();
      for (auto& r : fps.points)
        if (r.q > 0 && r.q < 1) {
          x = r.q;
          break;
        }
      if (std::isnan(x)) fail(Errc::domain, "no interior fixed point; pass x explicitly");
    }
  }
  auto rep = decide_endogeny(d, x);
  Output out;
  out.json = meta("endogeny", dist_target(d), opt);
  auto& j = out.json;
  j["x"] = rep.x;
  j["f_prime"] = jnum(rep.f_prime);
  j["verdict"] = verdict_name(rep.verdict);
  j["b_star"] = rep.b_star;
  j["trivial"] = rep.trivial;
  j["used_bisection"] = rep.used_bisection;
  json it = json::array();
  for (auto [n, b] : rep.iterates) it.push_back({n, b});
  j["iterates"] = it;

  if (opt.depth > 0 && !rep.trivial) {
    SimConfig cfg;
    cfg.depth = opt.depth;
    cfg.boundary = Boundary::bivariate;
    cfg.x = x;
    cfg.samples = opt.samples;
    cfg.seed = opt.seed;
    cfg.node_budget = opt.node_budget;
    cfg.threads = opt.threads;
    validate(cfg);
    if (cfg.depth % 2) fail(Errc::config, "endogeny Monte Carlo check needs an even depth");
    auto r = simulate_bivariate(d, cfg);
    double b = x * (1 - x);
    for (int i = 0; i < cfg.depth / 2; ++i) b = h_map(d, x, b);
    const double se = std::sqrt(std::max(b * (1 - b), 1e-300) / std::max<std::size_t>(r.accepted, 1));
    j["monte_carlo"] = {{"depth", cfg.depth}, {"accepted", r.accepted}, {"p10", r.p10()}, {"p01", r.p01()},
                        {"predicted", b}, {"se", se}, {"pass", std::abs(r.p10() - b) <= 3 * se}};
  }

  std::ostringstream os;
  os << preamble(j) << "b,h_minus_b\n";
  if (!rep.trivial) {
    const double bmax = std::min(x, 1 - x);
    for (int i = 0; i <= 100; ++i) {
      const double b = bmax * i / 100.0;
      os << num(b) << ',' << num(h_map(d, x, b) - b) << '\n';
    }
  }
  out.csv = os.str();
  return out;
}

}  // namespace gwmm::cmd
