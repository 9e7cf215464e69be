#include <cctype>
#include <charconv>
#include <json.hpp>
#include <string_view>

#include "gwmm/distribution.hpp"

namespace gwmm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view s, const std::string& ctx) {
  s = trim(s);
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    fail(Errc::config, ctx + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

long to_long(std::string_view s, const std::string& ctx) {
  s = trim(s);
  // accept 1e6-style integers
  double v = to_double(s, ctx);
  if (v != static_cast<double>(static_cast<long>(v)))
    fail(Errc::config, ctx + ": expected an integer, got '" + std::string(s) + "'");
  return static_cast<long>(v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

OffspringDistribution parse_distribution(const std::string& spec) {
  std::string_view s = trim(spec);
  if (!s.empty() && s.front() == '{') return distribution_from_json(std::string(s));
  auto colon = s.find(':');
  if (colon == std::string_view::npos) fail(Errc::config, "distribution spec needs 'kind:params': " + spec);
  std::string kind(trim(s.substr(0, colon)));
  std::string_view rest = trim(s.substr(colon + 1));
  const std::string ctx = "distribution '" + spec + "'";
  if (kind == "finite") {
    std::map<long, double> table;
    for (auto item : split(rest, ',')) {
      auto eq = item.find('=');
      if (eq == std::string_view::npos) fail(Errc::config, ctx + ": finite entries are k=p");
      long k = to_long(item.substr(0, eq), ctx);
      if (table.count(k)) fail(Errc::config, ctx + ": duplicate offspring count");
      table[k] = to_double(item.substr(eq + 1), ctx);
    }
    return OffspringDistribution::finite(table);
  }
  if (kind == "geometric") return OffspringDistribution::geometric(to_double(rest, ctx));
  if (kind == "regular") return OffspringDistribution::regular(static_cast<int>(to_long(rest, ctx)));
  if (kind == "invb") return OffspringDistribution::involution_b(static_cast<int>(to_long(rest, ctx)));
  if (kind == "invc") return OffspringDistribution::involution_c(static_cast<int>(to_long(rest, ctx)));
  if (kind == "powerlaw") {
    auto parts = split(rest, ',');
    if (parts.size() > 2) fail(Errc::config, ctx + ": powerlaw takes alpha[,N]");
    double alpha = to_double(parts[0], ctx);
    long n = parts.size() == 2 ? to_long(parts[1], ctx) : 1000000;
    return OffspringDistribution::power_law(alpha, n);
  }
  fail(Errc::config, ctx + ": unknown kind '" + kind + "'");
}

OffspringDistribution distribution_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::config, std::string("distribution JSON: ") + e.what());
  }
  if (j.contains("dist") && !j.contains("kind")) j = j["dist"];
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite") {
      std::map<long, double> table;
      for (auto& [k, v] : j.at("masses").items()) table[to_long(k, "distribution JSON")] = v.get<double>();
      return OffspringDistribution::finite(table);
    }
    if (kind == "geometric") return OffspringDistribution::geometric(j.at("p").get<double>());
    if (kind == "regular") return OffspringDistribution::regular(j.at("d").get<int>());
    if (kind == "invb") return OffspringDistribution::involution_b(j.at("n").get<int>());
    if (kind == "invc") return OffspringDistribution::involution_c(j.at("n").get<int>());
    if (kind == "powerlaw")
      return OffspringDistribution::power_law(j.at("alpha").get<double>(), j.value("N", 1000000L));
    fail(Errc::config, "distribution JSON: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config, std::string("distribution JSON: ") + e.what());
  }
}

std::string distribution_to_json(const OffspringDistribution& d) {
  nlohmann::json j;
  j["kind"] = kind_name(d.kind());
  switch (d.kind()) {
    case Kind::finite: {
      nlohmann::json m = nlohmann::json::object();
      for (auto [k, p] : d.table()) m[std::to_string(k)] = p;
      j["masses"] = m;
      break;
    }
    case Kind::geometric: j["p"] = d.parameter(); break;
    case Kind::regular: j["d"] = static_cast<int>(d.parameter()); break;
    case Kind::involution_b:
    case Kind::involution_c: j["n"] = static_cast<int>(d.parameter()); break;
    case Kind::power_law:
      j["alpha"] = d.parameter();
      j["N"] = d.truncation();
      break;
  }
  return j.dump();
}

std::string instantiate_family(const std::string& tmpl, double p) {
  char buf[64];
  auto put = [&](double v) {
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  std::string out;
  std::size_t i = 0;
  bool used = false;
  while (i < tmpl.size()) {
    if (tmpl.compare(i, 3, "{p}") == 0) {
      out += put(p);
      i += 3;
      used = true;
    } else if (tmpl.compare(i, 5, "{1-p}") == 0) {
      out += put(1 - p);
      i += 5;
      used = true;
    } else {
      out += tmpl[i++];
    }
  }
  if (!used) fail(Errc::config, "family template has no {p} placeholder: " + tmpl);
  return out;
}

}  // namespace gwmm
