#include "movsph/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "movsph/errors.hpp"

namespace movsph::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("expected a number, got '" + v + "'", line);
  return out;
}

long long to_int(const std::string& v, int line) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'", line);
  return out;
}

std::size_t to_count(const std::string& v, int line) {
  const long long x = to_int(v, line);
  if (x < 0) throw ConfigError("expected a nonnegative integer, got '" + v + "'", line);
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + v + "'", line);
}

double positive(double x, const char* key, int line) {
  if (!(x > 0.0)) throw ConfigError(std::string(key) + " must be positive", line);
  return x;
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](RunConfig& c, const std::string& v, int l) { c.seed = static_cast<std::uint64_t>(to_int(v, l)); }},
      {"output.dir", [](RunConfig& c, const std::string& v, int) { c.output_dir = v; }},
      {"problem.n",
       [](RunConfig& c, const std::string& v, int l) {
         const long long n = to_int(v, l);
         if (n < 2 || n > 15) throw ConfigError("problem.n must lie in [2, 15]", l);
         c.problem.n = static_cast<int>(n);
       }},
      {"problem.p", [](RunConfig& c, const std::string& v, int l) { c.problem.p = positive(to_double(v, l), "problem.p", l); }},
      {"problem.family",
       [](RunConfig& c, const std::string& v, int l) {
         if (v != "hyder_ngo" && v != "pure_power") throw ConfigError("unknown family '" + v + "'", l);
         c.problem.family = v;
       }},
      {"problem.epsilon",
       [](RunConfig& c, const std::string& v, int l) {
         c.problem.epsilon = to_double(v, l);
         if (c.problem.epsilon < 0.0) throw ConfigError("problem.epsilon must be >= 0", l);
       }},
      {"problem.q", [](RunConfig& c, const std::string& v, int l) { c.problem.q = positive(to_double(v, l), "problem.q", l); }},
      {"problem.kappa", [](RunConfig& c, const std::string& v, int l) { c.problem.kappa = to_double(v, l); }},
      {"problem.weight_exponent",
       [](RunConfig& c, const std::string& v, int l) { c.problem.weight_exponent = to_double(v, l); }},
      {"grid.r_min", [](RunConfig& c, const std::string& v, int l) { c.grid.r_min = positive(to_double(v, l), "grid.r_min", l); }},
      {"grid.r_max", [](RunConfig& c, const std::string& v, int l) { c.grid.r_max = positive(to_double(v, l), "grid.r_max", l); }},
      {"grid.nodes", [](RunConfig& c, const std::string& v, int l) { c.grid.nodes = to_count(v, l); }},
      {"grid.panel_order", [](RunConfig& c, const std::string& v, int l) { c.grid.panel_order = to_count(v, l); }},
      {"solve.damping",
       [](RunConfig& c, const std::string& v, int l) {
         const double d = to_double(v, l);
         if (!(d > 0.0 && d <= 1.0)) throw ConfigError("solve.damping must lie in (0, 1]", l);
         c.solve.damping = d;
       }},
      {"solve.tol", [](RunConfig& c, const std::string& v, int l) { c.solve.tol = positive(to_double(v, l), "solve.tol", l); }},
      {"solve.max_iter",
       [](RunConfig& c, const std::string& v, int l) { c.solve.max_iter = static_cast<int>(to_count(v, l)); }},
      {"solve.divergence_window",
       [](RunConfig& c, const std::string& v, int l) { c.solve.divergence_window = static_cast<int>(to_count(v, l)); }},
      {"solve.init",
       [](RunConfig& c, const std::string& v, int l) {
         if (v == "constant") c.solve.init = InitKind::Constant;
         else if (v == "bubble") c.solve.init = InitKind::Bubble;
         else throw ConfigError("solve.init must be constant or bubble", l);
       }},
      {"solve.init_value",
       [](RunConfig& c, const std::string& v, int l) { c.solve.init_value = positive(to_double(v, l), "solve.init_value", l); }},
      {"verify.solution", [](RunConfig& c, const std::string& v, int) { c.solution_path = v; }},
      {"verify.x_samples", [](RunConfig& c, const std::string& v, int l) { c.verify.x_samples = to_count(v, l); }},
      {"verify.x_min", [](RunConfig& c, const std::string& v, int l) { c.verify.x_min = positive(to_double(v, l), "verify.x_min", l); }},
      {"verify.x_max", [](RunConfig& c, const std::string& v, int l) { c.verify.x_max = positive(to_double(v, l), "verify.x_max", l); }},
      {"verify.shells", [](RunConfig& c, const std::string& v, int l) { c.verify.shells = to_count(v, l); }},
      {"verify.ratio_max",
       [](RunConfig& c, const std::string& v, int l) { c.verify.ratio_max = positive(to_double(v, l), "verify.ratio_max", l); }},
      {"verify.extra_directions", [](RunConfig& c, const std::string& v, int l) { c.verify.extra_directions = to_count(v, l); }},
      {"verify.slack", [](RunConfig& c, const std::string& v, int l) { c.verify.slack = positive(to_double(v, l), "verify.slack", l); }},
      {"verify.resolution_rel",
       [](RunConfig& c, const std::string& v, int l) {
         c.verify.resolution_rel = positive(to_double(v, l), "verify.resolution_rel", l);
       }},
      {"verify.horizon_rel",
       [](RunConfig& c, const std::string& v, int l) { c.verify.horizon_rel = positive(to_double(v, l), "verify.horizon_rel", l); }},
      {"verify.rel_tol", [](RunConfig& c, const std::string& v, int l) { c.verify.rel_tol = positive(to_double(v, l), "verify.rel_tol", l); }},
      {"verify.min_probes", [](RunConfig& c, const std::string& v, int l) { c.verify.min_probes = to_count(v, l); }},
      {"verify.symmetry_tol",
       [](RunConfig& c, const std::string& v, int l) { c.verify.symmetry_tol = positive(to_double(v, l), "verify.symmetry_tol", l); }},
      {"verify.lambda_one",
       [](RunConfig& c, const std::string& v, int l) { c.verify.lambda_one = positive(to_double(v, l), "verify.lambda_one", l); }},
      {"checkf.count", [](RunConfig& c, const std::string& v, int l) { c.checkf.count = to_count(v, l); }},
      {"checkf.directed", [](RunConfig& c, const std::string& v, int l) { c.checkf.directed = to_bool(v, l); }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line);
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line);
    if (const auto prev = seen.find(key); prev != seen.end())
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")", line);
    seen[key] = line;
    it->second(cfg, value, line);
  }
  if (cfg.grid.r_max <= cfg.grid.r_min) throw ConfigError("grid.r_max must exceed grid.r_min", line);
  if (cfg.verify.x_max < cfg.verify.x_min) throw ConfigError("verify.x_max must be >= verify.x_min", line);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Nonlinearity make_nonlinearity(const ProblemConfig& problem) {
  if (problem.family == "pure_power")
    return Nonlinearity(PurePower{problem.kappa, problem.weight_exponent}, problem.p, problem.n);
  return Nonlinearity(HyderNgo{problem.epsilon, problem.q}, problem.p, problem.n);
}

}  // namespace movsph::cli
