#include "movsph/cli/run.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "movsph/cli/config.hpp"
#include "movsph/cli/io.hpp"
#include "movsph/errors.hpp"
#include "movsph/gjms.hpp"
#include "movsph/moving_spheres.hpp"
#include "movsph/rng.hpp"

namespace movsph::cli {

namespace {

using nlohmann::json;

struct GlobalFlags {
  std::string config;
  std::string out;
  std::string solution;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  double s = 0.0;
  int n = 0;
  long L = -1;
};

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const Point& p) {
  json a = json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

json to_json(const Witness& w) {
  return {{"kind", w.kind}, {"y", to_json(w.y)}, {"reference", to_json(w.reference)},
          {"lhs", w.lhs},   {"rhs", w.rhs},      {"lambda", w.lambda}};
}

json to_json(const ConditionSample& s) {
  return {{"x", to_json(s.x)}, {"lambda", s.lambda}, {"z", to_json(s.z)}, {"a", s.a}, {"b", s.b}};
}

json envelope(const std::string& command) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"generated_at", utc_timestamp()}};
}

RunConfig load_with_overrides(const GlobalFlags& flags) {
  if (flags.config.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_config(flags.config);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  if (flags.seed_set) cfg.seed = flags.seed;
  if (!flags.solution.empty()) cfg.solution_path = flags.solution;
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

int cmd_solve(const GlobalFlags& flags, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(flags);
  const Nonlinearity f = make_nonlinearity(cfg.problem);
  GridParams gp = cfg.grid;
  gp.n = cfg.problem.n;
  const RadialGrid grid = RadialGrid::geometric(gp);

  json report = envelope("solve");
  report["problem"] = {{"n", cfg.problem.n}, {"p", cfg.problem.p}, {"f", f.describe()}};
  report["outside_stated_range"] = cfg.problem.n < 3;
  try {
    const Solution sol = picard_solve(f, grid, cfg.solve);
    const auto& d = sol.diagnostics;
    report["converged"] = true;
    report["iterations"] = d.iterations;
    report["final_residual"] = d.final_residual;
    report["residual_history"] = d.residual_history;
    report["integrable"] = d.integrable;
    report["integrability_value"] = d.integrability_value;
    report["integral_f"] = d.integral_f;
    report["growth_probe_radius"] = d.growth_probe_radius;
    report["growth_ratio_error"] = d.growth_ratio_error;
    write_atomic(cfg.output_dir / "solution.csv", solution_csv(sol.field, cfg.problem.p));
    write_atomic(cfg.output_dir / "diagnostics.json", report.dump(2) + "\n");
    out << "solve: converged in " << d.iterations << " iterations, residual " << d.final_residual << "\n";
    return kPass;
  } catch (const SolverError& e) {
    report["converged"] = false;
    report["reason"] = to_string(e.reason());
    report["message"] = e.what();
    report["residual_history"] = e.residual_history();
    write_atomic(cfg.output_dir / "diagnostics.json", report.dump(2) + "\n");
    out << "solve: " << to_string(e.reason()) << ": " << e.what() << "\n";
    return kDiverged;
  } catch (const RangeError& e) {
    report["converged"] = false;
    report["reason"] = to_string(SolverError::Reason::NonFinite);
    report["message"] = e.what();
    write_atomic(cfg.output_dir / "diagnostics.json", report.dump(2) + "\n");
    out << "solve: non_finite: " << e.what() << "\n";
    return kDiverged;
  }
}

int cmd_verify(const GlobalFlags& flags, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(flags);
  const std::filesystem::path sol_path =
      cfg.solution_path.empty() ? cfg.output_dir / "solution.csv" : cfg.solution_path;
  const LoadedSolution sol = read_solution_csv(sol_path);
  const std::size_t n = static_cast<std::size_t>(sol.field.dim());
  const double p = sol.p;
  const ScalarField u = as_field(sol.field);

  LambdaBarOptions lopts;
  lopts.probes = ProbeConfig{cfg.verify.shells, cfg.verify.ratio_max, cfg.verify.extra_directions, cfg.seed};
  lopts.slack = cfg.verify.slack;
  lopts.resolution_rel = cfg.verify.resolution_rel;
  lopts.horizon_rel = cfg.verify.horizon_rel;
  const std::size_t probes_per_lambda = cfg.verify.shells * (design_directions(n).size() + cfg.verify.extra_directions);

  json report = envelope("verify");
  report["solution"] = sol_path.string();
  report["n"] = n;
  report["p"] = p;
  report["outside_stated_range"] = n < 3;
  report["probes_per_lambda"] = probes_per_lambda;
  report["min_probes"] = cfg.verify.min_probes;

  const auto finish = [&](Verdict v, const std::optional<Witness>& w, std::string csv) {
    report["verdict"] = to_string(v);
    if (w) report["witness"] = to_json(*w);
    write_atomic(cfg.output_dir / "verify_report.json", report.dump(2) + "\n");
    if (!csv.empty()) write_atomic(cfg.output_dir / "min_gap.csv", csv);
    out << "verify: " << to_string(v) << "\n";
    if (w) out << "witness: " << to_json(*w).dump() << "\n";
    return v == Verdict::SymmetryCertified ? kPass : v == Verdict::ViolationFound ? kViolation : kInconclusive;
  };

  if (probes_per_lambda < cfg.verify.min_probes || cfg.verify.x_samples == 0)
    return finish(Verdict::Inconclusive, std::nullopt, {});

  std::ostringstream csv;
  csv << "# per-lambda minimum of (u_{x,lambda}(y) - u(y)) / u(y) over the probe set\nx_index,lambda,min_gap\n";
  Rng rng = make_stream(cfg.seed, 1);
  json points = json::array();
  std::optional<Witness> first_witness;
  bool violation = false;
  std::optional<Point> first_x;
  for (std::size_t k = 0; k < cfg.verify.x_samples; ++k) {
    const double radius = cfg.verify.x_min == cfg.verify.x_max ? cfg.verify.x_min
                                                                 : log_uniform(rng, cfg.verify.x_min, cfg.verify.x_max);
    const Point x = random_direction(rng, n) * radius;
    if (!first_x) first_x = x;
    const MovingSphereReport r = moving_sphere_scan(u, x, p, lopts, cfg.verify.rel_tol);
    json entry = {{"x", to_json(x)},
                  {"abs_x", radius},
                  {"lambda_bar", r.lambda_bar_est},
                  {"status", to_string(r.status)},
                  {"verdict", to_string(r.verdict)}};
    if (r.witness) entry["witness"] = to_json(*r.witness);
    points.push_back(entry);
    for (std::size_t i = 0; i < r.lambda_values.size(); ++i) {
      char line[96];
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", k, r.lambda_values[i], r.min_gap[i]);
      csv << line;
    }
    if (r.verdict == Verdict::ViolationFound) {
      violation = true;
      if (!first_witness) first_witness = r.witness;
    }
  }
  report["points"] = points;

  SymmetryOptions sopts;
  sopts.tol = cfg.verify.symmetry_tol;
  sopts.r_min = cfg.verify.x_min;
  sopts.r_max = cfg.verify.x_max;
  sopts.shells = cfg.verify.shells;
  sopts.extra_directions = cfg.verify.extra_directions;
  sopts.seed = cfg.seed;
  sopts.min_probes = cfg.verify.min_probes;
  const SymmetryReport sym = symmetry_verdict(u, n, sopts);
  report["symmetry"] = {{"verdict", to_string(sym.verdict)},
                        {"probes", sym.probes},
                        {"max_reflection_excess", sym.max_reflection_excess},
                        {"max_ray_drop", sym.max_ray_drop}};
  if (sym.witness) report["symmetry"]["witness"] = to_json(*sym.witness);

  const Point theta = -(*first_x);
  const MonotonicityReport mono = small_lambda_monotonicity(u, *first_x, p, theta, cfg.verify.lambda_one);
  report["small_radius_monotonicity"] = {{"x", to_json(*first_x)},
                                         {"grad_log_sup", mono.grad_log_sup},
                                         {"interval_end", mono.interval_end},
                                         {"decreasing", mono.decreasing},
                                         {"max_increase", mono.max_increase},
                                         {"inconclusive", mono.inconclusive}};

  if (violation) return finish(Verdict::ViolationFound, first_witness, csv.str());
  if (sym.verdict == Verdict::ViolationFound) return finish(Verdict::ViolationFound, sym.witness, csv.str());
  if (sym.verdict == Verdict::Inconclusive) return finish(Verdict::Inconclusive, std::nullopt, csv.str());
  return finish(Verdict::SymmetryCertified, std::nullopt, csv.str());
}

int cmd_checkf(const GlobalFlags& flags, std::ostream& out) {
  const RunConfig cfg = load_with_overrides(flags);
  if (cfg.checkf.count == 0) throw ConfigError("checkf.count must be positive");
  const Nonlinearity f = make_nonlinearity(cfg.problem);
  CheckOptions opts;
  opts.seed = cfg.seed;
  const ConditionReport rep = check_condition_F1(f, default_condition_sampler(cfg.problem.n), cfg.checkf.count, opts);

  json report = envelope("checkf");
  report["f"] = f.describe();
  report["n"] = cfg.problem.n;
  report["p"] = cfg.problem.p;
  const auto summarize = [](const ConditionReport& r) {
    json j = {{"samples_tested", r.samples_tested},
              {"rejected", r.rejected},
              {"violation_count", r.violation_count},
              {"min_margin", r.min_margin},
              {"ratio_test_checked", r.ratio_test_checked},
              {"ratio_test_disagreements", r.ratio_test_disagreements}};
    json v = json::array();
    for (const auto& viol : r.violations)
      v.push_back({{"sample", to_json(viol.sample)}, {"lhs", viol.lhs}, {"rhs", viol.rhs}, {"margin", viol.margin}});
    j["violations"] = v;
    if (r.worst) j["worst"] = to_json(*r.worst);
    return j;
  };
  report["random"] = summarize(rep);
  std::size_t total = rep.violation_count;
  if (cfg.checkf.directed) {
    const ConditionReport dir = directed_condition_search(f);
    report["directed"] = summarize(dir);
    total += dir.violation_count;
  }
  report["holds"] = total == 0;
  write_atomic(cfg.output_dir / "checkf_report.json", report.dump(2) + "\n");
  out << "checkf: " << (total == 0 ? "no violations" : std::to_string(total) + " violations") << " ("
      << rep.samples_tested << " random samples)\n";
  return total == 0 ? kPass : kViolation;
}

int cmd_gjms(const GlobalFlags& flags, std::ostream& out) {
  if (flags.L < 0) throw ConfigError("--L must be >= 0");
  if (!(flags.s > 0.0)) throw ConfigError("--s must be positive");
  if (flags.n < 1) throw ConfigError("--n must be >= 1");
  const MultiplierTable table(flags.s, flags.n, flags.L);
  std::ostringstream csv;
  csv << "# GJMS multipliers Gamma(l+n/2+s)/Gamma(l+n/2-s), s=" << flags.s << " n=" << flags.n << "\nl,alpha\n";
  for (long l = 0; l <= table.max_degree(); ++l) {
    char line[64];
    std::snprintf(line, sizeof line, "%ld,%.17g\n", l, table[l]);
    csv << line;
  }
  out << csv.str();
  if (!flags.out.empty()) {
    std::filesystem::create_directories(flags.out);
    write_atomic(std::filesystem::path(flags.out) / "gjms.csv", csv.str());
  }
  return kPass;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moving-spheres toolkit for Riesz-type integral equations"};
  app.require_subcommand(1);
  GlobalFlags flags;
  auto* seed_opt = app.add_option("--seed", flags.seed, "RNG seed (overrides config)");
  app.add_option("--config", flags.config, "configuration file");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--threads", flags.threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);

  auto* solve = app.add_subcommand("solve", "solve the integral equation by damped Picard iteration");
  auto* verify = app.add_subcommand("verify", "run the moving-sphere certifier on a solution CSV");
  verify->add_option("--solution", flags.solution, "solution CSV (default <out>/solution.csv)");
  auto* checkf = app.add_subcommand("checkf", "sample the moving-sphere condition on f");
  auto* gjms = app.add_subcommand("gjms", "print the GJMS multiplier table");
  gjms->add_option("--s", flags.s, "order parameter s")->required();
  gjms->add_option("--n", flags.n, "sphere dimension n")->required();
  gjms->add_option("--L", flags.L, "largest degree")->required();
  for (auto* sub : {solve, verify, checkf, gjms}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }
  flags.seed_set = seed_opt->count() > 0;
  if (flags.threads > 0) omp_set_num_threads(flags.threads);

  try {
    if (*solve) return cmd_solve(flags, out);
    if (*verify) return cmd_verify(flags, out);
    if (*checkf) return cmd_checkf(flags, out);
    return cmd_gjms(flags, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace movsph::cli
