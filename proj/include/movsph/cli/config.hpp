#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "movsph/nonlinearity.hpp"
#include "movsph/quadrature.hpp"
#include "movsph/solver.hpp"

namespace movsph::cli {

struct ProblemConfig {
  int n = 3;
  double p = 2.0;
  std::string family = "hyder_ngo";  ///< hyder_ngo | pure_power
  double epsilon = 0.0;
  double q = 2.0;
  double kappa = -1.0;
  double weight_exponent = 0.0;
};

struct VerifyConfig {
  std::size_t x_samples = 20;
  double x_min = 0.1;
  double x_max = 10.0;
  std::size_t shells = 24;
  double ratio_max = 1e3;
  std::size_t extra_directions = 0;
  double slack = 1e-8;
  double resolution_rel = 1e-4;
  double horizon_rel = 1e2;
  double rel_tol = 1e-3;
  std::size_t min_probes = 64;
  double symmetry_tol = 1e-6;
  double lambda_one = 1.0;  ///< cap on the small-radius interval of the monotonicity probe
};

struct CheckfConfig {
  std::size_t count = 100000;
  bool directed = true;
};

struct RunConfig {
  ProblemConfig problem;
  GridParams grid;
  SolveConfig solve;
  VerifyConfig verify;
  CheckfConfig checkf;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";
  std::filesystem::path solution_path;  ///< verify input; defaults to <output_dir>/solution.csv
};

/// Parses flat `section.key = value` text. Blank lines and lines starting
/// with '#' are ignored. Errors are ConfigError carrying the line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

Nonlinearity make_nonlinearity(const ProblemConfig& problem);

}  // namespace movsph::cli
