#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "movsph/nonlinearity.hpp"
#include "movsph/quadrature.hpp"

namespace movsph {

enum class InitKind { Constant, Bubble, FromValues };

struct SolveConfig {
  double damping = 0.5;  ///< theta in u <- (1 - theta) u + theta T(u)
  double tol = 1e-10;    ///< relative sup-norm residual target
  int max_iter = 500;
  int divergence_window = 10;  ///< consecutive residual increases that count as divergence
  InitKind init = InitKind::Constant;
  double init_value = 1.0;         ///< constant value, or bubble amplitude c in c (1 + r^2)^{p/2}
  std::vector<double> init_values; ///< FromValues: one value per grid node
};

struct SolveDiagnostics {
  int iterations = 0;
  double final_residual = 0.0;  ///< max_i |u_i - T(u)_i| / u_i
  double integrability_value = 0.0;
  bool integrable = true;
  double integral_f = 0.0;       ///< int f(|z|, u(z)) dz
  double growth_probe_radius = 0.0;
  double growth_ratio_error = 0.0;  ///< |T(u)(rho*) rho*^{-p} / int f - 1|
  std::vector<double> residual_history;
};

struct Solution {
  RadialField field;
  SolveDiagnostics diagnostics;
};

/// Thrown when the Picard iteration fails; carries the iterate history and
/// the last iterate so callers can still report on it.
class SolverError : public std::runtime_error {
 public:
  enum class Reason { Diverged, MaxIterations, NonIntegrable, NonFinite };

  SolverError(Reason reason, const std::string& msg, std::vector<double> history, std::vector<double> last)
      : std::runtime_error(msg), reason_(reason), history_(std::move(history)), last_(std::move(last)) {}

  Reason reason() const noexcept { return reason_; }
  const std::vector<double>& residual_history() const noexcept { return history_; }
  const std::vector<double>& last_iterate() const noexcept { return last_; }

 private:
  Reason reason_;
  std::vector<double> history_;
  std::vector<double> last_;
};

const char* to_string(SolverError::Reason r) noexcept;

/// max_i |a_i - b_i| / |ref_i|.
double sup_relative_difference(std::span<const double> a, std::span<const double> b, std::span<const double> ref);

/// ||u - T(u)||_sup-rel over the grid nodes.
double residual(std::span<const double> u, const Nonlinearity& f, const IntegralOperator& op);

/// Initial iterate on the grid for `cfg`.
std::vector<double> initial_iterate(const RadialGrid& grid, double p, const SolveConfig& cfg);

/// Damped Picard iteration for u = T(u) on radial fields.
Solution picard_solve(const Nonlinearity& f, const IntegralOperator& op, const SolveConfig& cfg);
Solution picard_solve(const Nonlinearity& f, const RadialGrid& grid, const SolveConfig& cfg,
                      const OperatorOptions& opts = {});

/// Fills the integrability and growth fields of `diag` for the field `u`.
void compute_growth_diagnostics(const Nonlinearity& f, const IntegralOperator& op, std::span<const double> u,
                                SolveDiagnostics& diag);

}  // namespace movsph
