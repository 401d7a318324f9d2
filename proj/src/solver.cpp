#include "movsph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "movsph/errors.hpp"

namespace movsph {

const char* to_string(SolverError::Reason r) noexcept {
  switch (r) {
    case SolverError::Reason::Diverged: return "diverged";
    case SolverError::Reason::MaxIterations: return "max_iterations";
    case SolverError::Reason::NonIntegrable: return "non_integrable";
    case SolverError::Reason::NonFinite: return "non_finite";
  }
  return "unknown";
}

double sup_relative_difference(std::span<const double> a, std::span<const double> b, std::span<const double> ref) {
  if (a.size() != b.size() || a.size() != ref.size()) throw DomainError("sup_relative_difference: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::abs(ref[i]));
  return m;
}

double residual(std::span<const double> u, const Nonlinearity& f, const IntegralOperator& op) {
  const auto tu = op.apply(f, u);
  return sup_relative_difference(u, tu.values, u);
}

std::vector<double> initial_iterate(const RadialGrid& grid, double p, const SolveConfig& cfg) {
  const auto& r = grid.nodes();
  std::vector<double> u(r.size());
  switch (cfg.init) {
    case InitKind::Constant:
      if (!(cfg.init_value > 0.0)) throw DomainError("solve: constant init must be positive");
      std::fill(u.begin(), u.end(), cfg.init_value);
      break;
    case InitKind::Bubble:
      if (!(cfg.init_value > 0.0)) throw DomainError("solve: bubble amplitude must be positive");
      for (std::size_t i = 0; i < r.size(); ++i) u[i] = cfg.init_value * std::pow(1.0 + r[i] * r[i], 0.5 * p);
      break;
    case InitKind::FromValues:
      if (cfg.init_values.size() != r.size()) throw DomainError("solve: initial values do not match the grid");
      u = cfg.init_values;
      for (double v : u)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("solve: initial values must be positive");
      break;
  }
  return u;
}

void compute_growth_diagnostics(const Nonlinearity& f, const IntegralOperator& op, std::span<const double> u,
                                SolveDiagnostics& diag) {
  const RadialGrid& grid = op.grid();
  const IntegralEstimate integ = integrability_check(grid, u, f);
  diag.integrability_value = integ.value;
  diag.integrable = integ.convergent && std::isfinite(integ.value);

  const auto source = op.source_values(f, u);
  const IntegralEstimate mass = radial_moment(grid, source, 0.0);
  diag.integral_f = mass.value;
  diag.growth_probe_radius = 1e3 * grid.r_max();
  const double probe[] = {diag.growth_probe_radius};
  const auto far = op.apply_source_at(source, probe);
  diag.growth_ratio_error =
      std::abs(far.values[0] * std::pow(diag.growth_probe_radius, -f.p()) / diag.integral_f - 1.0);
}

Solution picard_solve(const Nonlinearity& f, const IntegralOperator& op, const SolveConfig& cfg) {
  if (!(cfg.damping > 0.0) || !(cfg.damping <= 1.0)) throw DomainError("solve: damping must lie in (0, 1]");
  if (!(cfg.tol > 0.0)) throw DomainError("solve: tol must be positive");
  if (cfg.max_iter < 1) throw DomainError("solve: max_iter must be >= 1");
  if (f.n() != op.grid().dim()) throw DomainError("solve: dimension mismatch between f and grid");
  if (f.p() != op.p()) throw DomainError("solve: p mismatch between f and operator");

  const double theta = cfg.damping;
  std::vector<double> u = initial_iterate(op.grid(), f.p(), cfg);
  std::vector<double> history;
  int rising = 0;
  double res = 0.0;
  bool converged = false;
  int it = 0;

  for (it = 1; it <= cfg.max_iter; ++it) {
    const OperatorOutput tu = op.apply(f, u);
    res = sup_relative_difference(u, tu.values, u);
    history.push_back(res);
    if (!std::isfinite(res))
      throw SolverError(SolverError::Reason::NonFinite, "Picard iterate became non-finite", history, u);
    if (res <= cfg.tol && tu.tail_convergent) {
      converged = true;
      break;
    }
    rising = (history.size() >= 2 && res > history[history.size() - 2]) ? rising + 1 : 0;
    if (rising >= cfg.divergence_window) {
      std::ostringstream os;
      os << "residual grew for " << rising << " consecutive iterations (last " << res << ")";
      throw SolverError(SolverError::Reason::Diverged, os.str(), history, u);
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (1.0 - theta) * u[i] + theta * tu.values[i];
  }
  if (!converged) {
    std::ostringstream os;
    os << "no convergence after " << cfg.max_iter << " iterations (residual " << res << ")";
    throw SolverError(SolverError::Reason::MaxIterations, os.str(), history, u);
  }

  SolveDiagnostics diag;
  diag.iterations = it;
  diag.final_residual = res;
  diag.residual_history = std::move(history);
  compute_growth_diagnostics(f, op, u, diag);
  if (!diag.integrable)
    throw SolverError(SolverError::Reason::NonIntegrable, "f(|z|, u(z)) is not integrable against 1 + |z|^p",
                      diag.residual_history, u);

  return Solution{RadialField(op.grid().nodes(), std::move(u), op.grid().dim()), std::move(diag)};
}

Solution picard_solve(const Nonlinearity& f, const RadialGrid& grid, const SolveConfig& cfg,
                      const OperatorOptions& opts) {
  const IntegralOperator op(grid, f.p(), opts);
  return picard_solve(f, op, cfg);
}

}  // namespace movsph
