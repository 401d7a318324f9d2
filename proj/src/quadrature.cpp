#include "movsph/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "movsph/errors.hpp"
#include "movsph/gauss_legendre.hpp"
#include "movsph/geometry.hpp"

namespace movsph {

// ---------------------------------------------------------------------------
// RadialGrid

RadialGrid RadialGrid::geometric(const GridParams& params) {
  if (params.n < 2) throw DomainError("grid: n must be >= 2");
  if (!(params.r_min > 0.0) || !(params.r_max > params.r_min) || !std::isfinite(params.r_max))
    throw DomainError("grid: need 0 < r_min < r_max < inf");
  if (params.panel_order < 2 || params.nodes < params.panel_order || params.nodes % params.panel_order != 0)
    throw DomainError("grid: nodes must be a positive multiple of panel_order (>= 2)");

  RadialGrid g;
  g.params_ = params;
  const std::size_t panels = params.nodes / params.panel_order;
  const auto rule = composite_gauss_legendre(std::log(params.r_min), std::log(params.r_max), panels, params.panel_order);
  const double nd = params.n;
  g.nodes_.resize(rule.size());
  g.weights_.resize(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = std::exp(rule.nodes[i]);
    g.nodes_[i] = r;
    // r^{n-1} dr = r^n d(log r)
    g.weights_[i] = rule.weights[i] * std::pow(r, nd);
  }
  g.weights_.front() += std::pow(params.r_min, nd) / nd;
  return g;
}

double RadialGrid::ball_volume_estimate() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return unit_sphere_area(params_.n) * s;
}

bool RadialGrid::matches(std::span<const double> r, double tol) const noexcept {
  if (r.size() != nodes_.size()) return false;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!(std::abs(r[i] - nodes_[i]) <= tol * nodes_[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// RadialField

RadialField::RadialField(std::vector<double> nodes, std::vector<double> values, int n)
    : RadialField(std::move(nodes), std::move(values), n, Point(static_cast<std::size_t>(std::max(n, 1)))) {}

RadialField::RadialField(std::vector<double> nodes, std::vector<double> values, int n, const Point& center)
    : nodes_(std::move(nodes)), values_(std::move(values)), n_(n), center_(center) {
  if (n < 2) throw DomainError("field: n must be >= 2");
  if (center.dim() != static_cast<std::size_t>(n)) throw DomainError("field: center dimension mismatch");
  if (nodes_.size() < 2 || nodes_.size() != values_.size())
    throw DomainError("field: need at least two (r, u) pairs of matching length");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > 0.0) || !std::isfinite(nodes_[i])) throw DomainError("field: radii must be positive and finite");
    if (i && !(nodes_[i] > nodes_[i - 1])) throw DomainError("field: radii must be strictly increasing");
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw DomainError("field: values must be positive and finite");
  }

  const std::size_t m = nodes_.size();
  log_r_.resize(m);
  log_u_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_r_[i] = std::log(nodes_[i]);
    log_u_[i] = std::log(values_[i]);
  }

  std::vector<double> h(m - 1), delta(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    h[k] = log_r_[k + 1] - log_r_[k];
    delta[k] = (log_u_[k + 1] - log_u_[k]) / h[k];
  }
  slope_.assign(m, 0.0);
  if (m == 2) {
    slope_[0] = slope_[1] = delta[0];
  } else {
    for (std::size_t k = 1; k + 1 < m; ++k) {
      if (delta[k - 1] * delta[k] <= 0.0) continue;
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      slope_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    // One-sided three-point end slopes, limited to keep monotonicity.
    const auto edge = [](double h0, double h1, double d0, double d1) {
      double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (d * d0 <= 0.0) return 0.0;
      if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
      return d;
    };
    slope_[0] = edge(h[0], h[1], delta[0], delta[1]);
    slope_[m - 1] = edge(h[m - 2], h[m - 3], delta[m - 2], delta[m - 3]);
  }
  upper_exponent_ = delta[m - 2];
}

std::size_t RadialField::segment(double t) const noexcept {
  auto it = std::upper_bound(log_r_.begin(), log_r_.end(), t);
  auto k = static_cast<std::size_t>(std::distance(log_r_.begin(), it));
  if (k == 0) return 0;
  return std::min(k - 1, log_r_.size() - 2);
}

double RadialField::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError("field: radius must be nonnegative");
  if (r <= nodes_.front()) return values_.front();
  const double t = std::log(r);
  if (r >= nodes_.back()) return values_.back() * std::exp(upper_exponent_ * (t - log_r_.back()));
  const std::size_t k = segment(t);
  const double h = log_r_[k + 1] - log_r_[k];
  const double s = (t - log_r_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double v = (2.0 * s3 - 3.0 * s2 + 1.0) * log_u_[k] + (s3 - 2.0 * s2 + s) * h * slope_[k] +
                   (-2.0 * s3 + 3.0 * s2) * log_u_[k + 1] + (s3 - s2) * h * slope_[k + 1];
  return std::exp(v);
}

double RadialField::derivative(double r) const {
  if (!(r > 0.0)) throw DomainError("field: derivative needs r > 0");
  if (r <= nodes_.front()) return 0.0;
  const double u = (*this)(r);
  if (r >= nodes_.back()) return upper_exponent_ * u / r;
  const double t = std::log(r);
  const std::size_t k = segment(t);
  const double h = log_r_[k + 1] - log_r_[k];
  const double s = (t - log_r_[k]) / h;
  const double s2 = s * s;
  const double dv = ((6.0 * s2 - 6.0 * s) * log_u_[k] + (3.0 * s2 - 4.0 * s + 1.0) * h * slope_[k] +
                     (-6.0 * s2 + 6.0 * s) * log_u_[k + 1] + (3.0 * s2 - 2.0 * s) * h * slope_[k + 1]) /
                    h;
  return dv * u / r;
}

// ---------------------------------------------------------------------------
// AngularKernel

AngularKernel::Rule AngularKernel::make_rule(int n, std::size_t order) {
  const GaussLegendreRule& gl = gauss_legendre(order);
  const double area = unit_sphere_area(n - 1);
  const double half_pi = 0.5 * std::numbers::pi;
  Rule rule;
  rule.sin2_half.resize(order);
  rule.weight.resize(order);
  for (std::size_t j = 0; j < order; ++j) {
    const double theta = half_pi * (gl.nodes[j] + 1.0);
    const double sh = std::sin(0.5 * theta);
    rule.sin2_half[j] = sh * sh;
    rule.weight[j] = half_pi * gl.weights[j] * area * std::pow(std::sin(theta), n - 2);
  }
  return rule;
}

AngularKernel::AngularKernel(double p, int n, std::size_t order) : p_(p), n_(n) {
  if (!(p > 0.0)) throw DomainError("angular kernel: p must be positive");
  if (n < 2) throw DomainError("angular kernel: n must be >= 2");
  if (order < 4) throw DomainError("angular kernel: order must be >= 4");
  const double half = 0.5 * p;
  smooth_ = half == std::floor(half);
  base_ = make_rule(n, order);
  refined_ = smooth_ ? base_ : make_rule(n, 2 * order);
}

double AngularKernel::integrate(const Rule& rule, double rho, double r) const noexcept {
  // |rho e - r theta|^2 = (rho - r)^2 + 4 rho r sin^2(theta/2), free of cancellation at rho = r.
  const double d2 = (rho - r) * (rho - r);
  const double c = 4.0 * rho * r;
  const double e = 0.5 * p_;
  double s = 0.0;
  if (p_ == 2.0) {
    for (std::size_t j = 0; j < rule.weight.size(); ++j) s += rule.weight[j] * (d2 + c * rule.sin2_half[j]);
  } else {
    for (std::size_t j = 0; j < rule.weight.size(); ++j) s += rule.weight[j] * std::pow(d2 + c * rule.sin2_half[j], e);
  }
  return s;
}

double AngularKernel::operator()(double rho, double r) const noexcept {
  const bool near_diagonal = std::abs(rho - r) < 0.25 * std::max(rho, r);
  return integrate(!smooth_ && near_diagonal ? refined_ : base_, rho, r);
}

double angular_kernel(double rho, double r, double p, int n, std::size_t order) {
  if (!(rho >= 0.0) || !(r >= 0.0)) throw DomainError("angular_kernel: radii must be nonnegative");
  return AngularKernel(p, n, order)(rho, r);
}

// ---------------------------------------------------------------------------
// Tail model

TailFit fit_tail(const RadialGrid& grid, std::span<const double> source) {
  const auto& r = grid.nodes();
  const std::size_t m = r.size();
  if (source.size() != m) throw DomainError("fit_tail: source size mismatch");
  TailFit fit;
  const double s1 = source[m - 1], s0 = source[m - 2];
  if (!(s1 > 0.0) || !(s0 > 0.0)) return fit;
  fit.present = true;
  fit.exponent = -std::log(s1 / s0) / std::log(r[m - 1] / r[m - 2]);
  // Anchor the power law at r_max itself.
  fit.value_at_rmax = s1 * std::pow(grid.r_max() / r[m - 1], -fit.exponent);
  return fit;
}

// ---------------------------------------------------------------------------
// IntegralOperator

IntegralOperator::IntegralOperator(const RadialGrid& grid, double p, OperatorOptions opts, Execution exec)
    : grid_(grid), p_(p), opts_(opts), exec_(exec), kernel_(p, grid.dim(), opts.angular_order) {
  if (opts.tail_panels < 1 || opts.tail_order < 2) throw DomainError("operator: invalid tail quadrature");
  const auto tail = composite_gauss_legendre(0.0, static_cast<double>(opts.tail_panels), opts.tail_panels, opts.tail_order);
  tail_t_ = tail.nodes;
  tail_w_ = tail.weights;

  const std::size_t n = grid_.size();
  matrix_.resize(n * n);
  tail_matrix_.resize(n * tail_t_.size());
  if (exec_ == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t k = 0; k < n; ++k) assemble_row(k);
  } else {
    for (std::size_t k = 0; k < n; ++k) assemble_row(k);
  }
  for (std::size_t idx = 0; idx < matrix_.size(); ++idx) {
    if (!std::isfinite(matrix_[idx])) {
      std::ostringstream os;
      os << "kernel overflow at node r=" << grid_.nodes()[idx / n] << " (p=" << p_ << ")";
      throw RangeError(os.str());
    }
  }
}

void IntegralOperator::assemble_row(std::size_t k) {
  const auto& r = grid_.nodes();
  const auto& w = grid_.weights();
  const std::size_t n = r.size();
  const double rho = r[k];
  for (std::size_t i = 0; i < n; ++i) matrix_[k * n + i] = w[i] * kernel_(rho, r[i]);
  const std::size_t m = tail_t_.size();
  for (std::size_t j = 0; j < m; ++j) tail_matrix_[k * m + j] = kernel_(rho, grid_.r_max() * std::exp(tail_t_[j]));
}

bool IntegralOperator::tail_converges(const TailFit& tail) const noexcept {
  return !tail.present || tail.exponent > grid_.dim() + p_;
}

double IntegralOperator::tail_remainder(const TailFit& tail) const noexcept {
  // Past the last tail panel the kernel is |S^{n-1}| r^p to leading order.
  const double n = grid_.dim();
  const double R = grid_.r_max();
  const double decay = tail.exponent - n - p_;
  const double T = static_cast<double>(opts_.tail_panels);
  return tail.value_at_rmax * unit_sphere_area(grid_.dim()) * std::pow(R, n + p_) * std::exp(-decay * T) / decay;
}

double IntegralOperator::tail_value(std::size_t row, const TailFit& tail) const noexcept {
  if (!tail.present || !tail_converges(tail)) return 0.0;
  const double n = grid_.dim();
  const std::size_t m = tail_t_.size();
  const double* a = &tail_matrix_[row * m];
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += tail_w_[j] * std::exp(-(tail.exponent - n) * tail_t_[j]) * a[j];
  return tail.value_at_rmax * std::pow(grid_.r_max(), n) * s + tail_remainder(tail);
}

double IntegralOperator::tail_value_at(double rho, const TailFit& tail) const noexcept {
  if (!tail.present || !tail_converges(tail)) return 0.0;
  const double n = grid_.dim();
  double s = 0.0;
  for (std::size_t j = 0; j < tail_t_.size(); ++j)
    s += tail_w_[j] * std::exp(-(tail.exponent - n) * tail_t_[j]) * kernel_(rho, grid_.r_max() * std::exp(tail_t_[j]));
  return tail.value_at_rmax * std::pow(grid_.r_max(), n) * s + tail_remainder(tail);
}

namespace {

void check_output(const OperatorOutput& out, std::span<const double> at) {
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (!std::isfinite(out.values[k])) {
      std::ostringstream os;
      os << "integral operator overflow at node rho=" << at[k];
      throw RangeError(os.str());
    }
  }
}

}  // namespace

OperatorOutput IntegralOperator::apply_source(std::span<const double> source) const {
  if (exec_ == Execution::Serial) return apply_source_serial(source);
  const std::size_t n = grid_.size();
  if (source.size() != n) throw DomainError("apply_source: source size mismatch");
  OperatorOutput out;
  out.tail = fit_tail(grid_, source);
  out.tail_convergent = tail_converges(out.tail);
  out.values.resize(n);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = &matrix_[k * n];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += row[i] * source[i];
    out.values[k] = s + tail_value(k, out.tail);
  }
  check_output(out, grid_.nodes());
  return out;
}

OperatorOutput IntegralOperator::apply_source_serial(std::span<const double> source) const {
  const std::size_t n = grid_.size();
  if (source.size() != n) throw DomainError("apply_source: source size mismatch");
  OperatorOutput out;
  out.tail = fit_tail(grid_, source);
  out.tail_convergent = tail_converges(out.tail);
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = &matrix_[k * n];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += row[i] * source[i];
    out.values[k] = s + tail_value(k, out.tail);
  }
  check_output(out, grid_.nodes());
  return out;
}

OperatorOutput IntegralOperator::apply_source_at(std::span<const double> source,
                                                 std::span<const double> out_nodes) const {
  const std::size_t n = grid_.size();
  if (source.size() != n) throw DomainError("apply_source_at: source size mismatch");
  for (double rho : out_nodes)
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("apply_source_at: radii must be finite and >= 0");
  OperatorOutput out;
  out.tail = fit_tail(grid_, source);
  out.tail_convergent = tail_converges(out.tail);
  out.values.resize(out_nodes.size());
  const auto& r = grid_.nodes();
  const auto& w = grid_.weights();
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t k = 0; k < out_nodes.size(); ++k) {
    const double rho = out_nodes[k];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * kernel_(rho, r[i]) * source[i];
    out.values[k] = s + tail_value_at(rho, out.tail);
  }
  check_output(out, out_nodes);
  return out;
}

std::vector<double> IntegralOperator::source_values(const Nonlinearity& f, std::span<const double> u) const {
  const auto& r = grid_.nodes();
  if (u.size() != r.size()) throw DomainError("source_values: field size mismatch");
  if (f.n() != grid_.dim()) throw DomainError("source_values: dimension mismatch between f and grid");
  std::vector<double> s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) s[i] = f(r[i], u[i]);
  return s;
}

RadialField apply_operator(const IntegralOperator& op, const Nonlinearity& f, std::span<const double> u,
                           std::span<const double> out_nodes) {
  if (std::abs(f.p() - op.p()) > 0.0) throw DomainError("apply_operator: p mismatch between f and operator");
  auto out = op.apply_source_at(op.source_values(f, u), out_nodes);
  return RadialField(std::vector<double>(out_nodes.begin(), out_nodes.end()), std::move(out.values), op.grid().dim());
}

// ---------------------------------------------------------------------------
// Volume integrals

IntegralEstimate radial_moment(const RadialGrid& grid, std::span<const double> source, double k) {
  if (!(k >= 0.0)) throw DomainError("radial_moment: k must be >= 0");
  const auto& r = grid.nodes();
  const auto& w = grid.weights();
  if (source.size() != r.size()) throw DomainError("radial_moment: source size mismatch");
  const double area = unit_sphere_area(grid.dim());
  const double n = grid.dim();
  IntegralEstimate est;
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += w[i] * std::pow(r[i], k) * source[i];
  est.truncated = area * s;
  const TailFit tail = fit_tail(grid, source);
  if (tail.present) {
    const double decay = tail.exponent - n - k;
    est.convergent = decay > 0.0;
    if (est.convergent) est.tail = area * tail.value_at_rmax * std::pow(grid.r_max(), n + k) / decay;
  }
  est.value = est.truncated + est.tail;
  return est;
}

IntegralEstimate integrability_check(const RadialGrid& grid, std::span<const double> u, const Nonlinearity& f) {
  const auto& r = grid.nodes();
  if (u.size() != r.size()) throw DomainError("integrability_check: field size mismatch");
  std::vector<double> s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) s[i] = f(r[i], u[i]);
  const IntegralEstimate m0 = radial_moment(grid, s, 0.0);
  const IntegralEstimate mp = radial_moment(grid, s, f.p());
  IntegralEstimate est;
  est.truncated = m0.truncated + mp.truncated;
  est.convergent = m0.convergent && mp.convergent;
  est.tail = est.convergent ? m0.tail + mp.tail : 0.0;
  est.value = est.truncated + est.tail;
  return est;
}

}  // namespace movsph
