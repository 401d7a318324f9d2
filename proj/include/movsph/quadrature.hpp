#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "movsph/nonlinearity.hpp"
#include "movsph/point.hpp"

namespace movsph {

/// Radial grid parameters. Nodes are Gauss-Legendre points on `panels`
/// equal panels in log r over [r_min, r_max]; nodes = panels * panel_order.
struct GridParams {
  int n = 3;
  double r_min = 1e-4;
  double r_max = 1e4;
  std::size_t nodes = 256;
  std::size_t panel_order = 16;
};

/// Quadrature for radial integrands: sum_i w_i g(r_i) ~ int_0^{r_max} g(r) r^{n-1} dr.
/// The ball [0, r_min] is lumped into the first weight.
class RadialGrid {
 public:
  static RadialGrid geometric(const GridParams& params);

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const GridParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int dim() const noexcept { return params_.n; }
  double r_max() const noexcept { return params_.r_max; }
  double r_min() const noexcept { return params_.r_min; }

  /// |S^{n-1}| sum_i w_i, which should equal |B_{r_max}|.
  double ball_volume_estimate() const;

  /// True when `r` matches this grid's nodes to relative `tol`.
  bool matches(std::span<const double> r, double tol = 1e-12) const noexcept;

 private:
  GridParams params_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// A positive radial profile u(r) sampled on ascending nodes, optionally
/// centered away from the origin: u(y) = profile(|y - center|).
///
/// Interpolation is monotone cubic (Fritsch-Carlson slopes) in
/// (log r, log u), which keeps the interpolant positive. Below the first
/// node the profile is held constant; above the last node it continues as
/// the power law through the last two nodes.
class RadialField {
 public:
  RadialField(std::vector<double> nodes, std::vector<double> values, int n);
  RadialField(std::vector<double> nodes, std::vector<double> values, int n, const Point& center);

  double operator()(double r) const;
  double at(const Point& y) const { return (*this)(distance(y, center_)); }

  /// d u / d r of the interpolant.
  double derivative(double r) const;

  /// True for r inside [first node, last node], where no tail model is used.
  bool in_table(double r) const noexcept { return r >= nodes_.front() && r <= nodes_.back(); }

  /// Exponent of the power-law continuation past the last node.
  double upper_tail_exponent() const noexcept { return upper_exponent_; }

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }
  int dim() const noexcept { return n_; }
  const Point& center() const noexcept { return center_; }

 private:
  std::size_t segment(double t) const noexcept;

  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> log_r_;
  std::vector<double> log_u_;
  std::vector<double> slope_;
  int n_;
  Point center_;
  double upper_exponent_ = 0.0;
};

/// A_p(rho, r) = int_{S^{n-1}} |rho e - r theta|^p dsigma(theta): the kernel
/// |x - y|^p averaged over the sphere |y| = r. Gauss-Legendre in the polar
/// angle; the order doubles near rho = r when p/2 is not an integer.
class AngularKernel {
 public:
  AngularKernel(double p, int n, std::size_t order = 64);

  double operator()(double rho, double r) const noexcept;

  double p() const noexcept { return p_; }
  int n() const noexcept { return n_; }
  std::size_t order() const noexcept { return base_.sin2_half.size(); }

 private:
  struct Rule {
    std::vector<double> sin2_half;  // sin^2(theta/2)
    std::vector<double> weight;     // GL weight * |S^{n-2}| sin^{n-2} theta
  };
  static Rule make_rule(int n, std::size_t order);
  double integrate(const Rule& rule, double rho, double r) const noexcept;

  double p_;
  int n_;
  bool smooth_;
  Rule base_;
  Rule refined_;
};

double angular_kernel(double rho, double r, double p, int n, std::size_t order = 64);

/// Power-law model source(r) ~ value_at_rmax (r / r_max)^{-exponent} beyond the grid.
struct TailFit {
  bool present = false;  ///< false when the source vanishes at the last nodes
  double exponent = 0.0;
  double value_at_rmax = 0.0;
};

TailFit fit_tail(const RadialGrid& grid, std::span<const double> source);

struct OperatorOptions {
  std::size_t angular_order = 64;
  std::size_t tail_panels = 30;  ///< unit panels in log(r / r_max)
  std::size_t tail_order = 16;
};

struct OperatorOutput {
  std::vector<double> values;
  TailFit tail;
  bool tail_convergent = true;  ///< false: tail dropped, result truncated at r_max
};

/// (T u)(rho) = int |rho e - y|^p f(|y|, u(y)) dy for radial data. The
/// kernel matrix against the grid nodes is assembled once.
class IntegralOperator {
 public:
  enum class Execution { Parallel, Serial };

  IntegralOperator(const RadialGrid& grid, double p, OperatorOptions opts = {},
                   Execution exec = Execution::Parallel);

  /// Radial source s(r_i) -> (int |rho - y|^p s(|y|) dy)(rho_k) at the grid nodes.
  OperatorOutput apply_source(std::span<const double> source) const;
  OperatorOutput apply_source_serial(std::span<const double> source) const;

  /// Same at arbitrary radii; kernel entries are computed on the fly.
  OperatorOutput apply_source_at(std::span<const double> source, std::span<const double> out_nodes) const;

  /// f(r_i, u_i) at the grid nodes.
  std::vector<double> source_values(const Nonlinearity& f, std::span<const double> u) const;

  OperatorOutput apply(const Nonlinearity& f, std::span<const double> u) const {
    return apply_source(source_values(f, u));
  }

  const RadialGrid& grid() const noexcept { return grid_; }
  double p() const noexcept { return p_; }
  const AngularKernel& angular() const noexcept { return kernel_; }
  const OperatorOptions& options() const noexcept { return opts_; }

 private:
  void assemble_row(std::size_t k);
  double tail_value(std::size_t row, const TailFit& tail) const noexcept;
  double tail_value_at(double rho, const TailFit& tail) const noexcept;
  double tail_remainder(const TailFit& tail) const noexcept;
  bool tail_converges(const TailFit& tail) const noexcept;

  RadialGrid grid_;
  double p_;
  OperatorOptions opts_;
  Execution exec_;
  AngularKernel kernel_;
  std::vector<double> tail_t_;   // log(r / r_max) tail nodes
  std::vector<double> tail_w_;   // matching weights
  std::vector<double> matrix_;   // N x N, row k: w_i A(r_k, r_i)
  std::vector<double> tail_matrix_;  // N x M, row k: A(r_k, r_max e^{t_j})
};

/// T(u) evaluated at `out_nodes`, returned as a field
/// on those nodes.
RadialField apply_operator(const IntegralOperator& op, const Nonlinearity& f, std::span<const double> u,
                           std::span<const double> out_nodes);

struct IntegralEstimate {
  double value = 0.0;      ///< truncated + tail (truncated only when divergent)
  double truncated = 0.0;  ///< over the grid ball
  double tail = 0.0;
  bool convergent = true;
};

/// int_{R^n} (1 + |z|^p) f(|z|, u(z)) dz, with the tail from the fitted power law.
IntegralEstimate integrability_check(const RadialGrid& grid, std::span<const double> u, const Nonlinearity& f);

/// int_{R^n} r^k s(r) dz for a radial source sampled on the grid (k >= 0).
IntegralEstimate radial_moment(const RadialGrid& grid, std::span<const double> source, double k);

}  // namespace movsph
