#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "movsph/point.hpp"

namespace movsph {

/// alpha_{2s,n}(l) = Gamma(l + n/2 + s) / Gamma(l + n/2 - s), evaluated in log space
/// with sign tracking; exactly 0 when l + n/2 - s is a nonpositive integer.
/// When 2s is an integer the ratio is the finite product b (b+1) ... (a-1).
double multiplier(double s, int n, long l);

/// The log-Gamma evaluation alone, for any s.
double multiplier_log_gamma(double s, int n, long l);

/// True when l + n/2 - s is a nonpositive integer.
bool multiplier_pole(double s, int n, long l);

/// lambda_l = l (l + n - 1), eigenvalue of -Laplacian on S^n.
double laplacian_eigenvalue(int n, long l);

/// sqrt(lambda_l + (n-1)^2 / 4), which equals l + (n-1)/2.
double operator_B_eigenvalue(int n, long l);

/// prod_{k=1}^{s} (lambda_l + (n/2 - k)(n/2 + k - 1)) for integer s >= 1.
double integer_product_multiplier(int s, int n, long l);

/// prod_{k=1}^{s} (B_l^2 - ((2s - 2k + 1)/2)^2) for integer s >= 1.
double b_form_multiplier(int s, int n, long l);

class MultiplierTable {
 public:
  MultiplierTable(double s, int n, long max_degree);

  double s() const noexcept { return s_; }
  int n() const noexcept { return n_; }
  long max_degree() const noexcept { return static_cast<long>(entries_.size()) - 1; }
  double operator[](long l) const { return entries_.at(static_cast<std::size_t>(l)); }
  const std::vector<double>& entries() const noexcept { return entries_; }

 private:
  double s_;
  int n_;
  std::vector<double> entries_;
};

/// v = sum_l v_l Y_l on S^n with Y_l the zonal harmonic about N = e_0,
/// normalized by Y_l(N) = 1.
struct ZonalFunction {
  int n = 2;
  std::vector<double> coeffs;

  /// Value at a point of S^n whose first coordinate is `cos_theta`.
  double at_cos(double cos_theta) const;
  /// Value at omega in R^{n+1} (normalized before use).
  double operator()(const Point& omega) const;
};

/// Y_l(t) = C_l^{(n-1)/2}(t) / C_l^{(n-1)/2}(1).
double zonal_harmonic(int n, long l, double t);

struct ZonalApplyResult {
  ZonalFunction value;
  bool truncated = false;       ///< v had nonzero coefficients past the table
  std::size_t dropped = 0;
  double dropped_max_abs = 0.0;
};

/// Coefficient-wise multiplication by the table; degrees past the table are
/// dropped and reported.
ZonalApplyResult apply_gjms_zonal(const ZonalFunction& v, const MultiplierTable& table);

/// pi_N^{-1}(x) = ((|x|^2 - 1) / (|x|^2 + 1), 2x / (1 + |x|^2)) in R^{n+1}.
Point inverse_stereographic(const Point& x);

using SphereFunction = std::function<double(const Point&)>;

/// (2 / (1 + |x|^2))^{(n - 2s)/2} v(pi_N^{-1}(x)).
double stereo_pullback(const SphereFunction& v, double s, const Point& x);
double stereo_pullback(const ZonalFunction& v, double s, const Point& x);

}  // namespace movsph
