#include "movsph/gjms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gegenbauer.hpp>

#include "movsph/errors.hpp"

namespace movsph {

namespace {

void check_args(double s, int n, long l) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("gjms: s must be positive and finite");
  if (n < 1) throw DomainError("gjms: n must be >= 1");
  if (l < 0) throw DomainError("gjms: degree must be >= 0");
}

// log|Gamma(b)| and sign(Gamma(b)) for b not a nonpositive integer.
double log_abs_gamma(double b, int& sign) {
  sign = 1;
  if (b < 0.0 && static_cast<long>(std::floor(b)) % 2 != 0) sign = -1;
  return std::lgamma(b);
}

bool is_nonpositive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

}  // namespace

bool multiplier_pole(double s, int n, long l) {
  check_args(s, n, l);
  return is_nonpositive_integer(static_cast<double>(l) + 0.5 * n - s);
}

double multiplier(double s, int n, long l) {
  check_args(s, n, l);
  const double b = static_cast<double>(l) + 0.5 * n - s;
  if (is_nonpositive_integer(b)) return 0.0;
  const double two_s = 2.0 * s;
  if (two_s == std::floor(two_s) && two_s <= 64.0) {
    // a - b is a positive integer: Gamma(a)/Gamma(b) = b (b+1) ... (a-1).
    double prod = 1.0;
    for (int j = 0; j < static_cast<int>(two_s); ++j) prod *= b + j;
    if (std::isfinite(prod)) return prod;
  }
  return multiplier_log_gamma(s, n, l);
}

double multiplier_log_gamma(double s, int n, long l) {
  check_args(s, n, l);
  const double a = static_cast<double>(l) + 0.5 * n + s;
  const double b = static_cast<double>(l) + 0.5 * n - s;
  if (is_nonpositive_integer(b)) return 0.0;
  int sa = 1, sb = 1;
  const double la = log_abs_gamma(a, sa);
  const double lb = log_abs_gamma(b, sb);
  return static_cast<double>(sa * sb) * std::exp(la - lb);
}

double laplacian_eigenvalue(int n, long l) {
  check_args(1.0, n, l);
  const double ld = static_cast<double>(l);
  return ld * (ld + n - 1.0);
}

double operator_B_eigenvalue(int n, long l) {
  const double h = 0.5 * (n - 1.0);
  return std::sqrt(laplacian_eigenvalue(n, l) + h * h);
}

double integer_product_multiplier(int s, int n, long l) {
  if (s < 1) throw DomainError("integer_product_multiplier: s must be >= 1");
  const double lam = laplacian_eigenvalue(n, l);
  const double h = 0.5 * n;
  double prod = 1.0;
  for (int k = 1; k <= s; ++k) prod *= lam + (h - k) * (h + k - 1.0);
  return prod;
}

double b_form_multiplier(int s, int n, long l) {
  if (s < 1) throw DomainError("b_form_multiplier: s must be >= 1");
  check_args(1.0, n, l);
  const double B = static_cast<double>(l) + 0.5 * (n - 1.0);
  double prod = 1.0;
  for (int k = 1; k <= s; ++k) {
    const double c = 0.5 * (2.0 * s - 2.0 * k + 1.0);
    prod *= B * B - c * c;
  }
  return prod;
}

MultiplierTable::MultiplierTable(double s, int n, long max_degree) : s_(s), n_(n) {
  if (max_degree < 0) throw DomainError("MultiplierTable: L must be >= 0");
  entries_.reserve(static_cast<std::size_t>(max_degree) + 1);
  for (long l = 0; l <= max_degree; ++l) {
    const double a = multiplier(s, n, l);
    if (!std::isfinite(a)) throw RangeError("MultiplierTable: multiplier overflow at l = " + std::to_string(l));
    entries_.push_back(a);
  }
}

double zonal_harmonic(int n, long l, double t) {
  if (n < 2) throw DomainError("zonal_harmonic: n must be >= 2");
  if (l < 0) throw DomainError("zonal_harmonic: degree must be >= 0");
  const double lambda = 0.5 * (n - 1.0);
  const auto ul = static_cast<unsigned>(l);
  return boost::math::gegenbauer(ul, lambda, t) / boost::math::gegenbauer(ul, lambda, 1.0);
}

double ZonalFunction::at_cos(double cos_theta) const {
  double s = 0.0;
  for (std::size_t l = 0; l < coeffs.size(); ++l)
    if (coeffs[l] != 0.0) s += coeffs[l] * zonal_harmonic(n, static_cast<long>(l), cos_theta);
  return s;
}

double ZonalFunction::operator()(const Point& omega) const {
  if (omega.dim() != static_cast<std::size_t>(n) + 1) throw DomainError("ZonalFunction: point must lie in R^{n+1}");
  const double r = omega.norm();
  if (!(r > 0.0)) throw DomainError("ZonalFunction: zero point");
  return at_cos(std::clamp(omega[0] / r, -1.0, 1.0));
}

ZonalApplyResult apply_gjms_zonal(const ZonalFunction& v, const MultiplierTable& table) {
  if (v.n != table.n()) throw DomainError("apply_gjms_zonal: dimension mismatch");
  ZonalApplyResult out;
  out.value.n = v.n;
  const auto covered = static_cast<std::size_t>(table.max_degree()) + 1;
  out.value.coeffs.assign(std::min(covered, v.coeffs.size()), 0.0);
  for (std::size_t l = 0; l < v.coeffs.size(); ++l) {
    if (l < covered) {
      out.value.coeffs[l] = table[static_cast<long>(l)] * v.coeffs[l];
    } else if (v.coeffs[l] != 0.0) {
      out.truncated = true;
      ++out.dropped;
      out.dropped_max_abs = std::max(out.dropped_max_abs, std::abs(v.coeffs[l]));
    }
  }
  return out;
}

Point inverse_stereographic(const Point& x) {
  const std::size_t n = x.dim();
  if (n + 1 > kMaxDim) throw DomainError("inverse_stereographic: dimension too large");
  const double r2 = x.norm2();
  const double d = 1.0 + r2;
  Point w(n + 1);
  w[0] = (r2 - 1.0) / d;
  for (std::size_t i = 0; i < n; ++i) w[i + 1] = 2.0 * x[i] / d;
  return w;
}

double stereo_pullback(const SphereFunction& v, double s, const Point& x) {
  if (!(s > 0.0)) throw DomainError("stereo_pullback: s must be positive");
  const double n = static_cast<double>(x.dim());
  const double factor = std::pow(2.0 / (1.0 + x.norm2()), 0.5 * (n - 2.0 * s));
  return factor * v(inverse_stereographic(x));
}

double stereo_pullback(const ZonalFunction& v, double s, const Point& x) {
  if (static_cast<std::size_t>(v.n) != x.dim()) throw DomainError("stereo_pullback: dimension mismatch");
  return stereo_pullback(SphereFunction([&v](const Point& w) { return v(w); }), s, x);
}

}  // namespace movsph
