#pragma once

#include <cmath>
#include <numbers>

#include "movsph/moving_spheres.hpp"

namespace movsph::testing {

// A_{n,p} = pi^{n/2} Gamma((p+n)/2) / Gamma((p+2n)/2), via the Beta integral.
inline double bubble_A(int n, double p) {
  return std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(0.5 * (p + n)) / std::tgamma(0.5 * (p + 2.0 * n));
}

// c (1 + |y - center|^2)^{p/2} with c = A^{1/(1+q)} solves the equation for
// the eps = 0 Hyder-Ngo f, for every q > 0.
inline double bubble_c(int n, double p, double q) { return std::pow(bubble_A(n, p), 1.0 / (1.0 + q)); }

inline ScalarField exact_bubble(int n, double p, double q, Point center = {}) {
  const double c = bubble_c(n, p, q);
  if (center.dim() == 0) center = Point(static_cast<std::size_t>(n));
  return [c, p, center](const Point& y) { return c * std::pow(1.0 + (y - center).norm2(), 0.5 * p); };
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace movsph::testing
