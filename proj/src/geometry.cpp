#include "movsph/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace movsph {

double guarded_offset_norm(const InversionSphere& sphere, const Point& xi) {
  if (xi.dim() != sphere.dim()) throw DomainError("inversion: dimension mismatch");
  const double d = distance(xi, sphere.center());
  if (!(d >= kNearCenterGuard * sphere.radius()))
    throw DomainError("inversion undefined at the sphere center");
  return d;
}

Point invert(const InversionSphere& sphere, const Point& xi) {
  const double d = guarded_offset_norm(sphere, xi);
  const double lam = sphere.radius();
  // Scale by (lam/d)^2 in two steps so lam^2/d^2 cannot overflow on its own.
  const double s = (lam / d) * (lam / d);
  return sphere.center() + (xi - sphere.center()) * s;
}

double inversion_jacobian(const InversionSphere& sphere, const Point& z) {
  const double d = guarded_offset_norm(sphere, z);
  return std::pow(sphere.radius() / d, 2.0 * static_cast<double>(sphere.dim()));
}

double kelvin_scale(const InversionSphere& sphere, double p, const Point& xi) {
  const double d = guarded_offset_norm(sphere, xi);
  return std::pow(d / sphere.radius(), p);
}

double unit_sphere_area(int n) {
  if (n < 1) throw DomainError("unit_sphere_area: n must be >= 1");
  const double h = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double power_difference_bound(double a, double b, double s) {
  if (!(a > 0.0) || !(b > 0.0) || !(s > 0.0))
    throw DomainError("power_difference_bound: a, b, s must be positive");
  return s * std::abs(a - b) * std::max(std::pow(a, s - 1.0), std::pow(b, s - 1.0));
}

}  // namespace movsph
