#pragma once

#include <cmath>
#include <concepts>

#include "movsph/errors.hpp"
#include "movsph/point.hpp"

namespace movsph {

/// Points closer than this fraction of the radius to the center are
/// rejected; inversion is only defined on R^n minus the center.
inline constexpr double kNearCenterGuard = 1e-12;

/// The sphere of radius `radius` about `center`, used to invert and to
/// Kelvin-transform.
class InversionSphere {
 public:
  InversionSphere(Point center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw DomainError("InversionSphere: radius must be positive and finite");
    if (center.dim() < 2) throw DomainError("InversionSphere: dimension must be >= 2");
    if (!center.is_finite()) throw DomainError("InversionSphere: non-finite center");
  }

  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  std::size_t dim() const noexcept { return center_.dim(); }

 private:
  Point center_;
  double radius_;
};

/// |xi - center|, throwing when xi is (numerically) at the center.
double guarded_offset_norm(const InversionSphere& sphere, const Point& xi);

/// xi^{x,lambda} = x + lambda^2 (xi - x) / |xi - x|^2.
Point invert(const InversionSphere& sphere, const Point& xi);

/// (lambda / |z - x|)^{2n}: volume distortion of the inversion.
double inversion_jacobian(const InversionSphere& sphere, const Point& z);

/// (|xi - x| / lambda)^p, the weight in front of the Kelvin transform.
double kelvin_scale(const InversionSphere& sphere, double p, const Point& xi);

/// u_{x,lambda}(xi) = (|xi - x|/lambda)^p u(xi^{x,lambda}).
template <class Field>
  requires std::invocable<const Field&, const Point&>
double kelvin_value(const Field& u, const InversionSphere& sphere, double p, const Point& xi) {
  if (!(p > 0.0)) throw DomainError("kelvin_value: p must be positive");
  const double scale = kelvin_scale(sphere, p, xi);
  return scale * u(invert(sphere, xi));
}

/// Surface area |S^{n-1}| of the unit sphere in R^n (n >= 1).
double unit_sphere_area(int n);

/// Right-hand side s |a - b| max(a^{s-1}, b^{s-1}) of the elementary bound
/// |a^s - b^s| <= s |a - b| max(a^{s-1}, b^{s-1}), a, b > 0, s > 0.
double power_difference_bound(double a, double b, double s);

}  // namespace movsph
