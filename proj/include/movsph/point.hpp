#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "movsph/errors.hpp"

namespace movsph {

inline constexpr std::size_t kMaxDim = 16;

/// Fixed-capacity point in R^n. Stored inline so inner quadrature loops do
/// not allocate.
class Point {
 public:
  Point() = default;

  explicit Point(std::size_t dim) : n_(dim) {
    if (dim < 1 || dim > kMaxDim) throw DomainError("Point: dimension out of range");
  }

  Point(std::initializer_list<double> xs) : Point(xs.size()) {
    std::size_t i = 0;
    for (double v : xs) c_[i++] = v;
  }

  static Point from_span(std::span<const double> xs) {
    Point p(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) p.c_[i] = xs[i];
    return p;
  }

  /// e_axis * scale in R^dim.
  static Point axis(std::size_t dim, std::size_t axis, double scale = 1.0) {
    Point p(dim);
    p.c_[axis] = scale;
    return p;
  }

  std::size_t dim() const noexcept { return n_; }
  double& operator[](std::size_t i) noexcept { return c_[i]; }
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  std::span<const double> coords() const noexcept { return {c_.data(), n_}; }

  double norm2() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += c_[i] * c_[i];
    return s;
  }
  double norm() const noexcept { return std::sqrt(norm2()); }

  double dot(const Point& o) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += c_[i] * o.c_[i];
    return s;
  }

  bool is_finite() const noexcept {
    for (std::size_t i = 0; i < n_; ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

  Point& operator+=(const Point& o) noexcept {
    for (std::size_t i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) noexcept {
    for (std::size_t i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) noexcept {
    for (std::size_t i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }
  friend Point operator-(Point a) noexcept { return a *= -1.0; }

  friend bool operator==(const Point& a, const Point& b) noexcept {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.n_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> c_{};
  std::size_t n_ = 0;
};

inline double distance(const Point& a, const Point& b) noexcept { return (a - b).norm(); }

}  // namespace movsph
