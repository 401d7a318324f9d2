#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "movsph/geometry.hpp"
#include "movsph/nonlinearity.hpp"
#include "movsph/quadrature.hpp"

namespace movsph {

/// Any positive function on R^n (radial or not).
using ScalarField = std::function<double(const Point&)>;

/// Wraps a radial field (copied) as a ScalarField.
ScalarField as_field(const RadialField& u);

// ---------------------------------------------------------------------------
// Kernel K and deficiency H

/// K(x, lam; xi, z) = (|xi-x|/lam)^p |xi^{x,lam} - z|^p - |xi - z|^p.
double kernel_K(const Point& x, double lambda, const Point& xi, const Point& z, double p);

/// The same kernel written as |xi - z^{x,lam}|^p (|z-x|/lam)^p - |xi - z|^p.
double kernel_K_second_form(const Point& x, double lambda, const Point& xi, const Point& z, double p);

/// ((|z-x|^2 - lam^2)(|xi-x|^2 - lam^2)) / lam^2, the p = 2 value of K.
double kernel_K_p2(const Point& x, double lambda, const Point& xi, const Point& z);

/// f(|z|, u(z)) - (lam/|z-x|)^{p+2n} f(|z^{x,lam}|, u(z^{x,lam})); needs |z-x| > lam.
double deficiency_H(const ScalarField& u, const Nonlinearity& f, const Point& x, double lambda, const Point& z);

// ---------------------------------------------------------------------------
// Two routes to u_{x,lam} - u

/// u_{x,lam}(y) - u(y) evaluated pointwise; needs |y - x| >= lam.
double kelvin_diff_direct(const ScalarField& u, const Point& x, double lambda, double p, const Point& y);

/// Quadrature over the exterior |z - x| >= lam in spherical shells about x.
struct ExteriorQuadrature {
  double outer_ratio = 1e3;         ///< shells span lam .. outer_ratio * lam, then a power-law tail
  std::size_t radial_panels = 16;   ///< panels in log(|z-x| / lam)
  std::size_t radial_order = 8;
  std::size_t polar_order = 32;     ///< per polar angle (n >= 3)
  std::size_t azimuth_order = 32;
  double inner_ratio = 1e-6;        ///< whole-space integrals: innermost shell at inner_ratio * lam
  double tolerance = 1e-4;          ///< nominal relative accuracy claimed for these settings
};

struct QuadratureValue {
  double value = 0.0;
  double tail = 0.0;        ///< contribution beyond outer_ratio * lam
  bool converged = true;    ///< false when the shell integrals do not decay
};

/// Right-hand side of u_{x,lam}(y) - u(y) = int_{|z-x|>=lam} K(x,lam;y,z) H(z) dz.
QuadratureValue kelvin_diff_kernel(const ScalarField& u, const Nonlinearity& f, const Point& x, double lambda,
                                   const Point& y, const ExteriorQuadrature& quad = {});

/// Single-threaded reference for kelvin_diff_kernel; identical output.
QuadratureValue kelvin_diff_kernel_serial(const ScalarField& u, const Nonlinearity& f, const Point& x,
                                          double lambda, const Point& y, const ExteriorQuadrature& quad = {});

/// u_{x,lam}(xi) = int_{R^n} lam^{p+2n} |xi - z|^p / |z - x|^{p+2n} f(|z^{x,lam}|, u(z^{x,lam})) dz.
QuadratureValue kelvin_value_integral(const ScalarField& u, const Nonlinearity& f, const Point& x, double lambda,
                                      const Point& xi, const ExteriorQuadrature& quad = {});

// ---------------------------------------------------------------------------
// Sphere rules and probe sets

struct SphereRule {
  std::vector<Point> directions;
  std::vector<double> weights;  ///< sum to |S^{n-1}|
};

/// Product Gauss-Legendre / trapezoid rule on S^{n-1} with its pole along `pole`.
SphereRule sphere_quadrature(std::size_t n, std::size_t polar_order, std::size_t azimuth_order, const Point& pole);

/// Symmetric direction set: icosahedron plus dodecahedron vertices for n = 3;
/// +-e_i and (+-e_i +- e_j)/sqrt(2) otherwise.
std::vector<Point> design_directions(std::size_t n);

struct ProbeConfig {
  std::size_t shells = 24;            ///< log-spaced radii |y - x| in lam * [1, ratio_max]
  double ratio_max = 1e3;
  std::size_t extra_directions = 0;   ///< seeded random directions on top of the design
  std::uint64_t seed = 0;
};

std::vector<Point> probe_points(const Point& x, double lambda, const ProbeConfig& cfg);

// ---------------------------------------------------------------------------
// Critical radius lambda-bar(x)

struct Witness {
  std::string kind;  ///< "kelvin_gap", "reflection", "ray"
  Point y;
  Point reference;   ///< compared point: y^{x,lam}, -y, or the earlier ray point
  double lhs = 0.0;
  double rhs = 0.0;
  double lambda = 0.0;
};

struct GapSample {
  double lambda = 0.0;
  double min_gap = 0.0;  ///< min over probes of (u_{x,lam}(y) - u(y)) / u(y)
  Point argmin;
};

/// Minimum relative Kelvin gap over the probe set at one radius.
GapSample min_relative_gap(const ScalarField& u, const Point& x, double lambda, double p, const ProbeConfig& probes);

enum class LambdaBarStatus { Ok, ZeroAtSmallLambda, ReachedHorizon };
const char* to_string(LambdaBarStatus s) noexcept;

struct LambdaBarOptions {
  ProbeConfig probes;
  double slack = 1e-8;             ///< predicate: gap >= -slack * u(y)
  double resolution_rel = 1e-4;    ///< bisection stops at resolution_rel * |x|
  int max_bisect = 40;
  double start_rel = 1e-3;         ///< first lam tried, relative to |x|
  double horizon_rel = 1e2;        ///< search stops at horizon_rel * max(|x|, 1)
};

struct LambdaBarResult {
  double estimate = 0.0;
  LambdaBarStatus status = LambdaBarStatus::Ok;
  std::vector<GapSample> evaluated;  ///< every lam tried, in evaluation order
  std::optional<Witness> witness;    ///< probe violating the predicate at the smallest failing lam
};

/// Largest lam certified by bisection on the predicate
/// min_y (u_{x,mu}(y) - u(y)) / u(y) >= -slack for every mu <= lam.
LambdaBarResult lambda_bar_estimate(const ScalarField& u, const Point& x, double p, const LambdaBarOptions& opts = {});

enum class Verdict { SymmetryCertified, ViolationFound, Inconclusive };
const char* to_string(Verdict v) noexcept;

struct MovingSphereReport {
  Point x;
  std::vector<double> lambda_values;  ///< ascending
  std::vector<double> min_gap;        ///< per lambda value
  double lambda_bar_est = 0.0;
  LambdaBarStatus status = LambdaBarStatus::Ok;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Witness> witness;
};

/// lambda_bar_estimate at x plus a verdict: certified when the estimate is at
/// least |x| (1 - rel_tol).
MovingSphereReport moving_sphere_scan(const ScalarField& u, const Point& x, double p, const LambdaBarOptions& opts = {},
                                      double rel_tol = 1e-3);

// ---------------------------------------------------------------------------
// Small-radius monotonicity of r -> r^{-p/2} u(x + r theta)

struct MonotonicityOptions {
  std::size_t gradient_shells = 8;
  double fd_step = 1e-5;
  double stability_tol = 0.1;   ///< relative disagreement between FD steps h and 2h
  std::size_t samples = 2000;
};

struct MonotonicityReport {
  double grad_log_sup = 0.0;      ///< estimate of sup |grad log u| on B(x, r_max_probe)
  double interval_end = 0.0;      ///< min(1, p / (2 grad_log_sup))
  bool decreasing = false;
  double max_increase = 0.0;      ///< largest relative step increase seen on the interval
  bool inconclusive = false;
};

MonotonicityReport small_lambda_monotonicity(const ScalarField& u, const Point& x, double p, const Point& theta,
                                             double r_max_probe, const MonotonicityOptions& opts = {});

// ---------------------------------------------------------------------------
// Reflection / ray symmetry test about the origin

struct SymmetryOptions {
  double tol = 1e-6;
  double r_min = 1e-2;
  double r_max = 1e2;
  std::size_t shells = 24;
  std::size_t extra_directions = 0;
  std::uint64_t seed = 0;
  std::size_t min_probes = 64;
};

struct SymmetryReport {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Witness> witness;
  std::size_t probes = 0;
  std::size_t reflection_checks = 0;
  std::size_t ray_checks = 0;
  double max_reflection_excess = 0.0;  ///< max (u(y) - u(-y)) / u(-y)
  double max_ray_drop = 0.0;           ///< max relative decrease along a ray
};

/// Checks u(y) <= u(-y)(1 + tol) and t -> u(t e) nondecreasing on the probe set.
SymmetryReport symmetry_verdict(const ScalarField& u, std::size_t n, const SymmetryOptions& opts = {});

// ---------------------------------------------------------------------------
// Kernel mass near the sphere

struct ShellQuadrature {
  std::size_t radial_order = 24;
  std::size_t polar_order = 48;
  std::size_t azimuth_order = 48;
};

/// int_{lam <= |z-x| <= lam_bar + delta_bar} K(x, lam; y, z) dz / (|y - x| - lam).
/// At |y - x| = lam the ratio is taken at |y - x| = lam (1 + 1e-6).
double appendix_bound_ratio(const Point& x, double lambda, double lambda_bar, double delta_bar, const Point& y,
                            double p, const ShellQuadrature& quad = {});

/// The shell integral itself (numerator of appendix_bound_ratio).
double kernel_shell_integral(const Point& x, double lambda, double outer_radius, const Point& y, double p,
                             const ShellQuadrature& quad = {});

}  // namespace movsph
