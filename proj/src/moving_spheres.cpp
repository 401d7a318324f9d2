#include "movsph/moving_spheres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <omp.h>

#include "movsph/errors.hpp"
#include "movsph/gauss_legendre.hpp"
#include "movsph/rng.hpp"

namespace movsph {

ScalarField as_field(const RadialField& u) {
  return [u](const Point& y) { return u.at(y); };
}

// ---------------------------------------------------------------------------
// Kernel K and deficiency H

namespace {

void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.dim() != b.dim()) throw DomainError(std::string(what) + ": dimension mismatch");
}

// A^p - B^p where A^2 = B^2 + d, d = (|xi-x|^2 - lam^2)(|z-x|^2 - lam^2) / lam^2,
// written so that nothing cancels when d << B^2.
double kernel_from_parts(double d, double b2, double p) {
  if (b2 == 0.0) return std::pow(std::max(d, 0.0), 0.5 * p);
  return std::pow(b2, 0.5 * p) * std::expm1(0.5 * p * std::log1p(d / b2));
}

// (r1^2 - lam^2) without cancellation at r1 ~ lam.
double shifted_square(double r1, double lambda) { return (r1 - lambda) * (r1 + lambda); }

}  // namespace

double kernel_K(const Point& x, double lambda, const Point& xi, const Point& z, double p) {
  require_same_dim(x, xi, "kernel_K");
  require_same_dim(x, z, "kernel_K");
  const InversionSphere sphere(x, lambda);
  const double rz = guarded_offset_norm(sphere, z);
  const double rxi = guarded_offset_norm(sphere, xi);
  if (!(p > 0.0)) throw DomainError("kernel_K: p must be positive");
  const double d = shifted_square(rxi, lambda) * shifted_square(rz, lambda) / (lambda * lambda);
  return kernel_from_parts(d, (xi - z).norm2(), p);
}

double kernel_K_second_form(const Point& x, double lambda, const Point& xi, const Point& z, double p) {
  require_same_dim(x, xi, "kernel_K");
  require_same_dim(x, z, "kernel_K");
  const InversionSphere sphere(x, lambda);
  guarded_offset_norm(sphere, xi);
  const Point z_inv = invert(sphere, z);
  return std::pow(distance(xi, z_inv), p) * kelvin_scale(sphere, p, z) - std::pow(distance(xi, z), p);
}

double kernel_K_p2(const Point& x, double lambda, const Point& xi, const Point& z) {
  require_same_dim(x, xi, "kernel_K_p2");
  require_same_dim(x, z, "kernel_K_p2");
  const double l2 = lambda * lambda;
  return ((z - x).norm2() - l2) * ((xi - x).norm2() - l2) / l2;
}

double deficiency_H(const ScalarField& u, const Nonlinearity& f, const Point& x, double lambda, const Point& z) {
  require_same_dim(x, z, "deficiency_H");
  const double d = distance(z, x);
  if (!(d > lambda)) throw DomainError("deficiency_H: requires |z - x| > lambda");
  const InversionSphere sphere(x, lambda);
  const Point zi = invert(sphere, z);
  const double t = lambda / d;
  return f(z.norm(), u(z)) - std::pow(t, f.p() + 2.0 * f.n()) * f(zi.norm(), u(zi));
}

double kelvin_diff_direct(const ScalarField& u, const Point& x, double lambda, double p, const Point& y) {
  require_same_dim(x, y, "kelvin_diff_direct");
  const InversionSphere sphere(x, lambda);
  const double d = guarded_offset_norm(sphere, y);
  if (d < lambda * (1.0 - 1e-9)) throw DomainError("kelvin_diff_direct: requires |y - x| >= lambda");
  return kelvin_value(u, sphere, p, y) - u(y);
}

// ---------------------------------------------------------------------------
// Sphere rules

namespace {

// Rule on S^{m-1} in R^m with pole e_0, as flat coordinate rows.
void build_sphere(std::size_t m, std::size_t polar, std::size_t azimuth, std::vector<std::vector<double>>& pts,
                  std::vector<double>& w) {
  pts.clear();
  w.clear();
  if (m == 2) {
    const double h = 2.0 * std::numbers::pi / static_cast<double>(azimuth);
    for (std::size_t k = 0; k < azimuth; ++k) {
      const double phi = h * (static_cast<double>(k) + 0.5);
      pts.push_back({std::cos(phi), std::sin(phi)});
      w.push_back(h);
    }
    return;
  }
  std::vector<std::vector<double>> sub_pts;
  std::vector<double> sub_w;
  build_sphere(m - 1, polar, azimuth, sub_pts, sub_w);
  const GaussLegendreRule& gl = gauss_legendre(polar);
  const double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t j = 0; j < polar; ++j) {
    const double theta = half_pi * (gl.nodes[j] + 1.0);
    const double st = std::sin(theta), ct = std::cos(theta);
    const double wt = half_pi * gl.weights[j] * std::pow(st, static_cast<double>(m - 2));
    for (std::size_t k = 0; k < sub_pts.size(); ++k) {
      std::vector<double> row(m);
      row[0] = ct;
      for (std::size_t i = 0; i + 1 < m; ++i) row[i + 1] = st * sub_pts[k][i];
      pts.push_back(std::move(row));
      w.push_back(wt * sub_w[k]);
    }
  }
}

// Householder reflection taking e_0 to the unit vector `a`.
Point reflect_pole(const Point& v, const Point& a) {
  Point e = Point::axis(a.dim(), 0);
  const Point d = e - a;
  const double dd = d.norm2();
  if (dd < 1e-30) return v;
  return v - d * (2.0 * d.dot(v) / dd);
}

}  // namespace

SphereRule sphere_quadrature(std::size_t n, std::size_t polar_order, std::size_t azimuth_order, const Point& pole) {
  if (n < 2 || n > kMaxDim) throw DomainError("sphere_quadrature: dimension out of range");
  if (polar_order < 1 || azimuth_order < 1) throw DomainError("sphere_quadrature: orders must be >= 1");
  if (pole.dim() != n) throw DomainError("sphere_quadrature: pole dimension mismatch");
  const double pn = pole.norm();
  if (!(pn > 0.0)) throw DomainError("sphere_quadrature: pole must be nonzero");
  const Point a = pole * (1.0 / pn);
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  build_sphere(n, polar_order, azimuth_order, pts, w);
  SphereRule rule;
  rule.directions.reserve(pts.size());
  rule.weights = std::move(w);
  for (const auto& row : pts) rule.directions.push_back(reflect_pole(Point::from_span(row), a));
  return rule;
}

std::vector<Point> design_directions(std::size_t n) {
  if (n < 2 || n > kMaxDim) throw DomainError("design_directions: dimension out of range");
  std::vector<Point> dirs;
  const auto push = [&](Point p) { dirs.push_back(p * (1.0 / p.norm())); };
  if (n == 3) {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const double iphi = 1.0 / phi;
    for (double s1 : {-1.0, 1.0}) {
      for (double s2 : {-1.0, 1.0}) {
        push({0.0, s1, s2 * phi});
        push({s1, s2 * phi, 0.0});
        push({s2 * phi, 0.0, s1});
        push({0.0, s1 * iphi, s2 * phi});
        push({s1 * iphi, s2 * phi, 0.0});
        push({s2 * phi, 0.0, s1 * iphi});
        for (double s3 : {-1.0, 1.0}) push({s1, s2, s3});
      }
    }
    return dirs;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (double s : {-1.0, 1.0}) push(Point::axis(n, i, s));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (double si : {-1.0, 1.0})
        for (double sj : {-1.0, 1.0}) {
          Point p = Point::axis(n, i, si);
          p[j] = sj;
          push(p);
        }
  return dirs;
}

namespace {

std::vector<Point> directions_with_extras(std::size_t n, std::size_t extra, std::uint64_t seed) {
  std::vector<Point> dirs = design_directions(n);
  Rng rng = make_stream(seed, 0xD1EC7u);
  for (std::size_t k = 0; k < extra; ++k) dirs.push_back(random_direction(rng, n));
  return dirs;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  std::vector<double> r(count);
  if (count == 1) {
    r[0] = lo;
    return r;
  }
  for (std::size_t k = 0; k < count; ++k)
    r[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(count - 1));
  r.front() = lo;
  return r;
}

}  // namespace

std::vector<Point> probe_points(const Point& x, double lambda, const ProbeConfig& cfg) {
  if (!(lambda > 0.0)) throw DomainError("probe_points: lambda must be positive");
  if (cfg.shells < 1 || !(cfg.ratio_max >= 1.0)) throw DomainError("probe_points: invalid probe configuration");
  const auto dirs = directions_with_extras(x.dim(), cfg.extra_directions, cfg.seed);
  const auto radii = log_spaced(lambda, lambda * cfg.ratio_max, cfg.shells);
  std::vector<Point> pts;
  pts.reserve(dirs.size() * radii.size());
  for (double r : radii)
    for (const Point& d : dirs) pts.push_back(x + d * r);
  return pts;
}

// ---------------------------------------------------------------------------
// Exterior quadrature

namespace {

struct RadialNodes {
  std::vector<double> s;  // log(R / lambda)
  std::vector<double> w;
};

// Composite GL on [a, b] with panel boundaries forced at every cut strictly
// inside; panels are shared out in proportion to segment length.
RadialNodes radial_nodes(double a, double b, std::vector<double> cuts, std::size_t panels, std::size_t order) {
  std::vector<double> edges{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > edges.back() + 1e-9 * (b - a) && c < b - 1e-9 * (b - a)) edges.push_back(c);
  edges.push_back(b);
  RadialNodes out;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double len = edges[k + 1] - edges[k];
    const auto np = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(panels) * len / (b - a))));
    const auto rule = composite_gauss_legendre(edges[k], edges[k + 1], np, order);
    out.s.insert(out.s.end(), rule.nodes.begin(), rule.nodes.end());
    out.w.insert(out.w.end(), rule.weights.begin(), rule.weights.end());
  }
  return out;
}

// The source f(|z|, .) and its Kelvin image both concentrate on the ray from
// x through the origin, at |z - x| = |x| and lam^2 / |x|.
Point feature_pole(const Point& x, const Point& fallback) { return x.norm() > 0.0 ? -x : fallback; }

std::vector<double> feature_cuts(const Point& x, double lambda, double target) {
  std::vector<double> cuts{std::log(target / lambda)};
  const double xn = x.norm();
  if (xn > 0.0) {
    for (double c : {std::log(xn / lambda), std::log(lambda / xn)})
      for (double off : {-1.5, -0.5, 0.0, 0.5, 1.5}) cuts.push_back(c + off);
  }
  return cuts;
}

// Power-law tail of a radial integrand g(R) known at the last two nodes.
bool power_tail(double r0, double g0, double r1, double g1, double r_out, double& tail) {
  tail = 0.0;
  if (g1 == 0.0) return true;
  if (!(g0 * g1 > 0.0)) return false;
  const double beta = -std::log(g1 / g0) / std::log(r1 / r0);
  if (!(beta > 1.0)) return false;
  tail = g1 * std::pow(r1, beta) * std::pow(r_out, 1.0 - beta) / (beta - 1.0);
  return true;
}

template <class ShellFn>
QuadratureValue integrate_shells(const RadialNodes& nodes, double lambda, double r_out, std::size_t n, bool parallel,
                                 const ShellFn& shell) {
  const std::size_t m = nodes.s.size();
  std::vector<double> g(m);  // shell integral times R^{n-1}
  std::exception_ptr failure;
  const auto body = [&](std::size_t j) {
    const double R = lambda * std::exp(nodes.s[j]);
    g[j] = shell(R) * std::pow(R, static_cast<double>(n) - 1.0);
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t j = 0; j < m; ++j) {
      try {
        body(j);
      } catch (...) {
#pragma omp critical(movsph_shell_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (std::size_t j = 0; j < m; ++j) body(j);
  }
  if (failure) std::rethrow_exception(failure);

  QuadratureValue out;
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) s += nodes.w[j] * lambda * std::exp(nodes.s[j]) * g[j];  // dR = R ds
  const double r0 = lambda * std::exp(nodes.s[m - 2]);
  const double r1 = lambda * std::exp(nodes.s[m - 1]);
  out.converged = power_tail(r0, g[m - 2], r1, g[m - 1], r_out, out.tail);
  out.value = s + out.tail;
  return out;
}

QuadratureValue kelvin_diff_kernel_impl(const ScalarField& u, const Nonlinearity& f, const Point& x, double lambda,
                                        const Point& y, const ExteriorQuadrature& quad, bool parallel) {
  require_same_dim(x, y, "kelvin_diff_kernel");
  if (static_cast<int>(x.dim()) != f.n()) throw DomainError("kelvin_diff_kernel: dimension mismatch with f");
  const InversionSphere sphere(x, lambda);
  const double dy = guarded_offset_norm(sphere, y);
  if (dy < lambda * (1.0 - 1e-9)) throw DomainError("kelvin_diff_kernel: requires |y - x| >= lambda");
  if (!(quad.outer_ratio > 1.0)) throw DomainError("kelvin_diff_kernel: outer_ratio must exceed 1");

  const double p = f.p();
  const std::size_t n = x.dim();
  const double pf = p + 2.0 * static_cast<double>(n);
  const double y_shift = shifted_square(dy, lambda) / (lambda * lambda);
  const SphereRule rule = sphere_quadrature(n, quad.polar_order, quad.azimuth_order, feature_pole(x, y - x));
  const RadialNodes nodes =
      radial_nodes(0.0, std::log(quad.outer_ratio), feature_cuts(x, lambda, dy), quad.radial_panels, quad.radial_order);

  const auto shell = [&](double R) {
    const double t = lambda / R;
    const double jac = std::pow(t, pf);
    const double dk = y_shift * shifted_square(R, lambda);
    double acc = 0.0;
    for (std::size_t d = 0; d < rule.directions.size(); ++d) {
      const Point z = x + rule.directions[d] * R;
      const double k = kernel_from_parts(dk, (y - z).norm2(), p);
      const Point zi = x + rule.directions[d] * (lambda * t);
      const double h = f(z.norm(), u(z)) - jac * f(zi.norm(), u(zi));
      acc += rule.weights[d] * k * h;
    }
    return acc;
  };
  return integrate_shells(nodes, lambda, lambda * quad.outer_ratio, n, parallel, shell);
}

}  // namespace

QuadratureValue kelvin_diff_kernel(const ScalarField& u, const Nonlinearity& f, const Point& x, double lambda,
                                   const Point& y, const ExteriorQuadrature& quad) {
  return kelvin_diff_kernel_impl(u, f, x, lambda, y, quad, true);
}

QuadratureValue kelvin_diff_kernel_serial(const ScalarField& u, const Nonlinearity& f, const Point& x,
                                          double lambda, const Point& y, const ExteriorQuadrature& quad) {
  return kelvin_diff_kernel_impl(u, f, x, lambda, y, quad, false);
}

QuadratureValue kelvin_value_integral(const ScalarField& u, const Nonlinearity& f, const Point& x, double lambda,
                                      const Point& xi, const ExteriorQuadrature& quad) {
  require_same_dim(x, xi, "kelvin_value_integral");
  if (static_cast<int>(x.dim()) != f.n()) throw DomainError("kelvin_value_integral: dimension mismatch with f");
  const InversionSphere sphere(x, lambda);
  const double dxi = guarded_offset_norm(sphere, xi);
  if (!(quad.inner_ratio > 0.0 && quad.inner_ratio < 1.0)) throw DomainError("kelvin_value_integral: bad inner_ratio");

  const double p = f.p();
  const std::size_t n = x.dim();
  const double pf = p + 2.0 * static_cast<double>(n);
  const SphereRule rule = sphere_quadrature(n, quad.polar_order, quad.azimuth_order, feature_pole(x, xi - x));
  // Inner shells (|z-x| < lambda) get half the panels of the exterior.
  const double s_lo = std::log(quad.inner_ratio);
  const double s_hi = std::log(quad.outer_ratio);
  const auto cuts = feature_cuts(x, lambda, dxi);
  RadialNodes inner = radial_nodes(s_lo, 0.0, cuts, std::max<std::size_t>(quad.radial_panels / 2, 1), quad.radial_order);
  RadialNodes outer = radial_nodes(0.0, s_hi, cuts, quad.radial_panels, quad.radial_order);
  RadialNodes all = inner;
  all.s.insert(all.s.end(), outer.s.begin(), outer.s.end());
  all.w.insert(all.w.end(), outer.w.begin(), outer.w.end());

  const auto shell = [&](double R) {
    const double t = lambda / R;
    const double jac = std::pow(t, pf);
    double acc = 0.0;
    for (std::size_t d = 0; d < rule.directions.size(); ++d) {
      const Point z = x + rule.directions[d] * R;
      const Point zi = x + rule.directions[d] * (lambda * t);
      acc += rule.weights[d] * jac * std::pow(distance(xi, z), p) * f(zi.norm(), u(zi));
    }
    return acc;
  };
  return integrate_shells(all, lambda, lambda * quad.outer_ratio, n, true, shell);
}

// ---------------------------------------------------------------------------
// lambda-bar

const char* to_string(LambdaBarStatus s) noexcept {
  switch (s) {
    case LambdaBarStatus::Ok: return "ok";
    case LambdaBarStatus::ZeroAtSmallLambda: return "zero_at_small_lambda";
    case LambdaBarStatus::ReachedHorizon: return "reached_horizon";
  }
  return "unknown";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::SymmetryCertified: return "SymmetryCertified";
    case Verdict::ViolationFound: return "ViolationFound";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

GapSample min_relative_gap(const ScalarField& u, const Point& x, double lambda, double p, const ProbeConfig& probes) {
  const auto pts = probe_points(x, lambda, probes);
  GapSample best;
  best.lambda = lambda;
  best.min_gap = std::numeric_limits<double>::infinity();
  for (const Point& y : pts) {
    const double uy = u(y);
    if (!(uy > 0.0)) throw DomainError("field must be positive at every probe");
    const double gap = kelvin_diff_direct(u, x, lambda, p, y) / uy;
    if (gap < best.min_gap) {
      best.min_gap = gap;
      best.argmin = y;
    }
  }
  return best;
}

namespace {

Witness gap_witness(const ScalarField& u, const Point& x, const GapSample& g, double p) {
  const InversionSphere sphere(x, g.lambda);
  Witness w;
  w.kind = "kelvin_gap";
  w.y = g.argmin;
  w.reference = invert(sphere, g.argmin);
  w.lhs = kelvin_value(u, sphere, p, g.argmin);
  w.rhs = u(g.argmin);
  w.lambda = g.lambda;
  return w;
}

}  // namespace

LambdaBarResult lambda_bar_estimate(const ScalarField& u, const Point& x, double p, const LambdaBarOptions& opts) {
  const double xn = x.norm();
  if (!(xn > 0.0)) throw DomainError("lambda_bar_estimate: x must be nonzero");
  if (!(p > 0.0)) throw DomainError("lambda_bar_estimate: p must be positive");
  if (!(opts.slack >= 0.0) || !(opts.resolution_rel > 0.0) || !(opts.start_rel > 0.0))
    throw DomainError("lambda_bar_estimate: invalid options");

  LambdaBarResult res;
  const auto holds = [&](double lam, GapSample& g) {
    g = min_relative_gap(u, x, lam, p, opts.probes);
    res.evaluated.push_back(g);
    return g.min_gap >= -opts.slack;
  };

  GapSample g;
  double lo = opts.start_rel * xn;
  if (!holds(lo, g)) {
    res.status = LambdaBarStatus::ZeroAtSmallLambda;
    res.estimate = 0.0;
    res.witness = gap_witness(u, x, g, p);
    return res;
  }

  const double horizon = opts.horizon_rel * std::max(xn, 1.0);
  double hi = lo;
  GapSample failing;
  for (;;) {
    const double cand = std::min(2.0 * hi, horizon);
    if (holds(cand, g)) {
      lo = cand;
      hi = cand;
      if (cand >= horizon) {
        res.status = LambdaBarStatus::ReachedHorizon;
        res.estimate = horizon;
        return res;
      }
    } else {
      hi = cand;
      failing = g;
      break;
    }
  }

  for (int it = 0; it < opts.max_bisect && hi - lo > opts.resolution_rel * xn; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid, g)) {
      lo = mid;
    } else {
      hi = mid;
      failing = g;
    }
  }
  res.estimate = lo;
  res.witness = gap_witness(u, x, failing, p);
  return res;
}

MovingSphereReport moving_sphere_scan(const ScalarField& u, const Point& x, double p, const LambdaBarOptions& opts,
                                      double rel_tol) {
  const LambdaBarResult lb = lambda_bar_estimate(u, x, p, opts);
  MovingSphereReport rep;
  rep.x = x;
  rep.lambda_bar_est = lb.estimate;
  rep.status = lb.status;
  std::vector<GapSample> sorted = lb.evaluated;
  std::sort(sorted.begin(), sorted.end(), [](const GapSample& a, const GapSample& b) { return a.lambda < b.lambda; });
  for (const auto& s : sorted) {
    rep.lambda_values.push_back(s.lambda);
    rep.min_gap.push_back(s.min_gap);
  }
  const double target = x.norm() * (1.0 - rel_tol);
  if (lb.status != LambdaBarStatus::ZeroAtSmallLambda && lb.estimate >= target) {
    rep.verdict = Verdict::SymmetryCertified;
  } else {
    rep.verdict = Verdict::ViolationFound;
    rep.witness = lb.witness;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Small-radius monotonicity

namespace {

double grad_log_norm(const ScalarField& u, const Point& y, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.dim(); ++i) {
    Point a = y, b = y;
    a[i] += h;
    b[i] -= h;
    const double g = (std::log(u(a)) - std::log(u(b))) / (2.0 * h);
    s += g * g;
  }
  return std::sqrt(s);
}

}  // namespace

MonotonicityReport small_lambda_monotonicity(const ScalarField& u, const Point& x, double p, const Point& theta,
                                             double r_max_probe, const MonotonicityOptions& opts) {
  if (!(p > 0.0)) throw DomainError("small_lambda_monotonicity: p must be positive");
  if (!(r_max_probe > 0.0)) throw DomainError("small_lambda_monotonicity: r_max_probe must be positive");
  if (theta.dim() != x.dim() || !(theta.norm() > 0.0))
    throw DomainError("small_lambda_monotonicity: theta must be a nonzero vector in R^n");
  if (opts.samples < 2 || opts.gradient_shells < 1) throw DomainError("small_lambda_monotonicity: bad options");
  const Point dir = theta * (1.0 / theta.norm());

  // sup |grad log u| over B(x, r_max_probe), sampled on shells of design directions.
  std::vector<Point> pts{x};
  const auto dirs = design_directions(x.dim());
  for (std::size_t k = 1; k <= opts.gradient_shells; ++k) {
    const double r = r_max_probe * static_cast<double>(k) / static_cast<double>(opts.gradient_shells);
    for (const Point& d : dirs) pts.push_back(x + d * r);
  }
  for (std::size_t k = 1; k <= opts.samples; ++k)
    pts.push_back(x + dir * (r_max_probe * static_cast<double>(k) / static_cast<double>(opts.samples)));

  MonotonicityReport rep;
  double g_fine = 0.0, g_coarse = 0.0;
  for (const Point& y : pts) {
    const double h = opts.fd_step * std::max(1.0, y.norm());
    g_fine = std::max(g_fine, grad_log_norm(u, y, h));
    g_coarse = std::max(g_coarse, grad_log_norm(u, y, 2.0 * h));
  }
  rep.grad_log_sup = g_fine;
  if (std::abs(g_fine - g_coarse) > opts.stability_tol * std::max(g_fine, 1e-300) && g_fine > 1e-12)
    rep.inconclusive = true;

  rep.interval_end = g_fine > 0.0 ? std::min(1.0, p / (2.0 * g_fine)) : 1.0;
  rep.interval_end = std::min(rep.interval_end, r_max_probe);

  const auto g = [&](double r) { return std::pow(r, -0.5 * p) * u(x + dir * r); };
  double prev = g(rep.interval_end / static_cast<double>(opts.samples));
  rep.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k <= opts.samples; ++k) {
    const double cur = g(rep.interval_end * static_cast<double>(k) / static_cast<double>(opts.samples));
    rep.max_increase = std::max(rep.max_increase, (cur - prev) / prev);
    prev = cur;
  }
  rep.decreasing = rep.max_increase <= 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Reflection / ray symmetry

SymmetryReport symmetry_verdict(const ScalarField& u, std::size_t n, const SymmetryOptions& opts) {
  if (!(opts.r_min > 0.0) || !(opts.r_max > opts.r_min) || !(opts.tol >= 0.0))
    throw DomainError("symmetry_verdict: invalid options");
  const auto dirs = directions_with_extras(n, opts.extra_directions, opts.seed);
  const auto radii = log_spaced(opts.r_min, opts.r_max, opts.shells);

  SymmetryReport rep;
  rep.probes = dirs.size() * radii.size();
  double worst_reflection = 0.0, worst_ray = 0.0;
  std::optional<Witness> reflection_w, ray_w;

  for (const Point& d : dirs) {
    double prev_u = 0.0;
    Point prev_y(n);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const Point y = d * radii[k];
      const Point ym = -y;
      const double uy = u(y), um = u(ym);
      if (!(uy > 0.0) || !(um > 0.0)) throw DomainError("symmetry_verdict: field must be positive");
      ++rep.reflection_checks;
      const double excess = (uy - um) / um;
      rep.max_reflection_excess = std::max(rep.max_reflection_excess, excess);
      if (excess > opts.tol && excess > worst_reflection) {
        worst_reflection = excess;
        reflection_w = Witness{"reflection", y, ym, uy, um, 0.0};
      }
      if (k > 0) {
        ++rep.ray_checks;
        const double drop = (prev_u - uy) / prev_u;
        rep.max_ray_drop = std::max(rep.max_ray_drop, drop);
        if (drop > opts.tol && drop > worst_ray) {
          worst_ray = drop;
          ray_w = Witness{"ray", y, prev_y, uy, prev_u, 0.0};
        }
      }
      prev_u = uy;
      prev_y = y;
    }
  }

  if (rep.probes < opts.min_probes) {
    rep.verdict = Verdict::Inconclusive;
  } else if (reflection_w || ray_w) {
    rep.verdict = Verdict::ViolationFound;
    rep.witness = reflection_w ? reflection_w : ray_w;
  } else {
    rep.verdict = Verdict::SymmetryCertified;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Shell integral of K

double kernel_shell_integral(const Point& x, double lambda, double outer_radius, const Point& y, double p,
                             const ShellQuadrature& quad) {
  require_same_dim(x, y, "kernel_shell_integral");
  if (!(lambda > 0.0) || !(outer_radius > lambda)) throw DomainError("kernel_shell_integral: need 0 < lambda < outer");
  const InversionSphere sphere(x, lambda);
  const double dy = guarded_offset_norm(sphere, y);
  const std::size_t n = x.dim();
  const double y_shift = shifted_square(dy, lambda) / (lambda * lambda);
  const SphereRule rule = sphere_quadrature(n, quad.polar_order, quad.azimuth_order, y - x);

  // Radial GL in R on [lambda, outer], split at |y - x| where |y - z|^p has its kink.
  std::vector<double> nodes, weights;
  const auto append = [&](double a, double b) {
    const auto r = composite_gauss_legendre(a, b, 1, quad.radial_order);
    nodes.insert(nodes.end(), r.nodes.begin(), r.nodes.end());
    weights.insert(weights.end(), r.weights.begin(), r.weights.end());
  };
  if (dy > lambda && dy < outer_radius) {
    append(lambda, dy);
    append(dy, outer_radius);
  } else {
    append(lambda, outer_radius);
  }

  std::vector<double> shell(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double R = nodes[j];
    const double dk = y_shift * shifted_square(R, lambda);
    double acc = 0.0;
    for (std::size_t d = 0; d < rule.directions.size(); ++d) {
      const Point z = x + rule.directions[d] * R;
      acc += rule.weights[d] * kernel_from_parts(dk, (y - z).norm2(), p);
    }
    shell[j] = acc * std::pow(R, static_cast<double>(n) - 1.0);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * shell[j];
  return s;
}

double appendix_bound_ratio(const Point& x, double lambda, double lambda_bar, double delta_bar, const Point& y,
                            double p, const ShellQuadrature& quad) {
  require_same_dim(x, y, "appendix_bound_ratio");
  if (!(lambda > 0.0) || !(delta_bar > 0.0) || !(p > 0.0)) throw DomainError("appendix_bound_ratio: invalid parameters");
  const double outer = lambda_bar + delta_bar;
  const double d = distance(y, x);
  if (d < lambda * (1.0 - 1e-12) || d > outer * (1.0 + 1e-12))
    throw DomainError("appendix_bound_ratio: requires lambda <= |y - x| <= lambda_bar + delta_bar");
  Point yy = y;
  double dist = d;
  if (d - lambda < 1e-6 * lambda) {
    // 0/0 at the sphere: evaluate the limit just outside it.
    dist = lambda * (1.0 + 1e-6);
    yy = x + (y - x) * (dist / d);
  }
  return kernel_shell_integral(x, lambda, outer, yy, p, quad) / (dist - lambda);
}

}  // namespace movsph
