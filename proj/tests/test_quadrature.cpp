#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "movsph/gauss_legendre.hpp"
#include "movsph/geometry.hpp"
#include "movsph/quadrature.hpp"
#include "support.hpp"

using namespace movsph;
using movsph::testing::rel;

namespace {

// int_{S^{n-1}} |rho e - r theta|^p dsigma by tanh-sinh in the polar angle.
double angular_oracle(double rho, double r, double p, int n) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const auto g = [&](double t) {
    const double s = std::sin(t);
    return std::pow(rho * rho + r * r - 2.0 * rho * r * std::cos(t), 0.5 * p) * std::pow(s, n - 2.0);
  };
  return unit_sphere_area(n - 1) * ts.integrate(g, 0.0, std::numbers::pi);
}

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (std::size_t order : {1u, 2u, 5u, 16u, 40u}) {
    const auto& gl = gauss_legendre(order);
    double wsum = 0.0;
    for (double w : gl.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (std::size_t k = 0; k <= 2 * order - 1; k += 2) {
      double s = 0.0;
      for (std::size_t i = 0; i < order; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], static_cast<double>(k));
      CHECK(s == doctest::Approx(2.0 / (k + 1.0)).epsilon(1e-13));
    }
  }
  const auto comp = composite_gauss_legendre(0.0, 3.0, 7, 8);
  double s = 0.0;
  for (std::size_t i = 0; i < comp.size(); ++i) s += comp.weights[i] * std::exp(comp.nodes[i]);
  CHECK(s == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("radial grid volume") {
  for (int n : {2, 3, 5}) {
    const auto g = RadialGrid::geometric({n, 1e-4, 1e4, 256, 16});
    CHECK(g.size() == 256);
    const double vol = unit_sphere_area(n) * std::pow(1e4, n) / n;
    CHECK(rel(g.ball_volume_estimate(), vol) < 1e-12);
    CHECK(g.matches(g.nodes()));
  }
  CHECK_THROWS_AS(RadialGrid::geometric({3, 1.0, 0.5, 256, 16}), DomainError);
  CHECK_THROWS_AS(RadialGrid::geometric({3, 1e-4, 1e4, 250, 16}), DomainError);
}

TEST_CASE("angular kernel against closed form and tanh-sinh") {
  for (double p : {0.5, 1.3, 2.0, 3.0, 4.7}) {
    for (double rho : {0.01, 0.7, 1.0, 3.0}) {
      for (double r : {0.02, 0.69, 1.0, 2.0, 50.0}) {
        // n = 3: 2 pi ((rho+r)^{p+2} - |rho-r|^{p+2}) / ((p+2) rho r)
        const double exact =
            2.0 * std::numbers::pi * (std::pow(rho + r, p + 2) - std::pow(std::abs(rho - r), p + 2)) / ((p + 2) * rho * r);
        CHECK(rel(angular_kernel(rho, r, p, 3), exact) < 1e-9);
        CHECK(rel(angular_kernel(rho, r, p, 4), angular_oracle(rho, r, p, 4)) < 1e-9);
        CHECK(rel(angular_kernel(rho, r, p, 2), angular_oracle(rho, r, p, 2)) < 1e-6);
      }
    }
  }
  const AngularKernel k(2.0, 5);
  CHECK(rel(k(1.5, 2.5), unit_sphere_area(5) * (1.5 * 1.5 + 2.5 * 2.5)) < 1e-13);
}

TEST_CASE("radial field interpolation") {
  std::vector<double> r, u;
  for (int i = 0; i <= 40; ++i) {
    r.push_back(std::pow(10.0, -2.0 + 0.1 * i));
    u.push_back(3.0 * (1.0 + r.back() * r.back()));
  }
  const RadialField f(r, u, 3);
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(f(r[i]) == doctest::Approx(u[i]).epsilon(1e-14));
  CHECK(rel(f(0.55), 3.0 * (1.0 + 0.55 * 0.55)) < 1e-3);
  CHECK(f(1e-6) == doctest::Approx(u.front()));
  CHECK(f.upper_tail_exponent() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(rel(f(1e3), 3.0 * (1.0 + 1e6)) < 1e-3);
  CHECK(rel(f.derivative(2.0), 12.0) < 1e-2);
  const RadialField g(r, u, 3, Point{1.0, 0.0, 0.0});
  CHECK(g.at(Point{1.0, 2.0, 0.0}) == doctest::Approx(f(2.0)));
  CHECK_THROWS_AS(RadialField({1.0, 2.0}, {1.0, -1.0}, 3), DomainError);
  CHECK_THROWS_AS(RadialField({2.0, 1.0}, {1.0, 1.0}, 3), DomainError);
}

TEST_CASE("interpolant preserves monotone data") {
  std::vector<double> r{0.1, 0.2, 0.3, 1.0, 1.1, 5.0}, u{1.0, 1.0, 1.0, 10.0, 10.0, 11.0};
  const RadialField f(r, u, 3);
  double prev = 0.0;
  for (double t = 0.1; t <= 5.0; t += 0.001) {
    const double v = f(t);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("moments of a Gaussian source") {
  const auto g = RadialGrid::geometric({3, 1e-4, 1e2, 256, 16});
  std::vector<double> s;
  for (double r : g.nodes()) s.push_back(std::exp(-r * r));
  const double pi32 = std::pow(std::numbers::pi, 1.5);
  CHECK(rel(radial_moment(g, s, 0.0).value, pi32) < 1e-10);
  CHECK(rel(radial_moment(g, s, 2.0).value, 1.5 * pi32) < 1e-10);
}

TEST_CASE("operator reproduces the bubble") {
  const int n = 3;
  const double p = 2.0;
  const auto grid = RadialGrid::geometric({n, 1e-4, 1e4, 256, 16});
  const IntegralOperator op(grid, p);
  const double c = testing::bubble_c(n, p, 2.0);
  const Nonlinearity f(HyderNgo{0.0, 2.0}, p, n);
  std::vector<double> u;
  for (double r : grid.nodes()) u.push_back(c * (1.0 + r * r));
  const auto out = op.apply(f, u);
  CHECK(out.tail_convergent);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(rel(out.values[i], u[i]) < 1e-9);
}

TEST_CASE("operator against nested exp-sinh quadrature for non-even p") {
  const int n = 3;
  const double p = 1.3, gamma = 7.4;
  const auto grid = RadialGrid::geometric({n, 1e-4, 1e4, 256, 16});
  const IntegralOperator op(grid, p);
  std::vector<double> s;
  for (double r : grid.nodes()) s.push_back(std::pow(1.0 + r * r, -0.5 * gamma));
  const std::vector<double> rho{0.0, 0.5, 2.0, 30.0};
  const auto out = op.apply_source_at(s, rho);
  boost::math::quadrature::exp_sinh<double> es;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const auto g = [&](double r) {
      if (r == 0.0 || r > 1e30) return 0.0;
      const double a = rho[k] == 0.0 ? unit_sphere_area(n) * std::pow(r, p)
                                     : 2.0 * std::numbers::pi *
                                           (std::pow(rho[k] + r, p + 2) - std::pow(std::abs(rho[k] - r), p + 2)) /
                                           ((p + 2) * rho[k] * r);
      return a * std::pow(1.0 + r * r, -0.5 * gamma) * r * r;
    };
    const double want = es.integrate(g);
    CHECK(rel(out.values[k], want) < 1e-6);
  }
}

TEST_CASE("parallel and serial operator application agree bitwise") {
  const auto grid = RadialGrid::geometric({3, 1e-4, 1e4, 256, 16});
  const IntegralOperator par(grid, 1.7, {}, IntegralOperator::Execution::Parallel);
  const IntegralOperator ser(grid, 1.7, {}, IntegralOperator::Execution::Serial);
  std::vector<double> s;
  for (double r : grid.nodes()) s.push_back(std::pow(1.0 + r, -9.0));
  const auto a = par.apply_source(s);
  const auto b = ser.apply_source_serial(s);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("slowly decaying sources are flagged truncated") {
  const auto grid = RadialGrid::geometric({3, 1e-4, 1e4, 256, 16});
  const IntegralOperator op(grid, 2.0);
  std::vector<double> s(grid.size(), 1.0);
  CHECK_FALSE(op.apply_source(s).tail_convergent);
  const Nonlinearity f(HyderNgo{0.0, 2.0}, 2.0, 3);
  std::vector<double> u(grid.size(), 1.0);
  const auto chk = integrability_check(grid, u, f);
  CHECK_FALSE(chk.convergent);
}
