#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "movsph/moving_spheres.hpp"
#include "support.hpp"

using namespace movsph;
using movsph::testing::rel;

namespace {

const Nonlinearity kF(HyderNgo{0.0, 2.0}, 2.0, 3);
const ScalarField kBubble = testing::exact_bubble(3, 2.0, 2.0);

}  // namespace

TEST_CASE("kernel golden value and forms") {
  const Point x{0.0, 0.0, 0.0}, xi{2.0, 0.0, 0.0}, z{0.0, 3.0, 0.0};
  CHECK(kernel_K(x, 1.0, xi, z, 2.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(kernel_K_second_form(x, 1.0, xi, z, 2.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(kernel_K_p2(x, 1.0, xi, z) == 24.0);
  Rng rng = make_stream(1, 0);
  for (int i = 0; i < 2000; ++i) {
    const Point c = random_direction(rng, 3) * log_uniform(rng, 0.1, 10.0);
    const double lam = log_uniform(rng, 0.1, 10.0);
    const Point a = c + random_direction(rng, 3) * (lam * log_uniform(rng, 1.0 + 1e-6, 10.0));
    const Point b = c + random_direction(rng, 3) * (lam * log_uniform(rng, 1.0 + 1e-6, 10.0));
    const double p = uniform(rng, 0.2, 5.0);
    const double k1 = kernel_K(c, lam, a, b, p);
    CHECK(k1 > 0.0);
    CHECK(rel(k1, kernel_K_second_form(c, lam, a, b, p)) < 1e-10);
    const Point on = c + random_direction(rng, 3) * lam;
    CHECK(std::abs(kernel_K(c, lam, on, b, p)) <= 1e-12 * std::pow(distance(on, b), p));
  }
}

TEST_CASE("deficiency vanishes for the bubble only on its critical sphere") {
  const Point x{1.0, 0.5, 0.0};
  const double lbar = std::sqrt(1.0 + x.norm2());
  const ScalarField u = kBubble;
  for (const Point& d : design_directions(3)) {
    const Point z = x + d * (2.0 * lbar);
    CHECK(std::abs(deficiency_H(u, kF, x, lbar, z)) < 1e-12 * kF(z.norm(), u(z)));
    CHECK(deficiency_H(u, kF, x, 0.5 * lbar, z) > 0.0);
  }
  CHECK_THROWS_AS(deficiency_H(u, kF, x, 1.0, x + Point{0.5, 0.0, 0.0}), DomainError);
}

TEST_CASE("sphere quadrature") {
  for (std::size_t n : {2u, 3u, 4u, 5u}) {
    Point pole(n);
    for (std::size_t i = 0; i < n; ++i) pole[i] = 1.0 + static_cast<double>(i);
    const auto rule = sphere_quadrature(n, 24, 16, pole);
    double w = 0.0, second = 0.0, first = 0.0;
    const Point a = pole * (1.0 / pole.norm());
    for (std::size_t k = 0; k < rule.weights.size(); ++k) {
      CHECK(rule.directions[k].norm() == doctest::Approx(1.0).epsilon(1e-14));
      w += rule.weights[k];
      const double t = rule.directions[k].dot(a);
      first += rule.weights[k] * t;
      second += rule.weights[k] * t * t;
    }
    const double area = unit_sphere_area(static_cast<int>(n));
    CHECK(rel(w, area) < 1e-13);
    CHECK(std::abs(first) < 1e-12);
    CHECK(rel(second, area / static_cast<double>(n)) < 1e-12);
  }
  CHECK_THROWS_AS(sphere_quadrature(3, 4, 4, Point{0.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("design directions") {
  const auto d3 = design_directions(3);
  CHECK(d3.size() == 32);
  for (std::size_t n : {2u, 3u, 4u, 6u}) {
    const auto d = design_directions(n);
    Point sum(n);
    for (const Point& v : d) {
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-15));
      sum = sum + v;
      bool antipode = false;
      for (const Point& w : d) antipode = antipode || (v + w).norm() < 1e-14;
      CHECK(antipode);
    }
    CHECK(sum.norm() < 1e-13);
  }
}

TEST_CASE("representation identity on the exact bubble") {
  Rng rng = make_stream(2, 0);
  for (int i = 0; i < 5; ++i) {
    const Point x = random_direction(rng, 3) * log_uniform(rng, 0.2, 5.0);
    const double lam = uniform(rng, 0.1, 1.5) * x.norm();
    const Point y = x + random_direction(rng, 3) * (lam * log_uniform(rng, 1.01, 20.0));
    const auto q = kelvin_diff_kernel(kBubble, kF, x, lam, y);
    CHECK(q.converged);
    CHECK(std::abs(q.value - kelvin_diff_direct(kBubble, x, lam, 2.0, y)) / kBubble(y) < 1e-4);
    const InversionSphere s(x, lam);
    const auto v = kelvin_value_integral(kBubble, kF, x, lam, y);
    CHECK(rel(v.value, kelvin_value(kBubble, s, 2.0, y)) < 1e-4);
  }
}

TEST_CASE("representation identity with non-even p") {
  const double p = 1.5, q = 2.0;
  const Nonlinearity f(HyderNgo{0.0, q}, p, 3);
  const ScalarField u = testing::exact_bubble(3, p, q);
  const Point x{0.4, -0.3, 0.8};
  const double lam = 0.6;
  const Point y = x + Point{0.9, 0.2, -0.1};
  const auto r = kelvin_diff_kernel(u, f, x, lam, y);
  CHECK(std::abs(r.value - kelvin_diff_direct(u, x, lam, p, y)) / u(y) < 1e-3);
}

TEST_CASE("parallel and serial exterior quadrature agree bitwise") {
  const Point x{1.0, 0.0, 0.0}, y{2.0, 0.5, 0.0};
  const auto a = kelvin_diff_kernel(kBubble, kF, x, 0.7, y);
  const auto b = kelvin_diff_kernel_serial(kBubble, kF, x, 0.7, y);
  CHECK(a.value == b.value);
  CHECK(a.tail == b.tail);
}

TEST_CASE("critical radius of the bubble") {
  for (const Point& x : {Point{1.0, 2.0, 0.5}, Point{0.1, 0.0, 0.0}, Point{-7.0, 3.0, 1.0}}) {
    const auto lb = lambda_bar_estimate(kBubble, x, 2.0);
    CHECK(lb.status == LambdaBarStatus::Ok);
    CHECK(std::abs(lb.estimate - std::sqrt(1.0 + x.norm2())) <= 2e-4 * x.norm());
    REQUIRE(lb.witness.has_value());
    CHECK(lb.witness->lhs < lb.witness->rhs);
  }
  CHECK_THROWS_AS(lambda_bar_estimate(kBubble, Point{0.0, 0.0, 0.0}, 2.0), DomainError);
}

TEST_CASE("moving sphere verdicts") {
  const Point x{1.0, 2.0, 0.5};
  CHECK(moving_sphere_scan(kBubble, x, 2.0).verdict == Verdict::SymmetryCertified);
  const ScalarField shifted = testing::exact_bubble(3, 2.0, 2.0, Point{2.0, 0.0, 0.0});
  const auto rep = moving_sphere_scan(shifted, Point{4.0, 0.0, 0.0}, 2.0);
  CHECK(rep.verdict == Verdict::ViolationFound);
  CHECK(rep.lambda_bar_est == doctest::Approx(std::sqrt(5.0)).epsilon(1e-3));
  REQUIRE(rep.witness.has_value());
  CHECK(rep.lambda_values.size() == rep.min_gap.size());
  CHECK(std::is_sorted(rep.lambda_values.begin(), rep.lambda_values.end()));
}

TEST_CASE("small-radius monotonicity") {
  const Point x{1.0, 0.0, 0.0};
  const auto rep = small_lambda_monotonicity(kBubble, x, 2.0, Point{-1.0, 0.0, 0.0}, 1.0);
  CHECK_FALSE(rep.inconclusive);
  CHECK(rep.grad_log_sup == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.interval_end <= 1.0);
  CHECK(rep.decreasing);
  CHECK_THROWS_AS(small_lambda_monotonicity(kBubble, x, 2.0, Point{0.0, 0.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("reflection and ray symmetry") {
  CHECK(symmetry_verdict(kBubble, 3).verdict == Verdict::SymmetryCertified);
  const auto shifted = symmetry_verdict(testing::exact_bubble(3, 2.0, 2.0, Point{0.5, 0.0, 0.0}), 3);
  CHECK(shifted.verdict == Verdict::ViolationFound);
  REQUIRE(shifted.witness.has_value());
  CHECK(shifted.witness->lhs > shifted.witness->rhs);
  SymmetryOptions few;
  few.shells = 1;
  CHECK(symmetry_verdict(kBubble, 3, few).verdict == Verdict::Inconclusive);
  const ScalarField decreasing = [](const Point& y) { return 1.0 / (1.0 + y.norm2()); };
  CHECK(symmetry_verdict(decreasing, 3).verdict == Verdict::ViolationFound);
}

TEST_CASE("shell integral against the p = 2 closed form") {
  // K = (R^2 - lam^2)(d^2 - lam^2)/lam^2 with R = |z - x|, d = |y - x|.
  const Point x{0.3, 0.1, -0.2};
  const double lam = 0.8, outer = 2.5;
  for (double d : {0.8 * 1.1, 1.3, 2.0}) {
    const Point y = x + Point{0.0, d, 0.0};
    const double radial = (std::pow(outer, 5) - std::pow(lam, 5)) / 5.0 - lam * lam * (std::pow(outer, 3) - std::pow(lam, 3)) / 3.0;
    const double want = 4.0 * std::numbers::pi * (d * d - lam * lam) / (lam * lam) * radial;
    CHECK(rel(kernel_shell_integral(x, lam, outer, y, 2.0), want) < 1e-12);
  }
}

TEST_CASE("shell ratio stays bounded as y approaches the sphere") {
  const Point x{0.3, 0.1, -0.2};
  const double lam = 0.8;
  double prev = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const Point y = x + Point{lam * (1.0 + std::pow(10.0, -k)), 0.0, 0.0};
    const double r = appendix_bound_ratio(x, lam, 1.5, 0.5, y, 1.3);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    if (k > 2) CHECK(rel(r, prev) < 0.1);
    prev = r;
  }
}
