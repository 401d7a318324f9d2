#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "movsph/gjms.hpp"
#include "support.hpp"

using namespace movsph;
using movsph::testing::rel;

TEST_CASE("multiplier golden values") {
  CHECK(multiplier(1.0, 4, 0) == 2.0);
  CHECK(multiplier(1.0, 3, 1) == doctest::Approx(3.75).epsilon(1e-15));
  CHECK(multiplier(1.0, 3, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(multiplier(3.0, 4, 0) == 0.0);
  CHECK(multiplier_log_gamma(3.0, 4, 0) == 0.0);
  CHECK(multiplier_pole(3.0, 4, 0));
  CHECK_FALSE(multiplier_pole(3.0, 4, 2));
  const MultiplierTable t(1.0, 4, 3);
  CHECK(t.entries() == std::vector<double>{2.0, 6.0, 12.0, 20.0});
  CHECK_THROWS_AS(multiplier(1.0, 3, -1), DomainError);
  CHECK_THROWS_AS(MultiplierTable(1.0, 3, -1), DomainError);
}

TEST_CASE("negative Gamma arguments carry their sign") {
  // s = 2.25, n = 3, l = 0: b = -0.75, Gamma(-0.75) < 0.
  const double want = std::tgamma(0.0 + 1.5 + 2.25) / std::tgamma(1.5 - 2.25);
  CHECK(want < 0.0);
  CHECK(rel(multiplier(2.25, 3, 0), want) < 1e-13);
  // b = -1.25: Gamma > 0.
  CHECK(rel(multiplier(2.75, 3, 0), std::tgamma(4.25) / std::tgamma(-1.25)) < 1e-13);
}

TEST_CASE("integer-order product and B-form consistency") {
  for (int s = 1; s <= 4; ++s)
    for (int n = 3; n <= 8; ++n)
      for (long l = 0; l <= 50; ++l) {
        const double prod = integer_product_multiplier(s, n, l);
        const double bform = b_form_multiplier(s, n, l);
        const double lg = multiplier_log_gamma(s, n, l);
        if (multiplier_pole(s, n, l)) {
          CHECK(multiplier(s, n, l) == 0.0);
          CHECK(std::abs(prod) < 1e-12);
          continue;
        }
        CHECK(rel(multiplier(s, n, l), prod) < 1e-10);
        CHECK(rel(lg, prod) < 1e-10);
        CHECK(rel(bform, prod) < 1e-10);
      }
}

TEST_CASE("half-integer dimension shifts hit poles exactly") {
  int poles = 0;
  for (int n = 1; n <= 8; ++n)
    for (int two_s = 1; two_s <= 16; ++two_s)
      for (long l = 0; l <= 10; ++l) {
        const double s = 0.5 * two_s;
        const double b = l + 0.5 * n - s;
        const bool pole = b <= 0.0 && b == std::floor(b);
        CHECK(multiplier_pole(s, n, l) == pole);
        if (pole) {
          ++poles;
          CHECK(multiplier(s, n, l) == 0.0);
        }
      }
  CHECK(poles > 0);
}

TEST_CASE("monotone past the poles and finite at large degree") {
  for (double s : {0.3, 1.0, 1.7, 2.5}) {
    const int n = 3;
    double prev = -INFINITY;
    for (long l = 0; l <= 2000; ++l) {
      if (l + 0.5 * n - s <= 0.0) continue;
      const double a = multiplier(s, n, l);
      CHECK(a > prev);
      prev = a;
    }
  }
  CHECK(std::isfinite(multiplier(3.3, 5, 10000)));
  CHECK(rel(multiplier(1.0, 5, 10000), integer_product_multiplier(1, 5, 10000)) < 1e-12);
}

TEST_CASE("B eigenvalue is l + (n-1)/2") {
  CHECK(operator_B_eigenvalue(3, 0) == 1.0);
  CHECK(operator_B_eigenvalue(5, 2) == 4.0);
  for (int n = 2; n <= 12; ++n)
    for (long l = 0; l <= 200; ++l) CHECK(rel(operator_B_eigenvalue(n, l), l + 0.5 * (n - 1)) < 1e-15);
  CHECK(laplacian_eigenvalue(3, 2) == 8.0);
}

TEST_CASE("zonal harmonics are orthogonal and normalized at the pole") {
  boost::math::quadrature::gauss<double, 60> gq;
  for (int n : {2, 3, 5}) {
    for (long l = 0; l <= 8; ++l) {
      CHECK(zonal_harmonic(n, l, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
      for (long m = 0; m < l; ++m) {
        const double ip = gq.integrate(
            [&](double th) {
              const double t = std::cos(th);
              return zonal_harmonic(n, l, t) * zonal_harmonic(n, m, t) * std::pow(std::sin(th), n - 1.0);
            },
            0.0, std::numbers::pi);
        CHECK(std::abs(ip) < 1e-12);
      }
    }
  }
  // Zonal harmonics are eigenfunctions: check the Legendre case n = 2 directly.
  CHECK(zonal_harmonic(2, 2, 0.3) == doctest::Approx(0.5 * (3 * 0.09 - 1)).epsilon(1e-14));
}

TEST_CASE("spectral action") {
  ZonalFunction v{3, {1.0}};
  const auto out = apply_gjms_zonal(v, MultiplierTable(1.0, 3, 4));
  CHECK(out.value.coeffs.at(0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_FALSE(out.truncated);

  // s = 3, n = 4 has poles at l = 0 and l = 1.
  ZonalFunction w{4, {2.0, -1.0}};
  const auto zero = apply_gjms_zonal(w, MultiplierTable(3.0, 4, 5));
  for (double c : zero.value.coeffs) CHECK(c == 0.0);

  ZonalFunction big{3, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0}};
  const auto tr = apply_gjms_zonal(big, MultiplierTable(1.0, 3, 4));
  CHECK(tr.truncated);
  CHECK(tr.dropped == 1);
  CHECK(tr.dropped_max_abs == 3.0);

  for (int s = 1; s <= 4; ++s) {
    ZonalFunction u{5, {}};
    for (int l = 0; l <= 20; ++l) u.coeffs.push_back(1.0 / (1.0 + l));
    const auto r = apply_gjms_zonal(u, MultiplierTable(s, 5, 20));
    for (int l = 0; l <= 20; ++l)
      CHECK(r.value.coeffs[l] == doctest::Approx(integer_product_multiplier(s, 5, l) * u.coeffs[l]).epsilon(1e-10));
  }
}

TEST_CASE("stereographic projection and pullback") {
  Rng rng = make_stream(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 2 + i % 5;
    const Point x = random_direction(rng, n) * log_uniform(rng, 1e-3, 1e3);
    const Point w = inverse_stereographic(x);
    CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-14));
    // forward projection from N = e_0: x_i = w_{i+1} / (1 - w_0)
    for (std::size_t k = 0; k < n; ++k) CHECK(rel(w[k + 1] / (1.0 - w[0]), x[k]) < 1e-9);
  }
  const Point x{0.3, -1.2, 2.0};
  const SphereFunction one = [](const Point&) { return 1.0; };
  CHECK(stereo_pullback(one, 0.5, x) == doctest::Approx(std::pow(2.0 / (1.0 + x.norm2()), 1.0)).epsilon(1e-15));
  const ZonalFunction v{3, {0.5, 1.0, 0.25}};
  CHECK(stereo_pullback(v, 1.5, x) == doctest::Approx(v(inverse_stereographic(x))).epsilon(1e-15));
}

TEST_CASE("pullback growth at infinity") {
  const ZonalFunction v{3, {0.5, 1.0, 0.25}};
  const double s = 2.5, n = 3.0;
  const double limit = std::pow(2.0, 0.5 * (n - 2.0 * s)) * v.at_cos(1.0);
  double prev_err = INFINITY;
  for (double r : {1e1, 1e2, 1e3, 1e4}) {
    const Point x = Point{0.6, 0.0, 0.8} * r;
    const double err = rel(stereo_pullback(v, s, x) / std::pow(r, 2.0 * s - n), limit);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-6);
}
