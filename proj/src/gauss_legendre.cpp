#include "movsph/gauss_legendre.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "movsph/errors.hpp"

namespace movsph {

namespace {

GaussLegendreRule build_rule(std::size_t order) {
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t half = (order + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(order) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= order; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(order) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(std::size_t order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<std::size_t, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

GaussLegendreRule composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t order) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: panels must be >= 1");
  const GaussLegendreRule& base = gauss_legendre(order);
  GaussLegendreRule out;
  out.nodes.reserve(panels * order);
  out.weights.reserve(panels * order);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + h * static_cast<double>(k);
    for (std::size_t i = 0; i < order; ++i) {
      out.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
      out.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return out;
}

}  // namespace movsph
