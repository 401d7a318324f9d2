#pragma once

#include <cstddef>
#include <vector>

namespace movsph {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Order-`order` rule by Newton iteration on P_order; cached per order.
const GaussLegendreRule& gauss_legendre(std::size_t order);

/// Composite rule on [a, b]: `panels` equal panels of `order` points each.
GaussLegendreRule composite_gauss_legendre(double a, double b, std::size_t panels, std::size_t order);

}  // namespace movsph
