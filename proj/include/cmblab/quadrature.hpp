#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

// Composite Gauss-Legendre quadrature. Nodes and weights are computed once
// per order by Newton iteration on the Legendre recurrence, so there are no
// hand-typed coefficient tables.

namespace cmblab::quadrature {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // positive, sum to 2
};

// n-point Gauss-Legendre rule on [-1, 1]. Throws std::domain_error for n < 1.
const GaussRule& gauss_legendre(int n);

// Integrate f over [a, b] with `panels` equal panels of the given rule.
// Accumulation is in fixed panel/node order, so results are bit-stable.
template <typename F>
auto integrate(F&& f, double a, double b, std::size_t panels, const GaussRule& rule)
    -> decltype(f(a)) {
  if (panels == 0) throw std::domain_error("integrate: need at least one panel");
  using value_type = decltype(f(a));
  const double width = (b - a) / static_cast<double>(panels);
  value_type total{};
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    value_type acc{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    total += half * acc;
  }
  return total;
}

}  // namespace cmblab::quadrature
