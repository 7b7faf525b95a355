// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace ltopt {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n - 1.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

/// Integral of f over [a, b] with an n-point rule.
template <class F>
double integrate(F&& f, double a, double b, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) sum += rule.weights[q] * f(mid + half * rule.points[q]);
  return half * sum;
}

}  // namespace ltopt
