// SPDX-License-Identifier: Apache-2.0
#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "quadrature.hpp"

namespace ltopt {

const char* domain_kind_name(DomainKind kind) noexcept {
  return kind == DomainKind::radial_halfline ? "radial" : "line";
}

Grid make_grid(int elements, double L, DomainKind kind, double grading) {
  require(elements >= kMinElements, ErrorCode::invalid_parameter,
          "grid needs at least " + std::to_string(kMinElements) + " elements, got " + std::to_string(elements));
  require(L > 0.0 && std::isfinite(L), ErrorCode::invalid_parameter, "grid extent L must be positive");
  require(grading >= 1.0 && std::isfinite(grading), ErrorCode::invalid_parameter, "grading exponent must be >= 1");

  Grid grid;
  grid.kind = kind;
  grid.L = L;
  grid.grading = kind == DomainKind::radial_halfline ? grading : 1.0;
  grid.nodes.resize(static_cast<std::size_t>(elements) + 1);
  const double n = elements;
  for (int i = 0; i <= elements; ++i) {
    double x;
    if (kind == DomainKind::full_line) {
      x = L * (2.0 * i - n) / n;
    } else if (grading == 1.0) {
      x = L * i / n;
    } else {
      x = L * std::pow(i / n, grading);
    }
    grid.nodes[i] = x;
  }
  grid.nodes.back() = L;
  return grid;
}

void validate_grid(const Grid& grid) {
  require(grid.size() >= kMinElements + 1, ErrorCode::invalid_parameter, "grid has too few nodes");
  const double first = grid.radial() ? 0.0 : -grid.L;
  require(grid.nodes.front() == first && grid.nodes.back() == grid.L, ErrorCode::invalid_parameter,
          "grid endpoints do not match its extent");
  for (std::size_t i = 1; i < grid.size(); ++i)
    require(grid.nodes[i] > grid.nodes[i - 1], ErrorCode::invalid_parameter, "grid nodes must be strictly increasing");
}

std::vector<double> interpolate_power(std::span<const double> values, double exponent) {
  require(exponent > 0.0, ErrorCode::invalid_parameter, "power exponent must be positive");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (v < 0.0) {
      require(v >= -kNegativeClamp, ErrorCode::domain_error,
              "negative nodal value " + std::to_string(v) + " in power interpolation");
      v = 0.0;
    }
    out[i] = exponent == 1.0 ? v : std::pow(v, exponent);
  }
  return out;
}

double sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

std::vector<double> nodal_weights(const Grid& grid, int dim) {
  std::vector<double> w(grid.size(), 0.0);
  if (!grid.radial()) {
    for (std::size_t e = 0; e + 1 < grid.size(); ++e) {
      const double h = grid.nodes[e + 1] - grid.nodes[e];
      w[e] += 0.5 * h;
      w[e + 1] += 0.5 * h;
    }
    return w;
  }
  require(dim >= 2, ErrorCode::invalid_parameter, "radial weights need dimension >= 2");
  const int order = std::max(4, (dim + 3) / 2);
  const double area = sphere_area(dim);
  for (std::size_t e = 0; e + 1 < grid.size(); ++e) {
    const double a = grid.nodes[e], b = grid.nodes[e + 1], h = b - a;
    w[e] += area * integrate([&](double r) { return std::pow(r, dim - 1) * (b - r) / h; }, a, b, order);
    w[e + 1] += area * integrate([&](double r) { return std::pow(r, dim - 1) * (r - a) / h; }, a, b, order);
  }
  return w;
}

}  // namespace ltopt
