// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ltopt {

enum class DomainKind { radial_halfline, full_line };

const char* domain_kind_name(DomainKind kind) noexcept;

/// Node set of a 1D piecewise-linear mesh.
///
/// Radial grids cover [0, L] and are graded toward the origin with
/// r_i = L (i/N)^s; full-line grids are uniform on [-L, L]. Both ends carry
/// a node, so a grid with N elements has N + 1 nodes.
struct Grid {
  std::vector<double> nodes;
  DomainKind kind = DomainKind::full_line;
  double L = 0.0;
  double grading = 1.0;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t elements() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
  bool radial() const noexcept { return kind == DomainKind::radial_halfline; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline constexpr int kMinElements = 8;
inline constexpr double kDefaultGrading = 2.0;

Grid make_grid(int elements, double L, DomainKind kind, double grading = kDefaultGrading);

/// Checks the node-ordering invariants; throws invalid_parameter on failure.
void validate_grid(const Grid& grid);

/// Nodal potential values on a grid, tagged with the problem it belongs to.
struct PotentialField {
  Grid grid;
  std::vector<double> values;
  int dim = 1;
  double gamma = 1.0;

  friend bool operator==(const PotentialField&, const PotentialField&) = default;
};

/// Nodewise power of a nonnegative nodal function. Values in [-1e-14, 0)
/// are clamped to zero; anything more negative is a domain error.
std::vector<double> interpolate_power(std::span<const double> values, double exponent);

inline constexpr double kNegativeClamp = 1e-14;

/// Integrals of each hat function against the measure of the domain:
/// dx on the line, |S^{d-1}| r^{d-1} dr on the half-line. The exact
/// integral of any nodal (P1) function f is sum_k weight_k f_k.
std::vector<double> nodal_weights(const Grid& grid, int dim);

/// |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int dim);

}  // namespace ltopt
