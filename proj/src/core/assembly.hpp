// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mesh.hpp"

namespace ltopt {

/// Which weak form produced an operator.
///  - line: -u'' + V u on [-L, L], Dirichlet at both ends.
///  - transformed: the radial equation for r^{(d-1)/2} phi, Dirichlet at 0 and L.
///  - weighted: the radial equation tested against r^{d-1} u; natural condition
///    at 0 for l = 0, Dirichlet otherwise.
enum class Formulation { line, transformed, weighted };

const char* formulation_name(Formulation f) noexcept;

/// Symmetric tridiagonal matrix; off[i] couples rows i and i + 1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }
  double inf_norm() const noexcept;
  /// y = T x
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Stiffness/mass pair over the free (non-Dirichlet) nodes of a grid. Free
/// nodes are contiguous: grid indices first_free .. first_free + size() - 1.
struct AssembledOperator {
  SymTridiag stiffness;
  SymTridiag mass;
  std::size_t first_free = 0;
  int channel_l = 0;
  int dim_d = 1;
  Formulation formulation = Formulation::line;

  std::size_t size() const noexcept { return stiffness.size(); }
};

/// Coefficient of 1/r^2 in the transformed radial equation:
/// l(l + d - 2) + (d - 1)(d - 3)/4 = (l + (d-1)/2)(l + (d-3)/2).
double transformed_centrifugal(int dim, int l);

/// Formulation used by the radial channel scan: the weighted form for
/// (d = 2, l = 0), the transformed form otherwise.
Formulation default_radial_formulation(int dim, int l);

/// Precomputed, potential-independent element integrals for one grid,
/// dimension and weak form. assemble() then costs O(N) per call, which is
/// what the fixed-point loop relies on.
class Discretization {
 public:
  Discretization(Grid grid, int dim, Formulation formulation);

  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  Formulation formulation() const noexcept { return formulation_; }

  /// Index of the first free node for channel l.
  std::size_t first_free(int l) const noexcept;

  AssembledOperator assemble(std::span<const double> potential, int l) const;

  /// Integral of the hat function chi_k against w(r) f_h^2 where f_h is the
  /// P1 function with the given free-node coefficients (zero on Dirichlet
  /// nodes). w is 1 for line/transformed and r^{d-1} for weighted.
  void accumulate_square_moments(std::span<const double> coeffs, std::size_t first_free, double scale,
                                 std::span<double> out) const;

 private:
  struct Element {
    double stiff = 0.0;                      // int w chi_a' chi_b' up to sign
    std::array<double, 3> mass{};            // LL, LR, RR
    std::array<double, 3> centrifugal{};     // int r^m chi chi: LL, LR, RR
    std::array<double, 4> cubic{};           // int w chi_L^{3-i} chi_R^i
    bool left_singular = false;              // LL/LR centrifugal integrals diverge
  };

  Grid grid_;
  int dim_;
  Formulation formulation_;
  std::vector<Element> elements_;
};

AssembledOperator assemble_line(const PotentialField& V);
AssembledOperator assemble_radial_transformed(const PotentialField& V, int l);
AssembledOperator assemble_radial_weighted(const PotentialField& V, int l);

}  // namespace ltopt
