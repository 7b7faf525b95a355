// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "assembly.hpp"

namespace ltopt {

/// Number of eigenvalues of the pencil (A, M) strictly below sigma, from the
/// inertia of the LDL^T factorization of A - sigma M (Sylvester's law; M is
/// positive definite so the pencil and A - sigma M share inertia).
int count_below(const SymTridiag& A, const SymTridiag& M, double sigma);

/// LU factorization with partial pivoting of the shifted tridiagonal
/// A - sigma M, used for shift-and-invert solves.
class ShiftedTridiagLU {
 public:
  ShiftedTridiagLU(const SymTridiag& A, const SymTridiag& M, double sigma);

  /// Solves (A - sigma M) x = b in place.
  void solve(std::span<double> b) const;
  /// True when a pivot fell below the singularity threshold.
  bool near_singular() const noexcept { return near_singular_; }

 private:
  std::vector<double> dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
  bool near_singular_ = false;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Shrinks a bracket around the j-th eigenvalue until hi - lo is at most
/// max(abs_tol, rel_tol * max(|lo|, |hi|)) or no representable midpoint remains.
Bracket bisect_bracket(const SymTridiag& A, const SymTridiag& M, int j, double lo, double hi, double abs_tol,
                       double rel_tol);

/// j-th (0-based) eigenvalue of the pencil by bisection on count_below,
/// starting from a bracket with count_below(lo) <= j < count_below(hi).
double bisect_eigenvalue(const SymTridiag& A, const SymTridiag& M, int j, double lo, double hi,
                         double abs_tol = 0.0);

}  // namespace ltopt
