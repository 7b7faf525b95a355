// SPDX-License-Identifier: Apache-2.0
#include "tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace ltopt {

int count_below(const SymTridiag& A, const SymTridiag& M, double sigma) {
  const std::size_t n = A.size();
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = A.diag[i] - sigma * M.diag[i];
    if (i == 0) {
      d = t;
    } else {
      const double e = A.off[i - 1] - sigma * M.off[i - 1];
      d = t - e * e / d;
    }
    if (std::abs(d) < tiny) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

ShiftedTridiagLU::ShiftedTridiagLU(const SymTridiag& A, const SymTridiag& M, double sigma) {
  const std::size_t n = A.size();
  d_.resize(n);
  dl_.assign(n > 0 ? n - 1 : 0, 0.0);
  du_.assign(n > 0 ? n - 1 : 0, 0.0);
  du2_.assign(n > 1 ? n - 2 : 0, 0.0);
  ipiv_.resize(n);
  for (std::size_t i = 0; i < n; ++i) d_[i] = A.diag[i] - sigma * M.diag[i];
  for (std::size_t i = 0; i + 1 < n; ++i) dl_[i] = du_[i] = A.off[i] - sigma * M.off[i];

  const double scale = std::max(A.inf_norm() + std::abs(sigma) * M.inf_norm(), std::numeric_limits<double>::min());
  const double floor = std::numeric_limits<double>::epsilon() * scale;

  // Same elimination order as LAPACK dgttrf.
  for (std::size_t i = 0; i < n; ++i) ipiv_[i] = static_cast<int>(i);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d_[i]) >= std::abs(dl_[i])) {
      if (d_[i] != 0.0) {
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      }
    } else {
      const double fact = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = fact;
      const double temp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = temp - fact * d_[i + 1];
      if (i + 2 < n) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -fact * du_[i + 1];
      }
      ipiv_[i] = static_cast<int>(i + 1);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(d_[i]) <= floor) {
      near_singular_ = true;
      d_[i] = d_[i] < 0.0 ? -floor : floor;
      if (d_[i] == 0.0) d_[i] = std::numeric_limits<double>::min();
    }
  }
}

void ShiftedTridiagLU::solve(std::span<double> b) const {
  const std::size_t n = d_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (ipiv_[i] == static_cast<int>(i)) {
      b[i + 1] -= dl_[i] * b[i];
    } else {
      const double temp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = temp - dl_[i] * b[i];
    }
  }
  if (n == 0) return;
  b[n - 1] /= d_[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
  for (std::size_t k = n >= 2 ? n - 2 : 0; k-- > 0;) b[k] = (b[k] - du_[k] * b[k + 1] - du2_[k] * b[k + 2]) / d_[k];
}

Bracket bisect_bracket(const SymTridiag& A, const SymTridiag& M, int j, double lo, double hi, double abs_tol,
                       double rel_tol) {
  require(lo < hi, ErrorCode::invalid_parameter, "empty bisection bracket");
  const double rel = std::max(rel_tol, 2.0 * std::numeric_limits<double>::epsilon());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= std::max(abs_tol, rel * std::max(std::abs(lo), std::abs(hi)))) break;
    if (count_below(A, M, mid) <= j)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

double bisect_eigenvalue(const SymTridiag& A, const SymTridiag& M, int j, double lo, double hi, double abs_tol) {
  const Bracket b = bisect_bracket(A, M, j, lo, hi, abs_tol, 0.0);
  return 0.5 * (b.lo + b.hi);
}

}  // namespace ltopt
