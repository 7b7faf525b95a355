// Dense reference solutions for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const ltopt::SymTridiag& T) {
  const auto n = static_cast<Eigen::Index>(T.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    D(i, i) = T.diag[i];
    if (i + 1 < n) D(i, i + 1) = D(i + 1, i) = T.off[i];
  }
  return D;
}

/// Full spectrum of the pencil (A, M), ascending.
inline std::vector<double> pencil_eigenvalues(const ltopt::AssembledOperator& op) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(op.stiffness), dense(op.mass),
                                                               Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Eigenvalues below -threshold * ||A||_inf, the solver's bound-state cutoff.
inline std::vector<double> negative_part(const ltopt::AssembledOperator& op, double threshold = 1e-12) {
  const double cut = -threshold * op.stiffness.inf_norm();
  std::vector<double> out;
  for (double v : pencil_eigenvalues(op))
    if (v < cut) out.push_back(v);
  return out;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
