// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "optimizer.hpp"

namespace ltopt {

/// Reference problem -u'' - 2 sech^2(x) u = lambda u on the line: one bound
/// state, lambda = -1, u = sech(x) / sqrt(2).
inline constexpr double kReferenceEigenvalue = -1.0;

struct ConvergenceOptions {
  double L = 40.0;
  std::vector<int> elements = {250, 500, 1000, 2000, 4000, 8000};
  double h = 5e-4;
  std::vector<double> extents = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
};

struct MeshSweepRow {
  int elements = 0;
  double h = 0.0;
  double lambda = 0.0;
  double eigenvalue_error = 0.0;
  double h1_error = 0.0;
};

struct DomainSweepRow {
  double L = 0.0;
  int elements = 0;
  double lambda = 0.0;
  /// H^1 distance to the solution on the largest domain with the same h.
  double truncation_error = 0.0;
  /// H^1 distance to the exact eigenfunction.
  double exact_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<MeshSweepRow> mesh;
  std::vector<DomainSweepRow> domain;
  double reference_L = 0.0;
  double eigenvalue_slope = 0.0;
  double h1_slope = 0.0;
  /// -d log(truncation_error) / dL, to compare with sqrt(-lambda) = 1.
  double decay_rate = 0.0;
  double expected_decay_rate = 1.0;
  /// Floor of exact_error reached once the mesh error dominates.
  double plateau_level = 0.0;
  double plateau_onset = 0.0;
};

ConvergenceStudy convergence_study(const ConvergenceOptions& options = {});

struct SeparationOptions {
  double gamma = 1.2;
  int elements = 4000;
  double L = 80.0;
  double width = 1.0;
  double separation = 4.0;
  int iterations = 10001;
  int fit_from = 100;
};

struct SeparationSample {
  int iter = 0;
  double distance = 0.0;
  int bumps = 0;
  int bound_states = 0;
};

struct SeparationStudy {
  std::vector<SeparationSample> samples;
  Outcome outcome = Outcome::max_iters;
  bool separated = false;
  SeparationFit log_fit;
  std::optional<IncrementFit> increment_fit;
  /// Ground eigenvalue of the last iterate (one bump's eigenvalue once apart).
  double lambda = 0.0;
  /// 1 / (2 sqrt(-lambda)).
  double predicted_rate = 0.0;
  /// Eigenvalue of the single-bump optimizer at the same gamma and grid.
  double lambda_single = 0.0;
  /// distance(n2) - distance(n1) for the decades available in the run.
  std::vector<std::pair<int, double>> decade_spacing;
};

/// Two-bump run on the line; the distance between the two deepest wells is
/// recorded every iteration. A seed that collapses to one bump reports
/// separated = false and no fits.
SeparationStudy separation_study(const SeparationOptions& options, const PotentialField* seed = nullptr);

}  // namespace ltopt
