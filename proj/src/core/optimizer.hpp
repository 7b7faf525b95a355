// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "functional.hpp"
#include "mesh.hpp"
#include "spectral.hpp"

namespace ltopt {

/// How the nodal values of rho_n are formed before taking powers.
///  - nodal: rho at each node from the nodal eigenvector values.
///  - projected: hat-function average int chi_k rho / int chi_k, the choice
///    for which each discrete step is an exact alternating maximization, so
///    E(V_n) is monotone for gamma >= 1 up to rounding.
enum class DensityRule { nodal, projected };

const char* density_rule_name(DensityRule rule) noexcept;

struct BumpOptions {
  /// Minima shallower than this fraction of the global depth are ignored.
  double depth_fraction = 0.1;
  /// Minima closer than this many cells are merged.
  int merge_cells = 5;
};

struct Bump {
  double center = 0.0;
  double depth = 0.0;
};

struct FixedPointConfig {
  double tol = 1e-10;
  int max_iters = 10000;
  bool bump_detection = false;
  /// Stop with outcome bump_separation once detected; studies keep going.
  bool stop_on_separation = true;
  int separation_window = 50;
  BumpOptions bumps;
  DensityRule density = DensityRule::projected;
  ScanOptions scan;
  /// Throw if E(V_n) decreases for gamma >= 1 (beyond 1e-10 relative).
  bool enforce_monotonicity = false;
};

void validate(const FixedPointConfig& config);

struct IterationStep {
  int iter = 0;
  double energy = 0.0;
  double ratio = 0.0;
  double residual_sup = 0.0;
  int bound_states = 0;
  std::vector<double> bump_centers;
};

enum class Outcome { converged, max_iters, bump_separation };

const char* outcome_name(Outcome outcome) noexcept;

struct IterationTrace {
  std::vector<IterationStep> steps;
  Outcome outcome = Outcome::max_iters;
  /// Steps with energy_{n+1} < energy_n - 1e-10 |energy_n|.
  int monotonicity_violations = 0;
  double worst_relative_drop = 0.0;
};

using TraceSink = std::function<void(const IterationStep&)>;

struct FixedPointResult {
  /// Last iterate; when converged, ||T(V) - V||_inf <= tol.
  PotentialField potential;
  Spectrum spectrum;
  Evaluation evaluation;
  IterationTrace trace;
};

/// rho = sum_l h(d,l) sum_i (-lambda_{i,l})^{gamma-1} phi_{i,l}^2 at the
/// grid nodes, in the density units of R^d (angular factor 1/|S^{d-1}|
/// included on radial grids).
std::vector<double> density_from_spectrum(const Spectrum& spectrum, const LTParams& params,
                                          const OperatorFamily& family, DensityRule rule);

/// V = -K rho^{1/(p-1)} with K fixed by the discrete normalization
/// sum_k w_k |V_k|^p = 1 (w = nodal_weights).
PotentialField next_potential(std::span<const double> rho, const LTParams& params, const Grid& grid);
PotentialField next_potential(std::span<const double> rho, const LTParams& params, const Grid& grid,
                              std::span<const double> weights);

/// Rescales V so that its norm integral is 1.
PotentialField normalized(PotentialField V);

/// Gaussian seed -amplitude * exp(-(x - center)^2 / width^2), normalized.
PotentialField gaussian_potential(const Grid& grid, int dim, double gamma, double width, double amplitude = 1.0,
                                  double center = 0.0);

/// Two Gaussian wells at +-separation/2 on a line grid, normalized.
PotentialField two_bump_potential(const Grid& grid, double gamma, double width, double separation);

class FixedPointSolver {
 public:
  FixedPointSolver(const Grid& grid, int dim, FixedPointConfig config);

  const OperatorFamily& family() const noexcept { return family_; }
  const FixedPointConfig& config() const noexcept { return config_; }

  /// One application of the map V -> next_potential(density(V)).
  PotentialField step(const PotentialField& V, const Spectrum& spectrum) const;

  FixedPointResult run(PotentialField V0, const TraceSink& sink = {}) const;

  /// ||T(V) - V||_inf over nodes where rho(V) > 0.
  double euler_lagrange_residual(const PotentialField& V) const;

 private:
  FixedPointConfig config_;
  OperatorFamily family_;
};

FixedPointResult fixed_point_run(const PotentialField& V0, const FixedPointConfig& config, const TraceSink& sink = {});

/// Local minima of V below depth_fraction * min V, merged within merge_cells
/// cells and located to sub-cell accuracy by a parabola through three nodes.
std::vector<Bump> detect_bumps(const PotentialField& V, const BumpOptions& options = {});

struct SeparationFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit distance_n = intercept + rate log n over n >= min_iter.
SeparationFit fit_separation_law(std::span<const int> iterations, std::span<const double> distances,
                                 int min_iter = 100, std::size_t min_samples = 100);

struct IncrementFit {
  double exponent = 0.0;  // a
  double power = 0.0;     // m
  double log_scale = 0.0;
  /// 1 / a, the asymptotic coefficient of log n.
  double rate = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of the increments D_{n+1} - D_n = C D^m exp(-a D) over
/// steps with n >= min_iter and a positive increment. The algebraic factor
/// absorbs the slowly decaying correction that biases the plain log fit.
IncrementFit fit_increment_law(std::span<const int> iterations, std::span<const double> distances,
                               int min_iter = 100, std::size_t min_samples = 100);

}  // namespace ltopt
