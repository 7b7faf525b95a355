// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "assembly.hpp"
#include "mesh.hpp"

namespace ltopt {

/// Eigenpair of A x = lambda M x, normalized so that x^T M x = 1. The vector
/// lives on the free nodes of the operator it came from.
struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vector;
};

struct EigenSolveOptions {
  int k_init = 8;
  int growth = 2;
  int max_restarts = 24;
  /// Lower bracket for the bisection; ignored unless count_below(shift) == 0.
  std::optional<double> shift;
  /// Eigenvalues in [-zero_threshold * ||A||_inf, 0) count as nonnegative.
  double zero_threshold = 1e-12;
  int max_inverse_iterations = 30;
};

/// Negative part of a pencil's spectrum plus its completeness certificate.
struct NegativeSpectrum {
  std::vector<EigenPair> pairs;
  double certificate = 0.0;  // computed (n+1)-th eigenvalue, >= threshold
  double threshold = 0.0;
  double a_norm = 0.0;
  int requested_k = 0;
  int restarts = 0;
};

/// All eigenpairs of the pencil below -zero_threshold*||A||, ascending.
///
/// Eigenvalues are computed in batches of k (k_init, then doubling) by
/// inertia bisection, each one followed by shift-and-invert inverse
/// iteration for its vector; a batch ends early at the first eigenvalue at
/// or above the threshold, which is kept as the certificate.
NegativeSpectrum negative_eigenpairs(const AssembledOperator& op, const EigenSolveOptions& options = {});

/// Negative eigenpairs of one angular channel.
struct ChannelSpectrum {
  int l = 0;
  int multiplicity = 1;
  Formulation formulation = Formulation::line;
  std::size_t first_free = 0;
  std::vector<EigenPair> pairs;
  double certificate = 0.0;
  double a_norm = 0.0;
};

/// Channels l = 0 .. l_max - 1 of a radial operator (one channel for d = 1).
/// Channel l_max, the first without bound states, is not stored.
struct Spectrum {
  int dim = 1;
  std::vector<ChannelSpectrum> channels;

  /// Bound-state count with multiplicity.
  int bound_states() const noexcept;
  /// Most negative eigenvalue, or 0 for an empty spectrum.
  double bottom() const noexcept;
  bool empty() const noexcept { return bound_states() == 0; }
};

enum class FormulationPolicy { automatic, transformed, weighted };

/// Shift for the next solve: 1.05 times the previous bottom of the spectrum
/// when there was one, otherwise -||V_-||_inf.
double shift_strategy(const Spectrum* previous, double min_potential);

struct ScanOptions {
  EigenSolveOptions solver;
  FormulationPolicy policy = FormulationPolicy::automatic;
  /// Channels solved concurrently; results are merged by l.
  int workers = 1;
  int max_channels = 4096;
};

/// Reusable assemblers for every channel of one (grid, dimension) pair.
class OperatorFamily {
 public:
  OperatorFamily(const Grid& grid, int dim, FormulationPolicy policy = FormulationPolicy::automatic);

  const Grid& grid() const noexcept { return primary_.grid(); }
  int dim() const noexcept { return dim_; }
  const Discretization& discretization(int l) const;
  /// nodal_weights(grid(), dim()), computed once.
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Negative spectrum of -Delta + V, scanning l upward on radial grids
  /// until a channel has no bound state.
  Spectrum scan(std::span<const double> potential, const ScanOptions& options = {},
                const Spectrum* previous = nullptr) const;

 private:
  int dim_;
  FormulationPolicy policy_;
  Discretization primary_;
  std::optional<Discretization> weighted_;
  std::vector<double> weights_;
};

/// One-shot scan of a potential field; builds its own OperatorFamily.
Spectrum scan_radial_spectrum(const PotentialField& V, FormulationPolicy policy = FormulationPolicy::automatic,
                              const ScanOptions& options = {});

/// Negative spectrum of a d = 1 potential on the full line.
Spectrum scan_line_spectrum(const PotentialField& V, const ScanOptions& options = {});

/// Values of an eigenvector on every grid node (zeros at Dirichlet nodes).
std::vector<double> expand_to_grid(std::span<const double> free_values, std::size_t first_free, std::size_t nodes);

}  // namespace ltopt
