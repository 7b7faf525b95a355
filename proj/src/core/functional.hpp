// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "mesh.hpp"
#include "spectral.hpp"

namespace ltopt {

/// Exponent gamma and dimension d of the Lieb-Thirring problem.
struct LTParams {
  double gamma = 1.0;
  int dim = 1;

  /// Normalization exponent gamma + d/2.
  double p() const noexcept { return gamma + 0.5 * dim; }
  /// Dual exponent p / (p - 1).
  double q() const noexcept { return p() / (p() - 1.0); }
};

/// Throws invalid_parameter outside the range where the inequality holds:
/// gamma > 1/2 for d = 1, gamma > 0 for d >= 2.
void validate(const LTParams& params);

LTParams params_of(const PotentialField& V);

/// L_sc = 2^{-d} pi^{-d/2} Gamma(gamma + 1) / Gamma(gamma + d/2 + 1).
double semiclassical_constant(const LTParams& params);

/// Dimension of the degree-l spherical harmonics on S^{d-1}, d >= 2:
/// C(d+l-1, l) - C(d+l-3, l-2).
int multiplicity(int dim, int l);

/// sum over channels and eigenvalues of h(d,l) (-lambda)^gamma.
double lt_energy(const Spectrum& spectrum, const LTParams& params);

/// Integral of V_-^p over the domain with the measure of nodal_weights.
double norm_integral(std::span<const double> values, std::span<const double> weights, double p);
double norm_integral(const PotentialField& V, const LTParams& params);

struct Evaluation {
  double energy = 0.0;
  double norm_integral = 0.0;
  double ratio = 0.0;
  int bound_states = 0;
};

/// R(V) = E(V) / (L_sc int V_-^p). The ratio is invariant under
/// V -> mu^2 V(mu x), so no prior normalization of V is needed.
Evaluation ratio_R(const PotentialField& V, const Spectrum& spectrum, const LTParams& params);
Evaluation evaluate(double energy, double norm, int bound_states, const LTParams& params);

}  // namespace ltopt
