// SPDX-License-Identifier: Apache-2.0
#include "functional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace ltopt {

namespace {

long long binomial(long long n, long long k) {
  if (n < 0 || k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long result = 1;
  for (long long i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

}  // namespace

void validate(const LTParams& params) {
  require(params.dim >= 1, ErrorCode::invalid_parameter, "dimension must be positive");
  require(std::isfinite(params.gamma), ErrorCode::invalid_parameter, "gamma must be finite");
  if (params.dim == 1)
    require(params.gamma > 0.5, ErrorCode::invalid_parameter,
            "gamma must exceed 1/2 in one dimension, got " + std::to_string(params.gamma));
  else
    require(params.gamma > 0.0, ErrorCode::invalid_parameter, "gamma must be positive for d >= 2");
}

LTParams params_of(const PotentialField& V) { return LTParams{V.gamma, V.dim}; }

double semiclassical_constant(const LTParams& params) {
  validate(params);
  const double d = params.dim;
  // lgamma difference keeps large gamma finite; both forms agree to rounding.
  const double log_ratio = std::lgamma(params.gamma + 1.0) - std::lgamma(params.gamma + 0.5 * d + 1.0);
  const double ratio = params.gamma < 50.0 ? std::tgamma(params.gamma + 1.0) / std::tgamma(params.gamma + 0.5 * d + 1.0)
                                           : std::exp(log_ratio);
  return std::pow(2.0, -d) * std::pow(std::numbers::pi, -0.5 * d) * ratio;
}

int multiplicity(int dim, int l) {
  require(dim >= 2, ErrorCode::invalid_parameter, "multiplicity is defined for d >= 2");
  require(l >= 0, ErrorCode::invalid_parameter, "angular momentum must be nonnegative");
  return static_cast<int>(binomial(dim + l - 1, l) - binomial(dim + l - 3, l - 2));
}

double lt_energy(const Spectrum& spectrum, const LTParams& params) {
  double energy = 0.0;
  for (const auto& channel : spectrum.channels)
    for (const auto& pair : channel.pairs) energy += channel.multiplicity * std::pow(-pair.lambda, params.gamma);
  return energy;
}

double norm_integral(std::span<const double> values, std::span<const double> weights, double p) {
  require(values.size() == weights.size(), ErrorCode::mismatched_grid, "weights do not match potential");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < 0.0) total += weights[i] * std::pow(-values[i], p);
  require(total > 0.0, ErrorCode::zero_potential, "potential has no negative part; cannot normalize");
  return total;
}

double norm_integral(const PotentialField& V, const LTParams& params) {
  return norm_integral(V.values, nodal_weights(V.grid, params.dim), params.p());
}

Evaluation evaluate(double energy, double norm, int bound_states, const LTParams& params) {
  Evaluation ev;
  ev.energy = energy;
  ev.norm_integral = norm;
  ev.bound_states = bound_states;
  ev.ratio = energy / (semiclassical_constant(params) * norm);
  return ev;
}

Evaluation ratio_R(const PotentialField& V, const Spectrum& spectrum, const LTParams& params) {
  require(spectrum.dim == params.dim && V.dim == params.dim, ErrorCode::invalid_parameter,
          "dimension mismatch between potential, spectrum and parameters");
  return evaluate(lt_energy(spectrum, params), norm_integral(V, params), spectrum.bound_states(), params);
}

}  // namespace ltopt
