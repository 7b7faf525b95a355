// SPDX-License-Identifier: Apache-2.0
#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace ltopt {

const char* density_rule_name(DensityRule rule) noexcept {
  return rule == DensityRule::nodal ? "nodal" : "projected";
}

const char* outcome_name(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::converged: return "converged";
    case Outcome::max_iters: return "max_iters";
    case Outcome::bump_separation: return "bump_separation";
  }
  return "unknown";
}

void validate(const FixedPointConfig& config) {
  require(config.tol > 0.0, ErrorCode::invalid_parameter, "tolerance must be positive");
  require(config.max_iters >= 1, ErrorCode::invalid_parameter, "max_iters must be at least 1");
  require(config.separation_window >= 2, ErrorCode::invalid_parameter, "separation window too short");
}

namespace {

double extrapolate_to_origin(const std::vector<double>& r, const std::vector<double>& f) {
  double value = 0.0;
  for (int i = 1; i <= 3; ++i) {
    double basis = 1.0;
    for (int j = 1; j <= 3; ++j)
      if (j != i) basis *= (0.0 - r[j]) / (r[i] - r[j]);
    value += basis * f[i];
  }
  return value;
}

}  // namespace

std::vector<double> density_from_spectrum(const Spectrum& spectrum, const LTParams& params,
                                          const OperatorFamily& family, DensityRule rule) {
  const Grid& grid = family.grid();
  const std::size_t nodes = grid.size();
  const int d = params.dim;
  std::vector<double> rho(nodes, 0.0);
  require(!spectrum.empty(), ErrorCode::degenerate_density, "empty spectrum: density vanishes identically");

  if (rule == DensityRule::projected) {
    for (const auto& channel : spectrum.channels) {
      const Discretization& disc = family.discretization(channel.l);
      for (const auto& pair : channel.pairs) {
        const double weight = channel.multiplicity * std::pow(-pair.lambda, params.gamma - 1.0);
        disc.accumulate_square_moments(pair.vector, channel.first_free, weight, rho);
      }
    }
    const std::vector<double>& w = family.weights();
    for (std::size_t k = 0; k < nodes; ++k) rho[k] /= w[k];
  } else {
    const double inv_area = grid.radial() ? 1.0 / sphere_area(d) : 1.0;
    for (const auto& channel : spectrum.channels) {
      for (const auto& pair : channel.pairs) {
        const double weight = channel.multiplicity * std::pow(-pair.lambda, params.gamma - 1.0) * inv_area;
        std::vector<double> phi = expand_to_grid(pair.vector, channel.first_free, nodes);
        if (channel.formulation == Formulation::transformed) {
          const double power = -0.5 * (d - 1);
          for (std::size_t k = 1; k < nodes; ++k) phi[k] *= std::pow(grid.nodes[k], power);
          phi[0] = extrapolate_to_origin(grid.nodes, phi);
        }
        for (std::size_t k = 0; k < nodes; ++k) rho[k] += weight * phi[k] * phi[k];
      }
    }
  }
  const bool any = std::any_of(rho.begin(), rho.end(), [](double v) { return v > 0.0; });
  require(any, ErrorCode::degenerate_density, "density vanishes identically");
  return rho;
}

PotentialField next_potential(std::span<const double> rho, const LTParams& params, const Grid& grid) {
  return next_potential(rho, params, grid, nodal_weights(grid, params.dim));
}

PotentialField next_potential(std::span<const double> rho, const LTParams& params, const Grid& grid,
                              std::span<const double> w) {
  validate(params);
  require(rho.size() == grid.size() && w.size() == grid.size(), ErrorCode::mismatched_grid,
          "density does not match grid");
  const double p = params.p();
  std::vector<double> u = interpolate_power(rho, 1.0 / (p - 1.0));
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) total += w[k] * std::pow(u[k], p);
  require(total > 0.0, ErrorCode::degenerate_density, "density vanishes identically");
  const double K = std::pow(total, -1.0 / p);
  PotentialField V;
  V.grid = grid;
  V.dim = params.dim;
  V.gamma = params.gamma;
  V.values.resize(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) V.values[k] = -K * u[k];
  return V;
}

PotentialField normalized(PotentialField V) {
  const LTParams params = params_of(V);
  const double norm = norm_integral(V, params);
  const double scale = std::pow(norm, -1.0 / params.p());
  for (double& v : V.values) v *= scale;
  return V;
}

PotentialField gaussian_potential(const Grid& grid, int dim, double gamma, double width, double amplitude,
                                  double center) {
  require(width > 0.0 && amplitude > 0.0, ErrorCode::invalid_parameter, "Gaussian seed needs positive width/amplitude");
  PotentialField V;
  V.grid = grid;
  V.dim = dim;
  V.gamma = gamma;
  V.values.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = (grid.nodes[k] - center) / width;
    V.values[k] = -amplitude * std::exp(-x * x);
  }
  V.values.back() = 0.0;
  if (!grid.radial()) V.values.front() = 0.0;
  return normalized(std::move(V));
}

PotentialField two_bump_potential(const Grid& grid, double gamma, double width, double separation) {
  require(!grid.radial(), ErrorCode::mismatched_grid, "two-bump seed lives on the line");
  require(width > 0.0 && separation > 0.0, ErrorCode::invalid_parameter, "two-bump seed needs positive sizes");
  PotentialField V;
  V.grid = grid;
  V.dim = 1;
  V.gamma = gamma;
  V.values.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double a = (grid.nodes[k] - 0.5 * separation) / width;
    const double b = (grid.nodes[k] + 0.5 * separation) / width;
    V.values[k] = -std::exp(-a * a) - std::exp(-b * b);
  }
  V.values.front() = V.values.back() = 0.0;
  return normalized(std::move(V));
}

FixedPointSolver::FixedPointSolver(const Grid& grid, int dim, FixedPointConfig config)
    : config_(std::move(config)), family_(grid, dim, config_.scan.policy) {
  validate(config_);
}

PotentialField FixedPointSolver::step(const PotentialField& V, const Spectrum& spectrum) const {
  const LTParams params = params_of(V);
  const std::vector<double> rho = density_from_spectrum(spectrum, params, family_, config_.density);
  return next_potential(rho, params, family_.grid(), family_.weights());
}

double FixedPointSolver::euler_lagrange_residual(const PotentialField& V) const {
  const LTParams params = params_of(V);
  const Spectrum spectrum = family_.scan(V.values, config_.scan);
  const std::vector<double> rho = density_from_spectrum(spectrum, params, family_, config_.density);
  const PotentialField image = next_potential(rho, params, family_.grid(), family_.weights());
  double worst = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k)
    if (rho[k] > 0.0) worst = std::max(worst, std::abs(image.values[k] - V.values[k]));
  return worst;
}

FixedPointResult FixedPointSolver::run(PotentialField V0, const TraceSink& sink) const {
  const LTParams params = params_of(V0);
  validate(params);
  require(V0.dim == family_.dim(), ErrorCode::invalid_parameter, "seed dimension does not match solver");
  require(V0.grid == family_.grid(), ErrorCode::mismatched_grid, "seed grid does not match solver grid");
  const std::vector<double>& weights = family_.weights();

  PotentialField V = normalized(std::move(V0));
  Spectrum spectrum = family_.scan(V.values, config_.scan);
  require(!spectrum.empty(), ErrorCode::lost_spectrum, "initial potential has no bound state");

  FixedPointResult result;
  IterationTrace& trace = result.trace;
  std::vector<double> spreads;
  int rising = 0;
  for (int n = 0;; ++n) {
    const double norm = norm_integral(V.values, weights, params.p());
    const Evaluation ev = evaluate(lt_energy(spectrum, params), norm, spectrum.bound_states(), params);

    PotentialField next = step(V, spectrum);
    double residual = 0.0;
    for (std::size_t k = 0; k < V.values.size(); ++k)
      residual = std::max(residual, std::abs(next.values[k] - V.values[k]));

    IterationStep rec;
    rec.iter = n;
    rec.energy = ev.energy;
    rec.ratio = ev.ratio;
    rec.residual_sup = residual;
    rec.bound_states = ev.bound_states;

    bool separated = false;
    if (config_.bump_detection) {
      const std::vector<Bump> bumps = detect_bumps(V, config_.bumps);
      for (const Bump& b : bumps) rec.bump_centers.push_back(b.center);
      const double spread = bumps.size() >= 2 ? bumps.back().center - bumps.front().center : 0.0;
      rising = (!spreads.empty() && bumps.size() >= 2 && spread > spreads.back()) ? rising + 1 : 0;
      spreads.push_back(spread);
      separated = rising >= config_.separation_window;
    }

    if (!trace.steps.empty()) {
      const double prev = trace.steps.back().energy;
      const double drop = (prev - ev.energy) / std::max(std::abs(prev), 1e-300);
      if (params.gamma >= 1.0 && ev.energy < prev - 1e-10 * std::abs(prev)) {
        ++trace.monotonicity_violations;
        trace.worst_relative_drop = std::max(trace.worst_relative_drop, drop);
        if (config_.enforce_monotonicity)
          fail(ErrorCode::no_convergence, "energy decreased at iteration " + std::to_string(n));
      }
    }
    trace.steps.push_back(rec);
    if (sink) sink(trace.steps.back());

    // Warm-started scans differ from a cold one at rounding level, so the
    // accepted residual is the one a fresh scan of V reproduces.
    bool stop = false;
    if (residual <= config_.tol && euler_lagrange_residual(V) <= config_.tol) {
      trace.outcome = Outcome::converged;
      stop = true;
    } else if (separated && config_.stop_on_separation) {
      trace.outcome = Outcome::bump_separation;
      stop = true;
    } else if (n + 1 >= config_.max_iters) {
      trace.outcome = separated ? Outcome::bump_separation : Outcome::max_iters;
      stop = true;
    }
    if (stop) {
      result.evaluation = ev;
      result.potential = std::move(V);
      result.spectrum = std::move(spectrum);
      return result;
    }

    Spectrum next_spectrum;
    try {
      next_spectrum = family_.scan(next.values, config_.scan, &spectrum);
    } catch (const Error& e) {
      throw Error(e.code(), "iteration " + std::to_string(n + 1) + ": " + e.what());
    }
    if (next_spectrum.empty())
      fail(ErrorCode::lost_spectrum, "iterate " + std::to_string(n + 1) + " has no bound state");
    V = std::move(next);
    spectrum = std::move(next_spectrum);
  }
}

FixedPointResult fixed_point_run(const PotentialField& V0, const FixedPointConfig& config, const TraceSink& sink) {
  return FixedPointSolver(V0.grid, V0.dim, config).run(V0, sink);
}

std::vector<Bump> detect_bumps(const PotentialField& V, const BumpOptions& options) {
  const auto& v = V.values;
  const auto& x = V.grid.nodes;
  std::vector<Bump> bumps;
  if (v.size() < 3) return bumps;
  const double vmin = *std::min_element(v.begin(), v.end());
  if (!(vmin < 0.0)) return bumps;
  const double threshold = options.depth_fraction * vmin;

  std::vector<std::size_t> minima;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] >= threshold) continue;
    const bool left_ok = k == 0 ? V.grid.radial() : v[k] <= v[k - 1];
    const bool right_ok = k + 1 == v.size() ? false : v[k] < v[k + 1];
    if (left_ok && right_ok) minima.push_back(k);
  }
  // Merge minima closer than merge_cells cells, keeping the deeper one.
  std::vector<std::size_t> kept;
  for (std::size_t k : minima) {
    if (!kept.empty() && k - kept.back() < static_cast<std::size_t>(options.merge_cells)) {
      if (v[k] < v[kept.back()]) kept.back() = k;
      continue;
    }
    kept.push_back(k);
  }
  for (std::size_t k : kept) {
    Bump b{x[k], -v[k]};
    if (k > 0 && k + 1 < v.size()) {
      // Vertex of the parabola through the three nodes around the minimum.
      const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
      const double y0 = v[k - 1], y1 = v[k], y2 = v[k + 1];
      const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
      const double curvature = (d12 - d01) / (x2 - x0);
      if (curvature > 0.0) {
        const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
        if (vertex > x0 && vertex < x2) {
          b.center = vertex;
          b.depth = -(y0 + d01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1));
        }
      }
    }
    bumps.push_back(b);
  }
  return bumps;
}

SeparationFit fit_separation_law(std::span<const int> iterations, std::span<const double> distances, int min_iter,
                                 std::size_t min_samples) {
  require(iterations.size() == distances.size(), ErrorCode::invalid_parameter, "iteration/distance length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    if (iterations[i] < min_iter) continue;
    const double lx = std::log(static_cast<double>(iterations[i]));
    const double y = distances[i];
    sx += lx;
    sy += y;
    sxx += lx * lx;
    sxy += lx * y;
    syy += y * y;
    ++count;
  }
  require(count >= min_samples, ErrorCode::insufficient_data,
          "separation fit needs " + std::to_string(min_samples) + " samples with n >= " + std::to_string(min_iter) +
              ", got " + std::to_string(count));
  const double n = static_cast<double>(count);
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  require(vx > 0.0, ErrorCode::insufficient_data, "separation fit needs distinct iteration counts");
  SeparationFit fit;
  fit.rate = cxy / vx;
  fit.intercept = (sy - fit.rate * sx) / n;
  fit.r_squared = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
  fit.samples = count;
  return fit;
}

IncrementFit fit_increment_law(std::span<const int> iterations, std::span<const double> distances, int min_iter,
                               std::size_t min_samples) {
  require(iterations.size() == distances.size(), ErrorCode::invalid_parameter, "iteration/distance length mismatch");
  // Normal equations for log(dD) = c0 - a D + m log D.
  double g[3][3] = {}, b[3] = {};
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < iterations.size(); ++i) {
    if (iterations[i] < min_iter || iterations[i + 1] != iterations[i] + 1) continue;
    const double inc = distances[i + 1] - distances[i];
    const double D = 0.5 * (distances[i + 1] + distances[i]);
    if (!(inc > 0.0) || !(D > 0.0)) continue;
    const double row[3] = {1.0, -D, std::log(D)};
    const double y = std::log(inc);
    for (int r = 0; r < 3; ++r) {
      b[r] += row[r] * y;
      for (int c = 0; c < 3; ++c) g[r][c] += row[r] * row[c];
    }
    ++count;
  }
  require(count >= min_samples, ErrorCode::insufficient_data,
          "increment fit needs " + std::to_string(min_samples) + " growing steps with n >= " +
              std::to_string(min_iter) + ", got " + std::to_string(count));
  // Gaussian elimination with partial pivoting on the 3x3 system.
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(g[perm[r]][col]) > std::abs(g[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const double pv = g[perm[col]][col];
    require(std::abs(pv) > 1e-300, ErrorCode::insufficient_data, "increment fit is degenerate");
    for (int r = col + 1; r < 3; ++r) {
      const double f = g[perm[r]][col] / pv;
      for (int c = col; c < 3; ++c) g[perm[r]][c] -= f * g[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  double x[3];
  for (int col = 2; col >= 0; --col) {
    double s = b[perm[col]];
    for (int c = col + 1; c < 3; ++c) s -= g[perm[col]][c] * x[c];
    x[col] = s / g[perm[col]][col];
  }
  IncrementFit fit;
  fit.log_scale = x[0];
  fit.exponent = x[1];
  fit.power = x[2];
  require(fit.exponent > 0.0, ErrorCode::insufficient_data, "increments do not decay with distance");
  fit.rate = 1.0 / fit.exponent;
  fit.samples = count;
  return fit;
}

}  // namespace ltopt
