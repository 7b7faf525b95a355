// SPDX-License-Identifier: Apache-2.0
#include "studies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "quadrature.hpp"

namespace ltopt {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

double exact_mode(double x) { return sech(x) / std::sqrt(2.0); }
double exact_slope(double x) { return -sech(x) * std::tanh(x) / std::sqrt(2.0); }

// H^1 norm squared of the exact mode on |x| > L.
double exact_tail(double L) {
  const double t = std::tanh(L);
  return (1.0 - t) + (1.0 - t * t * t) / 3.0;
}

struct Mode {
  Grid grid;
  double lambda = 0.0;
  std::vector<double> u;  // on every node, sign fixed positive at the peak
};

Mode reference_mode(int elements, double L) {
  Mode m;
  m.grid = make_grid(elements, L, DomainKind::full_line);
  PotentialField V;
  V.grid = m.grid;
  V.values.resize(m.grid.size());
  for (std::size_t k = 0; k < m.grid.size(); ++k) {
    const double s = sech(m.grid.nodes[k]);
    V.values[k] = -2.0 * s * s;
  }
  const Spectrum spec = scan_line_spectrum(V);
  require(!spec.empty(), ErrorCode::lost_spectrum, "reference problem has no bound state at L = " + std::to_string(L));
  const ChannelSpectrum& c = spec.channels.front();
  m.lambda = c.pairs.front().lambda;
  m.u = expand_to_grid(c.pairs.front().vector, c.first_free, m.grid.size());
  return m;
}

double h1_error_to_exact(const Mode& m) {
  const GaussRule& rule = gauss_legendre(4);
  double total = 0.0;
  const auto& x = m.grid.nodes;
  for (std::size_t e = 0; e + 1 < x.size(); ++e) {
    const double a = x[e], b = x[e + 1], h = b - a;
    const double slope = (m.u[e + 1] - m.u[e]) / h;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double t = 0.5 * (rule.points[q] + 1.0);
      const double xq = a + t * h;
      const double diff = m.u[e] + slope * t * h - exact_mode(xq);
      const double ddiff = slope - exact_slope(xq);
      total += 0.5 * h * rule.weights[q] * (diff * diff + ddiff * ddiff);
    }
  }
  return std::sqrt(total + exact_tail(m.grid.L));
}

// H^1 norm of the P1 difference between a mode on [-L, L] (zero outside) and
// one on a larger domain with the same node spacing.
double h1_distance_aligned(const Mode& small, const Mode& big) {
  const double h = big.grid.nodes[1] - big.grid.nodes[0];
  const long offset = std::lround((big.grid.L - small.grid.L) / h);
  require(std::abs(offset * h - (big.grid.L - small.grid.L)) < 1e-6 * h, ErrorCode::mismatched_grid,
          "domain sweep grids are not node-aligned");
  auto diff = [&](std::size_t i) {
    const long j = static_cast<long>(i) - offset;
    const double s = j >= 0 && j < static_cast<long>(small.u.size()) ? small.u[j] : 0.0;
    return big.u[i] - s;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < big.u.size(); ++i) {
    const double e0 = diff(i), e1 = diff(i + 1);
    total += (e1 - e0) * (e1 - e0) / h + h / 3.0 * (e0 * e0 + e0 * e1 + e1 * e1);
  }
  return std::sqrt(total);
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double var = sxx - sx * sx / n;
  require(x.size() >= 2 && var > 0.0, ErrorCode::insufficient_data, "slope fit needs two distinct abscissae");
  return (sxy - sx * sy / n) / var;
}

}  // namespace

ConvergenceStudy convergence_study(const ConvergenceOptions& options) {
  require(options.elements.size() >= 2 && options.extents.size() >= 2, ErrorCode::invalid_parameter,
          "convergence sweeps need at least two entries each");
  require(options.h > 0.0 && options.L > 0.0, ErrorCode::invalid_parameter, "sweep sizes must be positive");
  ConvergenceStudy study;

  std::vector<double> logn, loge, logh1;
  for (int N : options.elements) {
    const Mode m = reference_mode(N, options.L);
    MeshSweepRow row;
    row.elements = N;
    row.h = 2.0 * options.L / N;
    row.lambda = m.lambda;
    row.eigenvalue_error = std::abs(m.lambda - kReferenceEigenvalue);
    row.h1_error = h1_error_to_exact(m);
    study.mesh.push_back(row);
    logn.push_back(std::log(N));
    loge.push_back(std::log(row.eigenvalue_error));
    logh1.push_back(std::log(row.h1_error));
  }
  study.eigenvalue_slope = slope_of(logn, loge);
  study.h1_slope = slope_of(logn, logh1);

  const double Lmax = *std::max_element(options.extents.begin(), options.extents.end());
  study.reference_L = 2.0 * Lmax;
  const Mode ref = reference_mode(static_cast<int>(std::lround(2.0 * study.reference_L / options.h)), study.reference_L);
  std::vector<double> ls, logt;
  for (double L : options.extents) {
    const int N = static_cast<int>(std::lround(2.0 * L / options.h));
    const Mode m = reference_mode(N, L);
    DomainSweepRow row;
    row.L = L;
    row.elements = N;
    row.lambda = m.lambda;
    row.truncation_error = h1_distance_aligned(m, ref);
    row.exact_error = h1_error_to_exact(m);
    study.domain.push_back(row);
    if (row.truncation_error > 1e-11) {
      ls.push_back(L);
      logt.push_back(std::log(row.truncation_error));
    }
  }
  study.decay_rate = -slope_of(ls, logt);
  study.expected_decay_rate = std::sqrt(-kReferenceEigenvalue);
  study.plateau_level = study.domain.back().exact_error;
  for (const auto& row : study.domain)
    if (row.exact_error <= 2.0 * study.plateau_level) {
      study.plateau_onset = row.L;
      break;
    }
  return study;
}

SeparationStudy separation_study(const SeparationOptions& options, const PotentialField* seed) {
  require(options.iterations >= 2, ErrorCode::invalid_parameter, "separation study needs at least two iterations");
  const Grid grid = seed ? seed->grid : make_grid(options.elements, options.L, DomainKind::full_line);
  require(!grid.radial(), ErrorCode::mismatched_grid, "separation study runs on the line");
  const PotentialField V0 = seed ? *seed : two_bump_potential(grid, options.gamma, options.width, options.separation);

  FixedPointConfig cfg;
  cfg.tol = 1e-13;
  cfg.max_iters = options.iterations;
  cfg.bump_detection = true;
  cfg.stop_on_separation = false;

  SeparationStudy study;
  const FixedPointResult run = FixedPointSolver(grid, 1, cfg).run(V0, [&](const IterationStep& s) {
    SeparationSample sample;
    sample.iter = s.iter;
    sample.bumps = static_cast<int>(s.bump_centers.size());
    sample.bound_states = s.bound_states;
    if (s.bump_centers.size() >= 2) sample.distance = s.bump_centers.back() - s.bump_centers.front();
    study.samples.push_back(sample);
  });
  study.outcome = run.trace.outcome;
  study.separated = run.trace.outcome == Outcome::bump_separation;
  study.lambda = run.spectrum.bottom();
  study.predicted_rate = study.lambda < 0.0 ? 0.5 / std::sqrt(-study.lambda) : 0.0;

  const FixedPointResult single = FixedPointSolver(grid, 1, FixedPointConfig{})
                                      .run(gaussian_potential(grid, 1, V0.gamma, options.width));
  study.lambda_single = single.spectrum.bottom();

  if (study.separated) {
    std::vector<int> iters;
    std::vector<double> dists;
    for (const auto& s : study.samples)
      if (s.bumps >= 2) {
        iters.push_back(s.iter);
        dists.push_back(s.distance);
      }
    study.log_fit = fit_separation_law(iters, dists, options.fit_from);
    try {
      study.increment_fit = fit_increment_law(iters, dists, options.fit_from);
    } catch (const Error&) {
      study.increment_fit.reset();
    }
    for (int n = 100; n < static_cast<int>(study.samples.size()); n *= 10)
      if (study.samples[n].bumps >= 2 && study.samples[n / 10].bumps >= 2)
        study.decade_spacing.emplace_back(n, study.samples[n].distance - study.samples[n / 10].distance);
  }
  return study;
}

}  // namespace ltopt
