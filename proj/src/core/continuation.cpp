// SPDX-License-Identifier: Apache-2.0
#include "continuation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "error.hpp"

namespace ltopt {

const char* direction_name(Direction direction) noexcept {
  return direction == Direction::increasing_gamma ? "increasing_gamma" : "decreasing_gamma";
}

namespace {

BranchPoint point_of(const FixedPointResult& result) {
  BranchPoint p;
  p.gamma = result.potential.gamma;
  p.ratio = result.evaluation.ratio;
  p.energy = result.evaluation.energy;
  p.bound_states = result.evaluation.bound_states;
  p.iterations = static_cast<int>(result.trace.steps.size());
  p.potential = result.potential;
  return p;
}

struct Attempt {
  std::optional<FixedPointResult> result;
  std::string failure;
};

Attempt solve_at(const FixedPointSolver& solver, PotentialField start, double gamma) {
  start.gamma = gamma;
  Attempt a;
  try {
    FixedPointResult r = solver.run(std::move(start));
    if (r.trace.outcome == Outcome::converged) {
      a.result = std::move(r);
      return a;
    }
    a.failure = r.trace.outcome == Outcome::bump_separation ? "divergence: bump separation"
                                                             : "divergence: no convergence within max_iters";
  } catch (const Error& e) {
    a.failure = e.code() == ErrorCode::lost_spectrum ? std::string("lost spectrum: ") + e.what()
                                                     : std::string("divergence: ") + e.what();
  }
  return a;
}

}  // namespace

std::string branch_label(const Branch& branch) {
  if (branch.points.empty()) return "k=0";
  const auto [lo, hi] = std::minmax_element(branch.points.begin(), branch.points.end(),
                                            [](const BranchPoint& a, const BranchPoint& b) { return a.gamma < b.gamma; });
  const double mid = 0.5 * (lo->gamma + hi->gamma);
  const BranchPoint* best = &branch.points.front();
  for (const auto& p : branch.points)
    if (std::abs(p.gamma - mid) < std::abs(best->gamma - mid)) best = &p;
  return "k=" + std::to_string(best->bound_states);
}

Branch continue_branch(const PotentialField& seed, double gamma_end, const ContinuationOptions& options) {
  require(options.dgamma > 0.0 && options.dgamma <= kMaxContinuationStep, ErrorCode::invalid_parameter,
          "continuation step must lie in (0, 0.05]");
  require(options.max_halvings >= 0, ErrorCode::invalid_parameter, "max_halvings must be nonnegative");
  validate(LTParams{seed.gamma, seed.dim});
  validate(LTParams{gamma_end, seed.dim});

  const FixedPointSolver solver(seed.grid, seed.dim, options.solver);
  Branch branch;
  branch.dim = seed.dim;
  branch.direction = gamma_end >= seed.gamma ? Direction::increasing_gamma : Direction::decreasing_gamma;
  const double sign = branch.direction == Direction::increasing_gamma ? 1.0 : -1.0;

  auto accept = [&](const FixedPointResult& r) {
    BranchPoint p = point_of(r);
    if (!branch.points.empty() && branch.points.back().bound_states != p.bound_states)
      branch.events.push_back(
          {branch.points.back().gamma, p.gamma, branch.points.back().bound_states, p.bound_states});
    branch.points.push_back(std::move(p));
    if (options.snapshots) branch.points.back().snapshot_ref = options.snapshots(branch, branch.points.back());
  };

  Attempt first = solve_at(solver, seed, seed.gamma);
  if (!first.result) fail(ErrorCode::branch_terminated, "seed did not converge (" + first.failure + ")");
  accept(*first.result);

  double step = options.dgamma;
  int halvings = 0;
  const double eps = 1e-12;
  while (sign * (gamma_end - branch.points.back().gamma) > eps) {
    const double remaining = std::abs(gamma_end - branch.points.back().gamma);
    const double gamma = remaining <= step + eps ? gamma_end : branch.points.back().gamma + sign * step;
    Attempt a = solve_at(solver, branch.points.back().potential, gamma);
    if (a.result) {
      accept(*a.result);
      step = options.dgamma;
      halvings = 0;
      continue;
    }
    if (++halvings > options.max_halvings) {
      branch.termination = "step-size underflow at gamma " + std::to_string(gamma) + " (" + a.failure + ")";
      break;
    }
    step *= 0.5;
  }
  branch.label = branch_label(branch);
  return branch;
}

std::optional<Crossing> find_crossing(const Branch& branch, const CrossingOptions& options) {
  require(branch.points.size() >= 2, ErrorCode::insufficient_data, "crossing search needs at least two points");
  require(options.width > 0.0, ErrorCode::invalid_parameter, "crossing width must be positive");
  const double t = options.threshold;

  std::size_t i = 0;
  for (; i + 1 < branch.points.size(); ++i) {
    const double a = branch.points[i].ratio - t, b = branch.points[i + 1].ratio - t;
    if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) break;
  }
  if (i + 1 >= branch.points.size()) return std::nullopt;

  BranchPoint lo = branch.points[i], hi = branch.points[i + 1];
  if (lo.gamma > hi.gamma) std::swap(lo, hi);
  Crossing c;
  c.branch_label = branch.label;
  c.initial_left = lo.gamma;
  c.initial_right = hi.gamma;

  const FixedPointSolver solver(lo.potential.grid, branch.dim, options.solver);
  const bool lo_above = lo.ratio > t;
  while (hi.gamma - lo.gamma > options.width) {
    const double mid = 0.5 * (lo.gamma + hi.gamma);
    const BranchPoint& start = std::abs(lo.ratio - t) <= std::abs(hi.ratio - t) ? lo : hi;
    Attempt a = solve_at(solver, start.potential, mid);
    ++c.solves;
    if (!a.result)
      fail(ErrorCode::refinement_failure,
           "solve at gamma " + std::to_string(mid) + " inside the crossing bracket failed (" + a.failure + ")");
    BranchPoint p = point_of(*a.result);
    if ((p.ratio > t) == lo_above)
      lo = std::move(p);
    else
      hi = std::move(p);
  }
  const double span = hi.ratio - lo.ratio;
  double gc = span != 0.0 ? lo.gamma + (t - lo.ratio) * (hi.gamma - lo.gamma) / span : 0.5 * (lo.gamma + hi.gamma);
  if (!(gc > lo.gamma && gc < hi.gamma)) gc = 0.5 * (lo.gamma + hi.gamma);
  c.gamma_c = gc;
  c.left = std::move(lo);
  c.right = std::move(hi);
  return c;
}

std::vector<EnvelopePoint> upper_envelope(std::span<const Branch> branches, std::span<const double> gammas) {
  require(!branches.empty(), ErrorCode::invalid_parameter, "envelope needs at least one branch");
  struct Curve {
    std::vector<std::pair<double, double>> pts;
    std::string label;
  };
  std::vector<Curve> curves;
  for (const Branch& b : branches) {
    Curve c;
    c.label = b.label.empty() ? branch_label(b) : b.label;
    for (const auto& p : b.points) c.pts.emplace_back(p.gamma, p.ratio);
    std::sort(c.pts.begin(), c.pts.end());
    if (!c.pts.empty()) curves.push_back(std::move(c));
  }

  std::vector<EnvelopePoint> out;
  out.reserve(gammas.size());
  for (double g : gammas) {
    EnvelopePoint e{g, 1.0, kSemiclassicalLabel};
    for (const Curve& c : curves) {
      if (g < c.pts.front().first || g > c.pts.back().first) continue;
      auto it = std::lower_bound(c.pts.begin(), c.pts.end(), std::make_pair(g, -HUGE_VAL));
      double value;
      if (it->first == g || it == c.pts.begin()) {
        value = it->second;
      } else {
        const auto& [g0, r0] = *(it - 1);
        const auto& [g1, r1] = *it;
        value = r0 + (r1 - r0) * (g - g0) / (g1 - g0);
      }
      if (value > e.best_ratio) {
        e.best_ratio = value;
        e.best_label = c.label;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

HarmonicPatternReport harmonic_pattern_check(const Spectrum& spectrum, const PotentialField& V, int max_level) {
  require(V.grid.radial(), ErrorCode::mismatched_grid, "harmonic pattern needs a radial potential");
  require(spectrum.channels.size() >= 3, ErrorCode::insufficient_channels,
          "harmonic pattern needs at least three channels, got " + std::to_string(spectrum.channels.size()));
  require(V.values.size() >= 3, ErrorCode::mismatched_grid, "potential has fewer than three nodes");

  HarmonicPatternReport rep;
  const auto& r = V.grid.nodes;
  const auto& v = V.values;
  // Even quadratic a + b r^2 through the nodes at r_1 and r_2, anchored at the origin node.
  rep.v0 = v[0];
  const double slope1 = (v[1] - v[0]) / (r[1] * r[1]);
  const double slope2 = (v[2] - v[0]) / (r[2] * r[2]);
  rep.v2 = slope1 + slope2;  // 2b, averaged over the two nearest nodes

  std::map<std::pair<int, int>, double> lambda;
  for (const auto& c : spectrum.channels) {
    rep.counts.push_back(static_cast<int>(c.pairs.size()));
    for (std::size_t k = 0; k < c.pairs.size(); ++k) lambda[{static_cast<int>(k), c.l}] = c.pairs[k].lambda;
  }
  rep.triangular = true;
  for (std::size_t l = 0; l < rep.counts.size(); ++l)
    rep.triangular = rep.triangular && rep.counts[l] + static_cast<int>(l) == rep.counts[0];

  const double omega = rep.v2 > 0.0 ? std::sqrt(2.0 * rep.v2) : 0.0;
  for (const auto& [kl, value] : lambda) {
    const auto [k, l] = kl;
    if (2 * k + l > max_level) continue;
    const double predicted = rep.v0 + omega * (2 * k + l + 0.5 * spectrum.dim);
    rep.predictions.push_back({k, l, value, predicted});
    rep.max_prediction_residual = std::max(rep.max_prediction_residual, std::abs(value - predicted));
    auto up = lambda.find({k + 1, l});
    auto across = lambda.find({k, l + 2});
    if (up != lambda.end() && across != lambda.end()) {
      rep.shifted.push_back({k, l, up->second - across->second});
      rep.max_shift_difference = std::max(rep.max_shift_difference, std::abs(up->second - across->second));
    }
  }
  return rep;
}

}  // namespace ltopt
