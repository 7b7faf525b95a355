#include <atomic>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "continuation.hpp"
#include "error.hpp"
#include "functional.hpp"

using namespace ltopt;

namespace {

double conjectured_ratio(double gamma) { return 2 * std::pow((gamma - 0.5) / (gamma + 0.5), gamma - 0.5); }

Branch synthetic(std::string label, std::vector<std::pair<double, double>> pts) {
  Branch b;
  b.label = std::move(label);
  for (auto [g, r] : pts) {
    BranchPoint p;
    p.gamma = g;
    p.ratio = r;
    p.bound_states = 1;
    b.points.push_back(p);
  }
  return b;
}

Spectrum from_levels(int d, const std::vector<std::vector<double>>& levels) {
  Spectrum s;
  s.dim = d;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    ChannelSpectrum c;
    c.l = static_cast<int>(l);
    c.multiplicity = multiplicity(d, c.l);
    for (double v : levels[l]) c.pairs.push_back({v, {}});
    s.channels.push_back(c);
  }
  return s;
}

}  // namespace

TEST_CASE("one-dimensional branch follows the conjectured ratio") {
  Grid g = make_grid(2000, 40.0, DomainKind::full_line, 1.0);
  ContinuationOptions opts;
  opts.dgamma = 0.02;
  std::atomic<int> stored{0};
  opts.snapshots = [&](const Branch&, const BranchPoint& p) {
    ++stored;
    return "point_" + std::to_string(p.gamma);
  };
  Branch b = continue_branch(gaussian_potential(g, 1, 1.1, 1.0), 1.2, opts);
  CHECK(b.termination.empty());
  CHECK(b.label == "k=1");
  CHECK(b.direction == Direction::increasing_gamma);
  REQUIRE(b.points.size() == 6);
  CHECK(stored == 6);
  CHECK(b.events.empty());
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& p = b.points[i];
    CHECK(std::abs(p.ratio - conjectured_ratio(p.gamma)) < 1e-3);
    CHECK(!p.snapshot_ref.empty());
    if (i) {
      CHECK(p.gamma > b.points[i - 1].gamma);
      CHECK(p.ratio <= b.points[i - 1].ratio + 1e-4);
    }
  }
  CHECK(!find_crossing(b, {}).has_value());

  // warm restart from an accepted point
  FixedPointConfig cfg;
  auto again = fixed_point_run(b.points[3].potential, cfg);
  CHECK(again.trace.steps.size() <= 4);
}

TEST_CASE("decreasing direction") {
  Grid g = make_grid(1000, 30.0, DomainKind::full_line, 1.0);
  ContinuationOptions opts;
  opts.dgamma = 0.05;
  Branch b = continue_branch(gaussian_potential(g, 1, 1.0, 1.0), 0.9, opts);
  CHECK(b.direction == Direction::decreasing_gamma);
  REQUIRE(b.points.size() == 3);
  CHECK(b.points.back().gamma == doctest::Approx(0.9));
  CHECK(b.points.back().ratio > b.points.front().ratio);
}

TEST_CASE("crossing of the one-bound-state branch at 3/2") {
  Grid g = make_grid(2000, 40.0, DomainKind::full_line, 1.0);
  ContinuationOptions opts;
  opts.dgamma = 0.02;
  Branch b = continue_branch(gaussian_potential(g, 1, 1.46, 1.0), 1.52, opts);
  CHECK(b.termination.empty());
  CrossingOptions co;
  co.width = 1e-3;
  auto c = find_crossing(b, co);
  REQUIRE(c.has_value());
  CHECK(std::abs(c->gamma_c - 1.5) < 2e-3);
  CHECK(c->gamma_c > c->initial_left);
  CHECK(c->gamma_c < c->initial_right);
  CHECK(c->left.ratio > 1.0);
  CHECK(c->right.ratio < 1.0);
  CHECK(c->right.gamma - c->left.gamma <= 1e-3);
}

TEST_CASE("continuation rejects oversized steps and failed seeds") {
  Grid g = make_grid(500, 20.0, DomainKind::full_line, 1.0);
  ContinuationOptions big;
  big.dgamma = 0.1;
  CHECK_THROWS_AS(continue_branch(gaussian_potential(g, 1, 1.2, 1.0), 1.3, big), Error);

  ContinuationOptions tight;
  tight.solver.max_iters = 1;
  try {
    continue_branch(gaussian_potential(g, 1, 1.2, 1.0), 1.3, tight);
    FAIL("expected branch termination");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::branch_terminated);
  }
}

TEST_CASE("upper envelope") {
  std::vector<double> gammas{1.0, 1.1, 1.2, 1.3};
  std::vector<Branch> low{synthetic("k=1", {{1.0, 0.9}, {1.3, 0.8}})};
  for (const auto& e : upper_envelope(low, gammas)) {
    CHECK(e.best_ratio == 1.0);
    CHECK(e.best_label == kSemiclassicalLabel);
  }

  std::vector<Branch> two{synthetic("k=1", {{1.0, 1.2}, {1.2, 1.0}, {1.3, 0.9}}),
                          synthetic("k=4", {{1.05, 1.05}, {1.25, 1.05}})};
  auto env = upper_envelope(two, gammas);
  REQUIRE(env.size() == 4);
  CHECK(env[0].best_label == "k=1");
  CHECK(env[0].best_ratio == doctest::Approx(1.2));
  CHECK(env[1].best_label == "k=1");
  CHECK(env[1].best_ratio == doctest::Approx(1.1));
  CHECK(env[2].best_label == "k=4");
  CHECK(env[3].best_label == kSemiclassicalLabel);
  for (const auto& b : two)
    for (const auto& p : b.points)
      for (const auto& e : env)
        if (e.gamma == p.gamma) CHECK(e.best_ratio >= p.ratio);
}

TEST_CASE("harmonic pattern on an exact oscillator spectrum") {
  Grid r = make_grid(100, 10.0, DomainKind::radial_halfline, 1.0);
  PotentialField V{r, {}, 3, 1.0};
  for (double x : r.nodes) V.values.push_back(-10.0 + x * x / 4);
  std::vector<std::vector<double>> levels(6);
  for (int l = 0; l < 6; ++l)
    for (int k = 0; -10.0 + 2 * k + l + 1.5 < 0; ++k) levels[l].push_back(-10.0 + 2 * k + l + 1.5);
  auto rep = harmonic_pattern_check(from_levels(3, levels), V);
  CHECK(rep.v0 == -10.0);
  CHECK(rep.v2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(!rep.predictions.empty());
  CHECK(!rep.shifted.empty());
  CHECK(rep.max_prediction_residual < 1e-10);
  CHECK(rep.max_shift_difference < 1e-12);
}

TEST_CASE("harmonic pattern: triangular cutoff and too few channels") {
  Grid r = make_grid(100, 10.0, DomainKind::radial_halfline);
  PotentialField V{r, std::vector<double>(r.size(), -1.0), 3, 1.0};
  auto tri = harmonic_pattern_check(from_levels(3, {{-4, -3, -2, -1}, {-3, -2, -1}, {-2, -1}, {-1}}), V);
  CHECK(tri.triangular);
  CHECK(tri.counts == std::vector<int>{4, 3, 2, 1});
  auto flat = harmonic_pattern_check(from_levels(3, {{-4, -3}, {-3, -2}, {-2, -1}}), V);
  CHECK(!flat.triangular);
  try {
    harmonic_pattern_check(from_levels(3, {{-1}}), V);
    FAIL("expected insufficient channels");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_channels);
  }
}
