// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optimizer.hpp"

namespace ltopt {

enum class Direction { increasing_gamma, decreasing_gamma };

const char* direction_name(Direction direction) noexcept;

struct BranchPoint {
  double gamma = 0.0;
  double ratio = 0.0;
  double energy = 0.0;
  int bound_states = 0;
  int iterations = 0;
  /// Identifier handed back by the snapshot sink; empty when none is attached.
  std::string snapshot_ref;
  PotentialField potential;
};

/// Bound-state count changed between two consecutive accepted points.
struct BranchEvent {
  double gamma_before = 0.0;
  double gamma_after = 0.0;
  int count_before = 0;
  int count_after = 0;
};

struct Branch {
  std::string label;
  int dim = 1;
  Direction direction = Direction::increasing_gamma;
  std::vector<BranchPoint> points;
  std::vector<BranchEvent> events;
  /// Why the branch stopped short of the requested range; empty otherwise.
  std::string termination;
};

/// "k=<count>" from the bound-state count at the point nearest the middle of
/// the branch's gamma span.
std::string branch_label(const Branch& branch);

/// Called for every accepted point; returns the snapshot identifier.
using SnapshotSink = std::function<std::string(const Branch&, const BranchPoint&)>;

struct ContinuationOptions {
  double dgamma = 0.01;
  int max_halvings = 6;
  FixedPointConfig solver;
  SnapshotSink snapshots;
};

inline constexpr double kMaxContinuationStep = 0.05;

/// Solves at the seed's gamma, then steps toward gamma_end warm-starting
/// each solve from the last accepted potential. A failed, diverging or
/// separating solve halves the step (up to max_halvings times in a row);
/// after that the branch ends with a recorded reason. Throws
/// branch_terminated only when the seed itself does not converge.
Branch continue_branch(const PotentialField& seed, double gamma_end, const ContinuationOptions& options);

struct Crossing {
  std::string branch_label;
  double gamma_c = 0.0;
  /// Final bisection bracket, ratios on opposite sides of the threshold.
  BranchPoint left;
  BranchPoint right;
  /// Bracketing pair found on the branch before refinement.
  double initial_left = 0.0;
  double initial_right = 0.0;
  int solves = 0;
};

struct CrossingOptions {
  double threshold = 1.0;
  double width = 1e-4;
  FixedPointConfig solver;
};

/// First sign change of ratio - threshold along the branch, refined by
/// bisection with warm-started solves until the bracket is at most
/// options.width wide. gamma_c interpolates linearly inside the bracket.
std::optional<Crossing> find_crossing(const Branch& branch, const CrossingOptions& options);

struct EnvelopePoint {
  double gamma = 0.0;
  double best_ratio = 1.0;
  std::string best_label;
};

inline constexpr const char* kSemiclassicalLabel = "semiclassical";

/// Pointwise max of max(ratio, 1) over the branches, each linearly
/// interpolated and contributing only inside its own gamma span.
std::vector<EnvelopePoint> upper_envelope(std::span<const Branch> branches, std::span<const double> gammas);

struct ShiftedPair {
  int k = 0;
  int l = 0;
  /// lambda_{k+1,l} - lambda_{k,l+2}
  double difference = 0.0;
};

struct HarmonicPrediction {
  int k = 0;
  int l = 0;
  double lambda = 0.0;
  double predicted = 0.0;
};

struct HarmonicPatternReport {
  double v0 = 0.0;
  double v2 = 0.0;  // finite-difference V''(0)
  std::vector<ShiftedPair> shifted;
  std::vector<HarmonicPrediction> predictions;
  /// Number of negative eigenvalues per channel.
  std::vector<int> counts;
  /// counts[l] + l is the same for every channel.
  bool triangular = false;
  double max_shift_difference = 0.0;
  double max_prediction_residual = 0.0;
};

/// Compares a radial spectrum with the oscillator levels of the quadratic
/// expansion of V at the origin,
///   lambda_{k,l} ~ V(0) + sqrt(2 V''(0)) (2k + l + d/2),  k = 0, 1, ...
/// over pairs with 2k + l <= max_level. Throws insufficient_channels with
/// fewer than three channels.
HarmonicPatternReport harmonic_pattern_check(const Spectrum& spectrum, const PotentialField& V, int max_level = 4);

}  // namespace ltopt
