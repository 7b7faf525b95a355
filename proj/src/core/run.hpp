// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "optimizer.hpp"

namespace ltopt {

enum class Mode { solve, branch, envelope, convergence_study, separation_study };

const char* mode_name(Mode mode) noexcept;

struct SeedSpec {
  double width = 1.0;
  double amplitude = 1.0;
  double center = 0.0;
  /// Snapshot to start from instead of a Gaussian; its grid is used as is.
  std::string snapshot;
  /// Gaussian widths tried by envelope mode.
  std::vector<double> library = {1, 2, 4, 8, 16, 32};
  /// Distance between the two wells of the separation-study seed.
  double separation = 4.0;
};

struct RunConfig {
  Mode mode = Mode::solve;
  int d = 1;
  double gamma = 1.2;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double gamma_step = 0.01;
  int N = 8000;
  double L = 40.0;
  double grading = kDefaultGrading;
  double tol = 1e-10;
  int max_iters = 10000;
  SeedSpec seed;
  std::string out = "lt_out";
  int workers = 1;
  DensityRule density = DensityRule::projected;
  double crossing_width = 1e-4;
};

nlohmann::json to_json(const RunConfig& config);
/// Starts from the defaults above; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);

/// Checks every parameter against the preconditions of the modules the
/// mode will call. Throws before any computation starts.
void validate(const RunConfig& config);

/// min(config.workers, LT_OPTIM_WORKERS) when the variable is set.
int effective_workers(const RunConfig& config);

struct RunReport {
  nlohmann::json summary;
  /// 0 success, 3 numerical failure, 4 bump separation.
  int exit_status = 0;
};

/// Runs one mode, writing CSV, snapshots and summary.json under config.out.
/// Every CSV starts with '# config: <json>' and '# columns: ...' lines.
RunReport run(const RunConfig& config);

}  // namespace ltopt
