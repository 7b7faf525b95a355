// SPDX-License-Identifier: Apache-2.0
#include "ltopt/ltopt.h"

#include <cstdlib>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "continuation.hpp"
#include "error.hpp"
#include "run.hpp"
#include "snapshot.hpp"

struct lt_grid {
  ltopt::Grid grid;
};

struct lt_potential {
  ltopt::PotentialField field;
};

struct lt_run {
  ltopt::FixedPointResult result;
};

struct lt_branch {
  ltopt::Branch branch;
};

namespace {

thread_local std::string last_error;

lt_status to_status(ltopt::ErrorCode code) { return static_cast<lt_status>(static_cast<int>(code)); }

template <class F>
lt_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LT_OK;
  } catch (const ltopt::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return LT_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown error";
    return LT_INTERNAL_ERROR;
  }
}

void need(const void* p, const char* what) {
  ltopt::require(p != nullptr, ltopt::ErrorCode::invalid_parameter, std::string(what) + " is null");
}

ltopt::FixedPointConfig config_of(const lt_solve_options* options) {
  const lt_solve_options o = options ? *options : lt_solve_options_default();
  ltopt::FixedPointConfig cfg;
  cfg.tol = o.tol;
  cfg.max_iters = o.max_iters;
  cfg.density = o.nodal_density ? ltopt::DensityRule::nodal : ltopt::DensityRule::projected;
  cfg.scan.workers = o.workers < 1 ? 1 : o.workers;
  ltopt::validate(cfg);
  return cfg;
}

lt_status copy_out(const std::vector<double>& v, double* out, size_t capacity) {
  return guarded([&] {
    need(out, "output buffer");
    ltopt::require(capacity >= v.size(), ltopt::ErrorCode::invalid_parameter, "output buffer too small");
    std::memcpy(out, v.data(), v.size() * sizeof(double));
  });
}

}  // namespace

extern "C" {

const char* lt_last_error(void) { return last_error.c_str(); }

const char* lt_status_name(lt_status status) {
  if (status == LT_OK) return "ok";
  if (status == LT_INTERNAL_ERROR) return "internal-error";
  return ltopt::error_code_name(static_cast<ltopt::ErrorCode>(status));
}

lt_status lt_grid_create(int elements, double L, int radial, double grading, lt_grid** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto kind = radial ? ltopt::DomainKind::radial_halfline : ltopt::DomainKind::full_line;
    *out = new lt_grid{ltopt::make_grid(elements, L, kind, grading)};
  });
}

void lt_grid_destroy(lt_grid* grid) { delete grid; }

size_t lt_grid_size(const lt_grid* grid) { return grid ? grid->grid.size() : 0; }

lt_status lt_grid_nodes(const lt_grid* grid, double* out, size_t capacity) {
  if (!grid) return guarded([] { need(nullptr, "grid"); });
  return copy_out(grid->grid.nodes, out, capacity);
}

lt_status lt_potential_gaussian(const lt_grid* grid, int d, double gamma, double width, double amplitude,
                                double center, lt_potential** out) {
  return guarded([&] {
    need(grid, "grid");
    need(out, "out");
    *out = nullptr;
    ltopt::require((d >= 2) == grid->grid.radial(), ltopt::ErrorCode::mismatched_grid,
                   "d = 1 needs a line grid and d >= 2 a radial grid");
    ltopt::validate(ltopt::LTParams{gamma, d});
    *out = new lt_potential{ltopt::gaussian_potential(grid->grid, d, gamma, width, amplitude, center)};
  });
}

lt_status lt_potential_from_values(const lt_grid* grid, int d, double gamma, const double* values, size_t count,
                                   lt_potential** out) {
  return guarded([&] {
    need(grid, "grid");
    need(values, "values");
    need(out, "out");
    *out = nullptr;
    ltopt::require(count == grid->grid.size(), ltopt::ErrorCode::mismatched_grid, "value count does not match grid");
    ltopt::require((d >= 2) == grid->grid.radial(), ltopt::ErrorCode::mismatched_grid,
                   "d = 1 needs a line grid and d >= 2 a radial grid");
    ltopt::validate(ltopt::LTParams{gamma, d});
    ltopt::PotentialField V;
    V.grid = grid->grid;
    V.dim = d;
    V.gamma = gamma;
    V.values.assign(values, values + count);
    *out = new lt_potential{std::move(V)};
  });
}

lt_status lt_potential_load(const char* path, lt_potential** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new lt_potential{ltopt::load_snapshot(path)};
  });
}

lt_status lt_potential_save(const lt_potential* potential, const char* path) {
  return guarded([&] {
    need(potential, "potential");
    need(path, "path");
    ltopt::save_snapshot(path, potential->field);
  });
}

void lt_potential_destroy(lt_potential* potential) { delete potential; }

size_t lt_potential_size(const lt_potential* potential) { return potential ? potential->field.values.size() : 0; }

lt_status lt_potential_values(const lt_potential* potential, double* out, size_t capacity) {
  if (!potential) return guarded([] { need(nullptr, "potential"); });
  return copy_out(potential->field.values, out, capacity);
}

lt_status lt_potential_norm(const lt_potential* potential, double* out) {
  return guarded([&] {
    need(potential, "potential");
    need(out, "out");
    *out = ltopt::norm_integral(potential->field, ltopt::params_of(potential->field));
  });
}

lt_status lt_potential_ratio(const lt_potential* potential, double* ratio, int* bound_states) {
  return guarded([&] {
    need(potential, "potential");
    const ltopt::PotentialField& V = potential->field;
    const ltopt::Spectrum s = ltopt::OperatorFamily(V.grid, V.dim).scan(V.values);
    const ltopt::Evaluation ev = ltopt::ratio_R(V, s, ltopt::params_of(V));
    if (ratio) *ratio = ev.ratio;
    if (bound_states) *bound_states = ev.bound_states;
  });
}

lt_solve_options lt_solve_options_default(void) {
  const ltopt::FixedPointConfig d;
  return lt_solve_options{d.tol, d.max_iters, 0, 1};
}

lt_status lt_solve(const lt_potential* seed, const lt_solve_options* options, lt_run** out) {
  return guarded([&] {
    need(seed, "seed");
    need(out, "out");
    *out = nullptr;
    *out = new lt_run{ltopt::fixed_point_run(seed->field, config_of(options))};
  });
}

void lt_run_destroy(lt_run* run) { delete run; }

lt_outcome lt_run_outcome(const lt_run* run) {
  if (!run) return LT_MAX_ITERS;
  switch (run->result.trace.outcome) {
    case ltopt::Outcome::converged: return LT_CONVERGED;
    case ltopt::Outcome::bump_separation: return LT_BUMP_SEPARATION;
    default: return LT_MAX_ITERS;
  }
}

int lt_run_iterations(const lt_run* run) { return run ? static_cast<int>(run->result.trace.steps.size()) : 0; }
double lt_run_ratio(const lt_run* run) { return run ? run->result.evaluation.ratio : 0.0; }
double lt_run_energy(const lt_run* run) { return run ? run->result.evaluation.energy : 0.0; }
int lt_run_bound_states(const lt_run* run) { return run ? run->result.evaluation.bound_states : 0; }

double lt_run_residual(const lt_run* run) {
  return run && !run->result.trace.steps.empty() ? run->result.trace.steps.back().residual_sup : 0.0;
}

lt_status lt_run_potential(const lt_run* run, lt_potential** out) {
  return guarded([&] {
    need(run, "run");
    need(out, "out");
    *out = new lt_potential{run->result.potential};
  });
}

size_t lt_run_channels(const lt_run* run) { return run ? run->result.spectrum.channels.size() : 0; }

lt_status lt_run_eigenvalues(const lt_run* run, size_t c, double* out, size_t capacity, size_t* count) {
  return guarded([&] {
    need(run, "run");
    ltopt::require(c < run->result.spectrum.channels.size(), ltopt::ErrorCode::invalid_parameter,
                   "channel index out of range");
    const auto& pairs = run->result.spectrum.channels[c].pairs;
    if (count) *count = pairs.size();
    if (out) {
      ltopt::require(capacity >= pairs.size(), ltopt::ErrorCode::invalid_parameter, "output buffer too small");
      for (size_t i = 0; i < pairs.size(); ++i) out[i] = pairs[i].lambda;
    }
  });
}

lt_status lt_branch_continue(const lt_potential* seed, double gamma_end, double dgamma,
                             const lt_solve_options* options, lt_branch** out) {
  return guarded([&] {
    need(seed, "seed");
    need(out, "out");
    *out = nullptr;
    ltopt::ContinuationOptions o;
    o.dgamma = dgamma;
    o.solver = config_of(options);
    *out = new lt_branch{ltopt::continue_branch(seed->field, gamma_end, o)};
  });
}

void lt_branch_destroy(lt_branch* branch) { delete branch; }

size_t lt_branch_size(const lt_branch* branch) { return branch ? branch->branch.points.size() : 0; }

lt_status lt_branch_point(const lt_branch* branch, size_t i, double* gamma, double* ratio, int* bound_states) {
  return guarded([&] {
    need(branch, "branch");
    ltopt::require(i < branch->branch.points.size(), ltopt::ErrorCode::invalid_parameter, "point index out of range");
    const auto& p = branch->branch.points[i];
    if (gamma) *gamma = p.gamma;
    if (ratio) *ratio = p.ratio;
    if (bound_states) *bound_states = p.bound_states;
  });
}

const char* lt_branch_label(const lt_branch* branch) { return branch ? branch->branch.label.c_str() : ""; }

const char* lt_branch_termination(const lt_branch* branch) {
  return branch ? branch->branch.termination.c_str() : "";
}

lt_status lt_branch_crossing(const lt_branch* branch, double threshold, double width,
                             const lt_solve_options* options, int* found, double* gamma_c) {
  return guarded([&] {
    need(branch, "branch");
    need(found, "found");
    ltopt::CrossingOptions co;
    co.threshold = threshold;
    co.width = width;
    co.solver = config_of(options);
    const auto c = ltopt::find_crossing(branch->branch, co);
    *found = c ? 1 : 0;
    if (c && gamma_c) *gamma_c = c->gamma_c;
  });
}

lt_status lt_envelope(const lt_branch* const* branches, size_t count, const double* gammas, size_t n, double* best,
                      int* which) {
  return guarded([&] {
    need(branches, "branches");
    need(gammas, "gammas");
    need(best, "best");
    std::vector<ltopt::Branch> list;
    for (size_t i = 0; i < count; ++i) {
      need(branches[i], "branch");
      list.push_back(branches[i]->branch);
      list.back().label = "#" + std::to_string(i);
    }
    const auto env = ltopt::upper_envelope(list, std::span<const double>(gammas, n));
    for (size_t i = 0; i < n; ++i) {
      best[i] = env[i].best_ratio;
      if (which)
        which[i] = env[i].best_label == ltopt::kSemiclassicalLabel ? -1 : std::stoi(env[i].best_label.substr(1));
    }
  });
}

lt_status lt_check_config(const char* config_json) {
  return guarded([&] {
    need(config_json, "config");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      ltopt::fail(ltopt::ErrorCode::invalid_parameter, std::string("config is not valid JSON: ") + e.what());
    }
    ltopt::validate(ltopt::config_from_json(j));
  });
}

lt_status lt_run_config(const char* config_json, char** summary, int* exit_status) {
  return guarded([&] {
    need(config_json, "config");
    need(summary, "summary");
    *summary = nullptr;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      ltopt::fail(ltopt::ErrorCode::invalid_parameter, std::string("config is not valid JSON: ") + e.what());
    }
    const ltopt::RunReport rep = ltopt::run(ltopt::config_from_json(j));
    const std::string text = rep.summary.dump(2);
    *summary = static_cast<char*>(std::malloc(text.size() + 1));
    ltopt::require(*summary != nullptr, ltopt::ErrorCode::io_error, "out of memory");
    std::memcpy(*summary, text.c_str(), text.size() + 1);
    if (exit_status) *exit_status = rep.exit_status;
  });
}

void lt_string_free(char* s) { std::free(s); }

}  // extern "C"
