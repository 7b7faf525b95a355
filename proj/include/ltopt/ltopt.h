/* SPDX-License-Identifier: Apache-2.0 */
#ifndef LTOPT_LTOPT_H
#define LTOPT_LTOPT_H

#include <stddef.h>

#if defined(_WIN32)
#define LT_API __declspec(dllexport)
#else
#define LT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lt_status {
  LT_OK = 0,
  LT_INVALID_PARAMETER = 1,
  LT_MISMATCHED_GRID = 2,
  LT_FORBIDDEN_COMBINATION = 3,
  LT_SINGULAR_INTEGRAL = 4,
  LT_DOMAIN_ERROR = 5,
  LT_NO_CONVERGENCE = 6,
  LT_SINGULAR_MATRIX = 7,
  LT_ZERO_POTENTIAL = 8,
  LT_DEGENERATE_DENSITY = 9,
  LT_LOST_SPECTRUM = 10,
  LT_BRANCH_TERMINATED = 11,
  LT_INSUFFICIENT_DATA = 12,
  LT_INSUFFICIENT_CHANNELS = 13,
  LT_REFINEMENT_FAILURE = 14,
  LT_IO_ERROR = 15,
  LT_INTERNAL_ERROR = 99
} lt_status;

typedef enum lt_outcome { LT_CONVERGED = 0, LT_MAX_ITERS = 1, LT_BUMP_SEPARATION = 2 } lt_outcome;

typedef struct lt_grid lt_grid;
typedef struct lt_potential lt_potential;
typedef struct lt_run lt_run;
typedef struct lt_branch lt_branch;

/* Message of the last failing call on this thread ("" if none). */
LT_API const char* lt_last_error(void);
LT_API const char* lt_status_name(lt_status status);

/* radial != 0: [0, L] graded as L (i/N)^grading; otherwise uniform on [-L, L]. */
LT_API lt_status lt_grid_create(int elements, double L, int radial, double grading, lt_grid** out);
LT_API void lt_grid_destroy(lt_grid* grid);
LT_API size_t lt_grid_size(const lt_grid* grid);
LT_API lt_status lt_grid_nodes(const lt_grid* grid, double* out, size_t capacity);

/* Normalized Gaussian seed -amplitude exp(-((x - center)/width)^2). */
LT_API lt_status lt_potential_gaussian(const lt_grid* grid, int d, double gamma, double width, double amplitude,
                                       double center, lt_potential** out);
LT_API lt_status lt_potential_from_values(const lt_grid* grid, int d, double gamma, const double* values,
                                          size_t count, lt_potential** out);
LT_API lt_status lt_potential_load(const char* path, lt_potential** out);
LT_API lt_status lt_potential_save(const lt_potential* potential, const char* path);
LT_API void lt_potential_destroy(lt_potential* potential);
LT_API size_t lt_potential_size(const lt_potential* potential);
LT_API lt_status lt_potential_values(const lt_potential* potential, double* out, size_t capacity);
LT_API lt_status lt_potential_norm(const lt_potential* potential, double* out);
/* Ratio R(V) = E(V) / (L_sc int V_-^p) and bound-state count of V as given. */
LT_API lt_status lt_potential_ratio(const lt_potential* potential, double* ratio, int* bound_states);

typedef struct lt_solve_options {
  double tol;
  int max_iters;
  int nodal_density; /* 0: projected (default), 1: nodal */
  int workers;
} lt_solve_options;

LT_API lt_solve_options lt_solve_options_default(void);

LT_API lt_status lt_solve(const lt_potential* seed, const lt_solve_options* options, lt_run** out);
LT_API void lt_run_destroy(lt_run* run);
LT_API lt_outcome lt_run_outcome(const lt_run* run);
LT_API int lt_run_iterations(const lt_run* run);
LT_API double lt_run_ratio(const lt_run* run);
LT_API double lt_run_energy(const lt_run* run);
LT_API int lt_run_bound_states(const lt_run* run);
LT_API double lt_run_residual(const lt_run* run);
/* Copy of the final potential; release with lt_potential_destroy. */
LT_API lt_status lt_run_potential(const lt_run* run, lt_potential** out);
LT_API size_t lt_run_channels(const lt_run* run);
/* Eigenvalues of channel index c; *count receives the number available. */
LT_API lt_status lt_run_eigenvalues(const lt_run* run, size_t c, double* out, size_t capacity, size_t* count);

LT_API lt_status lt_branch_continue(const lt_potential* seed, double gamma_end, double dgamma,
                                    const lt_solve_options* options, lt_branch** out);
LT_API void lt_branch_destroy(lt_branch* branch);
LT_API size_t lt_branch_size(const lt_branch* branch);
LT_API lt_status lt_branch_point(const lt_branch* branch, size_t i, double* gamma, double* ratio, int* bound_states);
LT_API const char* lt_branch_label(const lt_branch* branch);
/* Empty when the branch covered the whole requested range. */
LT_API const char* lt_branch_termination(const lt_branch* branch);
/* *found = 0 when ratio - threshold does not change sign along the branch. */
LT_API lt_status lt_branch_crossing(const lt_branch* branch, double threshold, double width,
                                    const lt_solve_options* options, int* found, double* gamma_c);
/* best[i] = max(1, branch ratios at gammas[i]); which[i] = branch index or -1. */
LT_API lt_status lt_envelope(const lt_branch* const* branches, size_t count, const double* gammas, size_t n,
                             double* best, int* which);

/* Runs one CLI mode from a JSON config; *summary receives the JSON summary
   (release with lt_string_free) and *exit_status 0, 3 or 4. */
LT_API lt_status lt_run_config(const char* config_json, char** summary, int* exit_status);
/* Validates a JSON config without computing anything. */
LT_API lt_status lt_check_config(const char* config_json);
LT_API void lt_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
