/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ltopt/ltopt.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static double conjectured(double g) { return 2.0 * pow((g - 0.5) / (g + 0.5), g - 0.5); }

int main(void) {
  lt_grid* grid = NULL;
  EXPECT(lt_grid_create(4, 1.0, 1, 1.0, &grid) == LT_INVALID_PARAMETER);
  EXPECT(grid == NULL);
  EXPECT(strlen(lt_last_error()) > 0);
  EXPECT(strcmp(lt_status_name(LT_INVALID_PARAMETER), "invalid-parameter") == 0);

  EXPECT(lt_grid_create(2000, 40.0, 0, 1.0, &grid) == LT_OK);
  EXPECT(lt_grid_size(grid) == 2001);
  double ends[2001];
  EXPECT(lt_grid_nodes(grid, ends, 10) == LT_INVALID_PARAMETER);
  EXPECT(lt_grid_nodes(grid, ends, 2001) == LT_OK);
  EXPECT(ends[0] == -40.0 && ends[2000] == 40.0);

  lt_potential* seed = NULL;
  EXPECT(lt_potential_gaussian(grid, 1, 0.4, 1.0, 1.0, 0.0, &seed) == LT_INVALID_PARAMETER);
  EXPECT(lt_potential_gaussian(grid, 1, 1.2, 1.0, 1.0, 0.0, &seed) == LT_OK);
  double norm = 0.0;
  EXPECT(lt_potential_norm(seed, &norm) == LT_OK);
  EXPECT(fabs(norm - 1.0) < 1e-12);

  lt_solve_options opts = lt_solve_options_default();
  EXPECT(opts.tol == 1e-10);
  lt_run* run = NULL;
  EXPECT(lt_solve(seed, &opts, &run) == LT_OK);
  EXPECT(lt_run_outcome(run) == LT_CONVERGED);
  EXPECT(lt_run_bound_states(run) == 1);
  EXPECT(fabs(lt_run_ratio(run) - conjectured(1.2)) < 1e-3);
  EXPECT(lt_run_residual(run) <= opts.tol);
  EXPECT(lt_run_channels(run) == 1);
  double lambda[4];
  size_t count = 0;
  EXPECT(lt_run_eigenvalues(run, 0, lambda, 4, &count) == LT_OK);
  EXPECT(count == 1 && lambda[0] < 0.0);
  EXPECT(lt_run_eigenvalues(run, 3, lambda, 4, &count) == LT_INVALID_PARAMETER);

  lt_potential* fin = NULL;
  EXPECT(lt_run_potential(run, &fin) == LT_OK);
  const char* path = "ltopt_capi_snapshot.csv";
  EXPECT(lt_potential_save(fin, path) == LT_OK);
  lt_potential* back = NULL;
  EXPECT(lt_potential_load(path, &back) == LT_OK);
  EXPECT(lt_potential_size(back) == 2001);
  double a[2001], b[2001];
  lt_potential_values(fin, a, 2001);
  lt_potential_values(back, b, 2001);
  EXPECT(memcmp(a, b, sizeof a) == 0);
  double ratio = 0.0;
  int states = 0;
  EXPECT(lt_potential_ratio(back, &ratio, &states) == LT_OK);
  EXPECT(fabs(ratio - lt_run_ratio(run)) < 1e-9 && states == 1);
  remove(path);

  lt_branch* branch = NULL;
  EXPECT(lt_branch_continue(seed, 1.3, 0.2, &opts, &branch) == LT_INVALID_PARAMETER);
  EXPECT(lt_branch_continue(seed, 1.24, 0.02, &opts, &branch) == LT_OK);
  EXPECT(lt_branch_size(branch) == 3);
  EXPECT(strcmp(lt_branch_label(branch), "k=1") == 0);
  EXPECT(strlen(lt_branch_termination(branch)) == 0);
  double g = 0.0, r = 0.0;
  int k = 0;
  EXPECT(lt_branch_point(branch, 2, &g, &r, &k) == LT_OK);
  EXPECT(fabs(g - 1.24) < 1e-12 && fabs(r - conjectured(1.24)) < 1e-3 && k == 1);
  int found = -1;
  double gc = 0.0;
  EXPECT(lt_branch_crossing(branch, 1.0, 1e-4, &opts, &found, &gc) == LT_OK);
  EXPECT(found == 0);

  const lt_branch* list[1] = {branch};
  double gammas[2] = {1.22, 1.5};
  double best[2];
  int which[2];
  EXPECT(lt_envelope(list, 1, gammas, 2, best, which) == LT_OK);
  EXPECT(which[0] == 0 && best[0] > 1.0);
  EXPECT(which[1] == -1 && best[1] == 1.0);

  EXPECT(lt_check_config("{\"gamma\": 0.4}") == LT_INVALID_PARAMETER);
  EXPECT(lt_check_config("{\"unknown\": 1}") == LT_INVALID_PARAMETER);
  EXPECT(lt_check_config("not json") == LT_INVALID_PARAMETER);
  EXPECT(lt_check_config("{\"mode\": \"solve\", \"N\": 1000, \"L\": 30}") == LT_OK);
  char* summary = NULL;
  int exit_status = -1;
  EXPECT(lt_run_config("{\"mode\": \"solve\", \"N\": 1000, \"L\": 30, \"out\": \"ltopt_capi_out\"}", &summary,
                       &exit_status) == LT_OK);
  EXPECT(exit_status == 0);
  EXPECT(summary != NULL && strstr(summary, "\"converged\"") != NULL);
  lt_string_free(summary);

  lt_branch_destroy(branch);
  lt_potential_destroy(back);
  lt_potential_destroy(fin);
  lt_run_destroy(run);
  lt_potential_destroy(seed);
  lt_grid_destroy(grid);
  lt_grid_destroy(NULL);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  return failures ? 1 : 0;
}
