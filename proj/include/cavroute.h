#ifndef CAVROUTE_H
#define CAVROUTE_H

/* C interface to the cavroute solver library.
 *
 * All functions return a cr_status; CR_OK is 0. On any failure
 * cr_last_error() describes the problem (thread-local storage). Handles are
 * created and released with matching _free calls; passing NULL where a
 * handle is required yields CR_ERR_ARGUMENT.
 *
 * Solve calls write their artifacts (CSV, SVG) under an output directory,
 * creating it if needed, and fill a plain summary struct. A solve that ran
 * but did not converge returns CR_ERR_NOT_CONVERGED with results written.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cr_status {
  CR_OK = 0,
  CR_ERR_ARGUMENT = 1,
  CR_ERR_INPUT = 2,
  CR_ERR_IO = 3,
  CR_ERR_NOT_CONVERGED = 4,
  CR_ERR_INTERNAL = 5
} cr_status;

typedef enum cr_objective {
  CR_OBJECTIVE_TIME = 0,
  CR_OBJECTIVE_ENERGY_CV = 1,
  CR_OBJECTIVE_ENERGY_PHEV = 2
} cr_objective;

typedef struct cr_problem cr_problem;
typedef struct cr_params cr_params;
typedef struct cr_check cr_check;

/* Message for the most recent failure on this thread; never NULL. */
const char* cr_last_error(void);

/* Problems: a network plus its trip table. */
cr_status cr_problem_load(const char* net_path, const char* trips_path,
                          cr_problem** out);
cr_status cr_problem_braess(cr_problem** out);
cr_status cr_problem_grid(uint64_t seed, cr_problem** out);
void cr_problem_free(cr_problem* p);

size_t cr_problem_num_nodes(const cr_problem* p);
size_t cr_problem_num_links(const cr_problem* p);
size_t cr_problem_num_ods(const cr_problem* p);

/* Parameters: defaults at creation; override from a `key = value` config
 * file or one key at a time (same keys as the file). */
cr_status cr_params_create(cr_params** out);
void cr_params_free(cr_params* p);
cr_status cr_params_load_config(cr_params* p, const char* path);
cr_status cr_params_set(cr_params* p, const char* key, const char* value);

typedef struct cr_ue_summary {
  int iterations;
  int converged;
  double rel_gap;
  double beckmann;
  double avg_time_min;
} cr_ue_summary;

/* Pure user equilibrium for the whole demand. Writes ue_flows.csv and
 * ue_trace.csv under out_dir. */
cr_status cr_solve_ue(const cr_problem* p, const cr_params* params,
                      const char* out_dir, cr_ue_summary* out);

typedef struct cr_mixed_summary {
  int outer_iterations;
  int converged;
  double cav_avg_time_min;     /* NaN when the class has no demand */
  double noncav_avg_time_min;
  double cav_energy_usd;
  double noncav_energy_usd;
} cr_mixed_summary;

/* Mixed CAV/non-CAV equilibrium at penetration rate gamma. Writes
 * mixed_flows.csv, mixed_routes.csv and mixed_trace.csv under out_dir. */
cr_status cr_solve_mixed(const cr_problem* p, const cr_params* params,
                         double gamma, cr_objective objective,
                         const char* out_dir, cr_mixed_summary* out);

typedef struct cr_sweep_summary {
  int points;
  int all_converged;
  double poa_pct; /* savings at gamma=1 vs gamma=0; NaN if 0 or 1 absent */
} cr_sweep_summary;

/* Penetration sweep. gammas may be NULL with n_gammas 0 for the default
 * 21-point grid. Writes sweep_<objective>.csv plus SVG plots (savings_,
 * times_, energy_, trace_<objective>.svg) under out_dir. */
cr_status cr_run_sweep(const cr_problem* p, const cr_params* params,
                       cr_objective objective, const double* gammas,
                       size_t n_gammas, const char* out_dir,
                       cr_sweep_summary* out);

/* Built-in self checks (gradients, projection, oracles). */
cr_status cr_check_run(const cr_params* params, uint64_t seed, cr_check** out);
void cr_check_free(cr_check* c);
size_t cr_check_count(const cr_check* c);
const char* cr_check_name(const cr_check* c, size_t i);
int cr_check_passed(const cr_check* c, size_t i);
const char* cr_check_detail(const cr_check* c, size_t i);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CAVROUTE_H */
