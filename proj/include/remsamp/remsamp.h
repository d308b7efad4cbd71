#ifndef REMSAMP_H
#define REMSAMP_H

/* C interface to the remote-estimation sampling library. Every fallible
 * call returns a status; on failure remsamp_last_error() describes the
 * problem (the message is per thread and valid until the next call). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(REMSAMP_BUILDING)
#    define REMSAMP_API __declspec(dllexport)
#  else
#    define REMSAMP_API __declspec(dllimport)
#  endif
#else
#  define REMSAMP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum remsamp_status {
  REMSAMP_OK = 0,
  REMSAMP_INVALID_ARGUMENT = 1,
  REMSAMP_NO_CONVERGENCE = 2,
  REMSAMP_NUMERICAL = 3,
  REMSAMP_INTERNAL = 4
} remsamp_status;

REMSAMP_API const char* remsamp_last_error(void);
REMSAMP_API const char* remsamp_status_name(remsamp_status status);
REMSAMP_API const char* remsamp_version(void);

/* ---- channel ---------------------------------------------------------- */

typedef struct remsamp_channel remsamp_channel;

REMSAMP_API remsamp_status remsamp_channel_create_constant(double alpha, double c,
                                                           remsamp_channel** out);
REMSAMP_API remsamp_status remsamp_channel_create_twopoint(double alpha, double y1, double p1,
                                                           double y2, remsamp_channel** out);
/* Y = exp(sigma A) / E[exp(sigma A)], so E[Y] = 1. */
REMSAMP_API remsamp_status remsamp_channel_create_lognormal(double alpha, double sigma,
                                                            remsamp_channel** out);
REMSAMP_API void remsamp_channel_destroy(remsamp_channel* channel);

REMSAMP_API remsamp_status remsamp_channel_moments(const remsamp_channel* channel,
                                                   double* mean_y, double* mean_y2);
REMSAMP_API double remsamp_channel_alpha(const remsamp_channel* channel);

/* ---- solver ----------------------------------------------------------- */

/* NaN in k1, k2, rho or wmax selects the automatic value. */
typedef struct remsamp_solver_config {
  double k1;
  double k2;
  double eps1;
  double eps2;
  double rho;
  size_t grid_nodes;
  double wmax;
  int gh_nodes;
  double truncation;
  int max_expansions;
  int max_inner_iterations;
} remsamp_solver_config;

REMSAMP_API void remsamp_solver_config_default(remsamp_solver_config* cfg);

typedef struct remsamp_solution remsamp_solution;

/* cfg may be NULL for defaults. */
REMSAMP_API remsamp_status remsamp_solve_mse_opt(const remsamp_channel* channel,
                                                 const remsamp_solver_config* cfg,
                                                 remsamp_solution** out);
/* Closed-form optimum of the channel with alpha treated as 0. */
REMSAMP_API remsamp_status remsamp_reliable_closed_form(const remsamp_channel* channel,
                                                        remsamp_solution** out);
REMSAMP_API void remsamp_solution_destroy(remsamp_solution* solution);

REMSAMP_API double remsamp_solution_mse_opt(const remsamp_solution* solution);
REMSAMP_API double remsamp_solution_threshold(const remsamp_solution* solution);
REMSAMP_API int remsamp_solution_outer_iterations(const remsamp_solution* solution);
REMSAMP_API int remsamp_solution_inner_iterations(const remsamp_solution* solution);
REMSAMP_API double remsamp_solution_wmax(const remsamp_solution* solution);
/* Copies up to cap thresholds v_1..v_n; returns n. */
REMSAMP_API size_t remsamp_solution_v_history(const remsamp_solution* solution, double* buf,
                                              size_t cap);
REMSAMP_API size_t remsamp_solution_h_count(const remsamp_solution* solution);
/* Probe i of the outer loop; feasible is 0 when no threshold root exists. */
REMSAMP_API remsamp_status remsamp_solution_h_at(const remsamp_solution* solution, size_t i,
                                                 double* beta, double* h, int* feasible);

typedef struct remsamp_age_result {
  double age_opt;
  double threshold;
  int is_zero_wait;
} remsamp_age_result;

REMSAMP_API remsamp_status remsamp_solve_age_opt(const remsamp_channel* channel,
                                                 remsamp_age_result* out);

/* h(beta) = E[J(W_Y, beta)]; +inf when no threshold root exists. */
REMSAMP_API remsamp_status remsamp_h_of_beta(const remsamp_channel* channel,
                                             const remsamp_solver_config* cfg, double beta,
                                             double* out);

/* ---- simulator -------------------------------------------------------- */

typedef enum remsamp_policy_kind {
  REMSAMP_POLICY_SIGNAL_AWARE = 0,
  REMSAMP_POLICY_AGE_THRESHOLD = 1,
  REMSAMP_POLICY_ZERO_WAIT = 2
} remsamp_policy_kind;

typedef struct remsamp_policy {
  remsamp_policy_kind kind;
  double param;
} remsamp_policy;

/* NaN dt selects 1e-3 E[Y]. */
typedef struct remsamp_sim_config {
  double dt;
  double horizon;
  int replications;
  uint64_t seed;
  double warmup_fraction;
  int threads;
} remsamp_sim_config;

REMSAMP_API void remsamp_sim_config_default(remsamp_sim_config* cfg);

typedef struct remsamp_sim_result {
  double avg_mse;
  double avg_age;
  double sampling_rate;
  double successful_rate;
  double ci_mse;
  double ci_age;
  double ci_sampling_rate;
  double ci_successful_rate;
  long long epochs_observed;
  double dt;
  int warnings;
} remsamp_sim_result;

REMSAMP_API remsamp_status remsamp_simulate(const remsamp_channel* channel, remsamp_policy policy,
                                            const remsamp_sim_config* cfg,
                                            remsamp_sim_result* out);

/* Checks a simulator configuration. On success *warnings (optional) holds
 * the number of soft warnings and the messages are joined by newlines into
 * remsamp_last_error(). */
REMSAMP_API remsamp_status remsamp_sim_config_check(const remsamp_channel* channel,
                                                    const remsamp_sim_config* cfg, int* warnings);

typedef void (*remsamp_trace_fn)(double t, double w, double w_hat, double age, void* user);

/* Runs replication `replication` of the experiment alone, reporting the
 * path at least every `every` time units. */
REMSAMP_API remsamp_status remsamp_simulate_trace(const remsamp_channel* channel,
                                                  remsamp_policy policy,
                                                  const remsamp_sim_config* cfg,
                                                  uint64_t replication, double every,
                                                  remsamp_trace_fn fn, void* user);

REMSAMP_API uint64_t remsamp_derive_seed(uint64_t seed, uint64_t stream);

#ifdef __cplusplus
}
#endif

#endif
