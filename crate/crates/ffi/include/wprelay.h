/* C interface to the wprelay finite-blocklength relay performance library. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of any API call.
typedef enum WprStatus {
  WPR_STATUS_OK = 0,
  // A required pointer argument was null.
  WPR_STATUS_NULL_POINTER = 1,
  // A parameter was out of its documented domain.
  WPR_STATUS_INVALID_ARGUMENT = 2,
  // The numerics could not produce a trustworthy result.
  WPR_STATUS_NUMERICAL_FAILURE = 3,
  // No point satisfied the optimization constraints.
  WPR_STATUS_INFEASIBLE = 4,
  // The block error probability is 1, so the expected delay diverges.
  WPR_STATUS_INFINITE_DELAY = 5,
} WprStatus;

// Opaque handle to a validated set of system parameters.
typedef struct WprParams WprParams;

// Expected error probabilities of one operating point.
typedef struct WprBreakdown {
  // Relay decoding error probability.
  double e_r;
  // Destination decoding error probability.
  double e_d;
  // Probability both hops fail.
  double e_rd;
  // End-to-end block error probability.
  double e_df;
} WprBreakdown;

// Throughput and delay of one operating point.
typedef struct WprPerformance {
  // Delivered bits per channel use.
  double throughput;
  // Average delay in channel uses.
  double delay;
  // Average delay in seconds.
  double delay_seconds;
} WprPerformance;

// Headline statistics of a Monte Carlo run.
typedef struct WprSimSummary {
  double eps_df_hat;
  double eps_r_hat;
  double eps_d_hat;
  // 95% confidence half-width on eps_df_hat.
  double ci_halfwidth_df;
  double throughput_hat;
  double delay_hat;
  uint64_t blocks;
  uint64_t df_errors;
} WprSimSummary;

// Solution of a constrained search over the block structure.
typedef struct WprOptimum {
  uint32_t n;
  uint32_t v;
  // Power-transfer share v / (2n + v).
  double alpha;
  double tau;
  double delta;
  double eps_df;
} WprOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Allocates a parameter handle with the default system setup. Never fails.
// Free with `wpr_params_free`.
struct WprParams *wpr_params_default(void);

// Allocates a parameter handle from explicit values, writing it to `out`.
// Returns `WPR_STATUS_INVALID_ARGUMENT` (and writes nothing) when any value
// is outside its domain. Free with `wpr_params_free`.
//
// # Safety
// `out` must be a valid pointer to a `WprParams*`.
enum WprStatus wpr_params_new(double ps,
                              double eta,
                              double omega,
                              double d1,
                              double d2,
                              double sigma2_r,
                              double sigma2_d,
                              double m,
                              double tc,
                              struct WprParams **out);

// Releases a handle from `wpr_params_default` or `wpr_params_new`.
// Passing null is a no-op.
//
// # Safety
// `params` must be null or a pointer previously returned by this library,
// and must not be used again after this call.
void wpr_params_free(struct WprParams *params);

// Library version as a static null-terminated string.
const char *wpr_version(void);

// Block error probability of a single hop at SNR `gamma`, rate `k/n`.
//
// # Safety
// `out` must be a valid pointer.
enum WprStatus wpr_fbl_error(double gamma, uint32_t k, uint32_t n, double *out);

// Expected error probabilities at one operating point.
//
// # Safety
// `params` must be a live handle; `out` must be a valid pointer.
enum WprStatus wpr_error_breakdown(const struct WprParams *params,
                                   uint32_t n,
                                   uint32_t v,
                                   uint32_t k,
                                   struct WprBreakdown *out);

// Throughput and delay at one operating point. Returns
// `WPR_STATUS_INFINITE_DELAY` (writing nothing) when the block error
// probability is 1.
//
// # Safety
// `params` must be a live handle; `out` must be a valid pointer.
enum WprStatus wpr_performance(const struct WprParams *params,
                               uint32_t n,
                               uint32_t v,
                               uint32_t k,
                               struct WprPerformance *out);

// Runs the Monte Carlo simulator. `accumulated` selects the power model:
// 0 spends only the current block's harvest, nonzero adds the harvest
// accumulated over the preceding failure run.
//
// # Safety
// `params` must be a live handle; `out` must be a valid pointer.
enum WprStatus wpr_simulate(const struct WprParams *params,
                            uint32_t n,
                            uint32_t v,
                            uint32_t k,
                            uint64_t blocks,
                            uint64_t seed,
                            int32_t accumulated,
                            struct WprSimSummary *out);

// Maximizes throughput over the (n, v) grid subject to an error target.
// Returns `WPR_STATUS_INFEASIBLE` (writing nothing) when no grid point
// meets the target.
//
// # Safety
// `params` must be a live handle; `out` must be a valid pointer.
enum WprStatus wpr_best_blocklength(const struct WprParams *params,
                                    uint32_t k,
                                    double eps0,
                                    uint32_t n_min,
                                    uint32_t n_max,
                                    uint32_t n_step,
                                    uint32_t v_min,
                                    uint32_t v_max,
                                    uint32_t v_step,
                                    struct WprOptimum *out);

// Minimizes average delay over the (n, v) grid subject to an error target;
// the optimum satisfies delta = k / tau.
//
// # Safety
// `params` must be a live handle; `out` must be a valid pointer.
enum WprStatus wpr_min_delay(const struct WprParams *params,
                             uint32_t k,
                             double eps0,
                             uint32_t n_min,
                             uint32_t n_max,
                             uint32_t n_step,
                             uint32_t v_min,
                             uint32_t v_max,
                             uint32_t v_step,
                             struct WprOptimum *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
