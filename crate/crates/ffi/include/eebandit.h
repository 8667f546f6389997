#ifndef EEBANDIT_H
#define EEBANDIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  EEB_STATUS_OK = 0,
  EEB_STATUS_NULL_POINTER = 1,
  EEB_STATUS_INVALID_ARGUMENT = 2,
  EEB_STATUS_DOMAIN = 3,
  EEB_STATUS_CONTRACT = 4,
  EEB_STATUS_CONFIG = 5,
  EEB_STATUS_TRACE = 6,
  EEB_STATUS_IO = 7,
  EEB_STATUS_PARSE = 8,
  EEB_STATUS_PANIC = 9,
} EebStatus;

typedef enum {
  EEB_POLICY_KIND_UCB1 = 0,
  EEB_POLICY_KIND_UCB_V = 1,
  EEB_POLICY_KIND_UCB_TUNED = 2,
  EEB_POLICY_KIND_UCB_BAYES = 3,
  EEB_POLICY_KIND_UCB_BWK = 4,
} EebPolicyKind;

/**
 * Opaque policy handle.
 */
typedef struct EebPolicy EebPolicy;

/**
 * Opaque random stream handle.
 */
typedef struct EebRng EebRng;

/**
 * Normal-inverse-gamma prior for UCB-Bayes.
 */
typedef struct {
  double mu0;
  double lambda0;
  double alpha0;
  double beta0;
} EebNigPrior;

typedef struct {
  EebPolicyKind kind;
  /**
   * Reward range B for UCB-V.
   */
  double reward_range;
  /**
   * Exponent of the UCB-Bayes quantile schedule.
   */
  double quantile_exponent;
  EebNigPrior prior;
} EebPolicyConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or null.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *eeb_last_error_message(void);

/**
 * Fills `out` with the default configuration for `kind`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `EebPolicyConfig`.
 */
EebStatus eeb_policy_config_default(EebPolicyKind kind, EebPolicyConfig *out);

/**
 * Creates a policy over `num_arms` arms; release with [`eeb_policy_free`].
 *
 * # Safety
 * `config` must point to a valid `EebPolicyConfig`; `out` must be writable.
 */
EebStatus eeb_policy_new(const EebPolicyConfig *config, size_t num_arms, EebPolicy **out);

/**
 * # Safety
 * `policy` must be null or a handle from [`eeb_policy_new`] not yet freed.
 */
void eeb_policy_free(EebPolicy *policy);

/**
 * Chooses the arm for 1-based step `t`.
 *
 * # Safety
 * `policy` must be a live handle; `arm` must be writable.
 */
EebStatus eeb_policy_select(const EebPolicy *policy, uint64_t t, size_t *arm);

/**
 * Records a reward in [0, 1] and a normalized cost for `arm`.
 *
 * # Safety
 * `policy` must be a live handle.
 */
EebStatus eeb_policy_update(EebPolicy *policy, size_t arm, double reward, double cost);

/**
 * Current index of `arm` at step `t` (infinite for an unpulled arm).
 *
 * # Safety
 * `policy` must be a live handle; `value` must be writable.
 */
EebStatus eeb_policy_index(const EebPolicy *policy, size_t arm, uint64_t t, double *value);

/**
 * Number of times `arm` has been updated.
 *
 * # Safety
 * `policy` must be a live handle; `pulls` must be writable.
 */
EebStatus eeb_policy_pulls(const EebPolicy *policy, size_t arm, uint64_t *pulls);

/**
 * Creates a SplitMix64 stream; release with [`eeb_rng_free`].
 */
EebRng *eeb_rng_new(uint64_t seed, uint64_t stream_id);

/**
 * # Safety
 * `rng` must be null or a handle from [`eeb_rng_new`] not yet freed.
 */
void eeb_rng_free(EebRng *rng);

/**
 * # Safety
 * `rng` must be a live handle; `value` must be writable.
 */
EebStatus eeb_rng_next_u64(EebRng *rng, uint64_t *value);

/**
 * Uniform draw in [0, 1).
 *
 * # Safety
 * `rng` must be a live handle; `value` must be writable.
 */
EebStatus eeb_rng_next_unit(EebRng *rng, double *value);

/**
 * Stream id for a (policy, arm set, seed, purpose) key.
 *
 * # Safety
 * The strings must be null-terminated UTF-8; `stream_id` must be writable.
 */
EebStatus eeb_derive_stream_id(const char *policy,
                               const char *arm_set,
                               uint64_t seed,
                               const char *purpose,
                               uint64_t *stream_id);

double eeb_normal_cdf(double x);

/**
 * Standard normal quantile; `p` must lie in (0, 1).
 *
 * # Safety
 * `z` must be writable.
 */
EebStatus eeb_inverse_normal_cdf(double p, double *z);

double eeb_lambda_from_epsilon(double epsilon, size_t num_exits);

/**
 * Reward and normalized cost of exiting at 1-based `exit_index` of
 * `num_exits` with the given confidence and gating score.
 *
 * # Safety
 * `reward` and `cost` must be writable.
 */
EebStatus eeb_compute_reward(double confidence,
                             double gating,
                             size_t exit_index,
                             size_t num_exits,
                             double lambda,
                             EebPolicyKind kind,
                             double *reward,
                             double *cost);

/**
 * Non-dominated points of (accuracy up, cost down), ordered by ascending
 * cost. Writes at most `n` indices to `indices` and the count to `count`.
 *
 * # Safety
 * `accuracy` and `cost` must hold `n` values; `indices` must have room for
 * `n` entries; `count` must be writable.
 */
EebStatus eeb_pareto_indices(const double *accuracy,
                             const double *cost,
                             size_t n,
                             size_t *indices,
                             size_t *count);

/**
 * Parses and validates a config file, including its trace.
 *
 * # Safety
 * `path` must be a null-terminated UTF-8 string.
 */
EebStatus eeb_validate_config(const char *path);

/**
 * Runs the full grid of a config file and writes every CSV output.
 *
 * # Safety
 * `path` must be a null-terminated UTF-8 string.
 */
EebStatus eeb_run_config(const char *path, uint64_t seed_offset);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EEBANDIT_H */
