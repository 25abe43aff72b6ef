/* C interface for the nonlocal-systems calculators.
 *
 * Every fallible function returns an NlsStatus and writes its result through
 * out-pointers, which are touched only on NLS_STATUS_OK. NlsBootstrap is an
 * opaque handle owned by the caller and released with nls_bootstrap_free.
 */

#ifndef NLSYS_H
#define NLSYS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// ABI revision of this header; bump on any breaking change.
#define NLS_ABI_VERSION 1

// Stable error codes mirroring the library's failure modes.
typedef enum NlsStatus {
  NLS_STATUS_OK = 0,
  // A required pointer argument was null.
  NLS_STATUS_NULL_POINTER = 1,
  // Input outside the mathematical domain (Gamma pole, order outside
  // its interval, exponent out of range).
  NLS_STATUS_DOMAIN = 2,
  // State outside the admissible set of a constrained family.
  NLS_STATUS_CONSTRAINT = 3,
  // A numerical kernel failed to converge or lost ellipticity.
  NLS_STATUS_NUMERICAL = 4,
  // Invalid run configuration or artifact schema.
  NLS_STATUS_CONFIG = 5,
} NlsStatus;

// Outcome of a strict-inequality criterion; ties within the floating-point
// guard band are reported as marginal instead of being forced to a side.
typedef enum NlsVerdict {
  NLS_VERDICT_FALSE = 0,
  NLS_VERDICT_TRUE = 1,
  NLS_VERDICT_MARGINAL = 2,
} NlsVerdict;

// Kind of Lebesgue-exponent gain of one linear-regularity step.
typedef enum NlsEmbedding {
  // Below the critical integrability: a finite gained exponent.
  NLS_EMBEDDING_FINITE = 0,
  // Exactly critical: every finite exponent is gained.
  NLS_EMBEDDING_ANY_FINITE = 1,
  // Above critical: the solution is bounded.
  NLS_EMBEDDING_UNBOUNDED = 2,
} NlsEmbedding;

// Verdict of the exponent bootstrap.
typedef enum NlsBootstrapVerdict {
  NLS_BOOTSTRAP_VERDICT_INCONCLUSIVE = 0,
  NLS_BOOTSTRAP_VERDICT_BOUNDED = 1,
} NlsBootstrapVerdict;

// Opaque bootstrap trace handle.
typedef struct NlsBootstrap NlsBootstrap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// ABI revision of the loaded library; compare against `NLS_ABI_VERSION`
// from the header.
uint32_t nls_abi_version(void);

// Natural log of Gamma(x) for real non-pole `x`.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum NlsStatus nls_log_gamma(double x, double *out);

// Dimension threshold of the exponential-nonlinearity system: 10 s.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum NlsStatus nls_threshold_gelfand(double s, double *out);

// Dimension threshold of the (1+u)^p power system.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum NlsStatus nls_threshold_lane_emden(double s, double p, double *out);

// Dimension threshold of the singular 1/(1-u)^p system.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum NlsStatus nls_threshold_mems(double s, double p, double *out);

// Dimension threshold of the gradient system with power nonlinearities
// (1+u)^p, (1+v)^q; needs p > 2 and q > 2.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum NlsStatus nls_threshold_gradient(double s, double p, double q, double *out);

// Gamma-function stability criterion of the exponential family.
//
// # Safety
// `out` must be null or valid for writing one `NlsVerdict`.
enum NlsStatus nls_gelfand_criterion(double n, double s, enum NlsVerdict *out);

// Gamma-function stability criterion of the pure-power family.
//
// # Safety
// `out` must be null or valid for writing one `NlsVerdict`.
enum NlsStatus nls_lane_emden_criterion(double n, double s, double p, enum NlsVerdict *out);

// Coupling constant of the explicit log-singular profile of the
// exponential equation.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum NlsStatus nls_singular_lambda(double n, double s, double *out);

// Amplitude of the explicit power-singular profile of the pure-power
// equation.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum NlsStatus nls_singular_amplitude(double n, double s, double p, double *out);

// Lebesgue-exponent gain of one linear-regularity step. `q_out` is written
// only when the kind is `NLS_EMBEDDING_FINITE`.
//
// # Safety
// `kind_out` must be null or valid for writing one `NlsEmbedding`; `q_out`
// must be null or valid for writing one `double`.
enum NlsStatus nls_embedding_exponent(double n,
                                      double s,
                                      double r,
                                      enum NlsEmbedding *kind_out,
                                      double *q_out);

// Run the exponent bootstrap from the explicit starting exponent `p0`.
// On success `*out` owns a trace handle; release it with
// `nls_bootstrap_free`.
//
// # Safety
// `out` must be null or valid for writing one pointer.
enum NlsStatus nls_bootstrap_new(double n,
                                 double s,
                                 double p0,
                                 size_t max_steps,
                                 struct NlsBootstrap **out);

// Run the exponent bootstrap from the embedding starting exponent
// n/(n-2s).
//
// # Safety
// `out` must be null or valid for writing one pointer.
enum NlsStatus nls_bootstrap_from_embedding(double n,
                                            double s,
                                            size_t max_steps,
                                            struct NlsBootstrap **out);

// Run the exponent bootstrap with its hand-tuned opening stages.
//
// # Safety
// `out` must be null or valid for writing one pointer.
enum NlsStatus nls_bootstrap_staged(double n,
                                    double s,
                                    size_t max_steps,
                                    struct NlsBootstrap **out);

// Verdict of a finished bootstrap run.
//
// # Safety
// `handle` must be null or a live handle from a constructor; `out` must be
// null or valid for writing one `NlsBootstrapVerdict`.
enum NlsStatus nls_bootstrap_verdict(const struct NlsBootstrap *handle,
                                     enum NlsBootstrapVerdict *out);

// Number of recursion steps the run performed.
//
// # Safety
// `handle` must be null or a live handle; `out` must be null or valid for
// writing one `size_t`.
enum NlsStatus nls_bootstrap_steps(const struct NlsBootstrap *handle, size_t *out);

// Number of exponents in the visited trace (at least one: the start).
//
// # Safety
// `handle` must be null or a live handle; `out` must be null or valid for
// writing one `size_t`.
enum NlsStatus nls_bootstrap_exponent_count(const struct NlsBootstrap *handle, size_t *out);

// Visited exponent at `index`; out-of-range indices are a domain error.
//
// # Safety
// `handle` must be null or a live handle; `out` must be null or valid for
// writing one `double`.
enum NlsStatus nls_bootstrap_exponent(const struct NlsBootstrap *handle, size_t index, double *out);

// Release a trace handle; null is a no-op. The handle must not be used
// afterwards.
//
// # Safety
// `handle` must be null or a live handle from a constructor, released at
// most once.
void nls_bootstrap_free(struct NlsBootstrap *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLSYS_H */
