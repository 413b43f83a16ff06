#ifndef ISING_QFI_H
#define ISING_QFI_H

#include <stddef.h>
#include <stdint.h>

typedef enum IqStatus {
  IQ_STATUS_OK = 0,
  IQ_STATUS_NULL_POINTER = 1,
  IQ_STATUS_DOMAIN = 2,
  IQ_STATUS_TOO_LARGE = 3,
  IQ_STATUS_DIMENSION_MISMATCH = 4,
  IQ_STATUS_UNSUPPORTED_MODE = 5,
  IQ_STATUS_NOT_NORMALIZED = 6,
  IQ_STATUS_BUFFER_TOO_SMALL = 7,
  IQ_STATUS_PANIC = 8,
} IqStatus;

typedef enum IqTarget {
  IQ_TARGET_ESTIMATE_J = 0,
  IQ_TARGET_ESTIMATE_B = 1,
} IqTarget;

typedef enum IqCurve {
  /*
   Optimal-state prefactor G(g).
   */
  IQ_CURVE_OPTIMAL_G = 0,
  /*
   GHZ prefactor F(g).
   */
  IQ_CURVE_GHZ_F = 1,
} IqCurve;

typedef enum IqModel {
  IQ_MODEL_SPIN_OPEN = 0,
  IQ_MODEL_SPIN_PERIODIC = 1,
  IQ_MODEL_FERMION_CYCLIC = 2,
} IqModel;

/*
 Integrated generator of one coupling on the dense `2^N` model.
 */
typedef struct IqGenerator IqGenerator;

/*
 Result of a multi-start product-state optimization.
 */
typedef struct IqOptRun IqOptRun;

/*
 Chain size, couplings and evolution time.
 */
typedef struct IqParams {
  size_t n;
  double j;
  double b;
  double t;
} IqParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the calling thread's last error message into `buf` (NUL
 terminated, truncated to `len`). Returns the full message length plus one,
 or 0 if there is no error recorded.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t iq_last_error_message(char *buf, size_t len);

/*
 Largest variance of the integrated generator over all states.

 # Safety
 `params` and `out` must be valid pointers.
 */
enum IqStatus iq_max_variance(const struct IqParams *params, enum IqTarget target, double *out);

/*
 Exact GHZ variance of the field generator on the cyclic fermion model.

 # Safety
 `params` and `out` must be valid pointers.
 */
enum IqStatus iq_ghz_variance_b(const struct IqParams *params, double *out);

/*
 Per-mode generator singular values `s_k`; `out` needs room for `n` values.

 # Safety
 `params` must be valid and `out` must point to `len` writable doubles.
 */
enum IqStatus iq_generator_spectrum(const struct IqParams *params,
                                    enum IqTarget target,
                                    double *out,
                                    size_t len);

/*
 `G(g)` or `F(g)` for `g ≥ 0`.

 # Safety
 `out` must be a valid pointer.
 */
enum IqStatus iq_prefactor(enum IqCurve curve, double g, double *out);

/*
 `max_variance / (N² t²)` minus the large-`N` prefactor.

 # Safety
 `params` and `out` must be valid pointers.
 */
enum IqStatus iq_asymptotic_check(const struct IqParams *params, enum IqTarget target, double *out);

/*
 Builds the dense integrated generator. Free with [`iq_generator_free`].

 # Safety
 `params` and `out` must be valid pointers.
 */
enum IqStatus iq_generator_new(const struct IqParams *params,
                               enum IqTarget target,
                               enum IqModel model,
                               struct IqGenerator **out);

/*
 # Safety
 `handle` must be null or come from [`iq_generator_new`], freed once.
 */
void iq_generator_free(struct IqGenerator *handle);

/*
 Hilbert-space dimension `2^N`, or 0 for a null handle.

 # Safety
 `handle` must be null or a live generator.
 */
size_t iq_generator_dim(const struct IqGenerator *handle);

/*
 `λ_max − λ_min` of the generator.

 # Safety
 `handle` must be a live generator and `out` valid.
 */
enum IqStatus iq_generator_gap(const struct IqGenerator *handle, double *out);

/*
 Variance of the generator after evolving the state with amplitudes
 `re[i] + i im[i]`, `len = 2^N`.

 # Safety
 `re` and `im` must each point to `len` readable doubles.
 */
enum IqStatus iq_generator_variance(const struct IqGenerator *handle,
                                    const double *re,
                                    const double *im,
                                    size_t len,
                                    double *out);

/*
 Variance for the product state with interleaved angles
 `[θ_1, φ_1, …, θ_N, φ_N]`, `len = 2N`.

 # Safety
 `angles` must point to `len` readable doubles.
 */
enum IqStatus iq_generator_product_variance(const struct IqGenerator *handle,
                                            const double *angles,
                                            size_t len,
                                            double *out);

/*
 Multi-start product-state optimization with default simplex settings.
 Free with [`iq_optrun_free`].

 # Safety
 `params` and `out` must be valid pointers.
 */
enum IqStatus iq_optimize(const struct IqParams *params,
                          enum IqTarget target,
                          enum IqModel model,
                          size_t restarts,
                          uint64_t seed,
                          struct IqOptRun **out);

/*
 # Safety
 `handle` must be null or come from [`iq_optimize`], freed once.
 */
void iq_optrun_free(struct IqOptRun *handle);

/*
 Best variance found, or NaN for a null handle.

 # Safety
 `handle` must be null or a live run.
 */
double iq_optrun_best_variance(const struct IqOptRun *handle);

/*
 Number of restarts whose simplex met the diameter tolerance.

 # Safety
 `handle` must be null or a live run.
 */
size_t iq_optrun_restarts_converged(const struct IqOptRun *handle);

/*
 Copies the best interleaved angles (`2N` values) into `out`.

 # Safety
 `handle` must be a live run and `out` must point to `len` writable doubles.
 */
enum IqStatus iq_optrun_best_angles(const struct IqOptRun *handle, double *out, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISING_QFI_H */
