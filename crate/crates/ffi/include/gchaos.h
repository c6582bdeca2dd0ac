#ifndef GCHAOS_H
#define GCHAOS_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes of every fallible call.
 */
typedef enum GchaosStatus {
  GCHAOS_STATUS_OK = 0,
  GCHAOS_STATUS_NULL_POINTER = 1,
  GCHAOS_STATUS_SHAPE = 2,
  GCHAOS_STATUS_INDEX = 3,
  GCHAOS_STATUS_ARGUMENT = 4,
  GCHAOS_STATUS_PARSE = 5,
  GCHAOS_STATUS_IO = 6,
  GCHAOS_STATUS_UTF8 = 7,
  GCHAOS_STATUS_PANIC = 8,
} GchaosStatus;

/**
 * Opaque finite metric space.
 */
typedef struct GchaosMetric GchaosMetric;

/**
 * Opaque dense tensor.
 */
typedef struct GchaosTensor GchaosTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *gchaos_last_error_message(void);

/**
 * Tensor with `order` axes of sizes `dims` and `len` row-major entries.
 *
 * # Safety
 * `dims` and `data` must point to `order` and `len` readable elements.
 */
enum GchaosStatus gchaos_tensor_new(const size_t *dims,
                                    size_t order,
                                    const double *data,
                                    size_t len,
                                    struct GchaosTensor **out);

/**
 * Tensor parsed from the JSON format `{"dims": [..], "data": [..]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum GchaosStatus gchaos_tensor_from_json(const char *json, struct GchaosTensor **out);

/**
 * Releases a tensor; NULL is ignored.
 *
 * # Safety
 * `t` must come from this library and not be used afterwards.
 */
void gchaos_tensor_free(struct GchaosTensor *t);

/**
 * Number of axes; 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live tensor handle.
 */
size_t gchaos_tensor_order(const struct GchaosTensor *t);

/**
 * Frobenius norm.
 *
 * # Safety
 * `t` must be a live tensor handle and `out` writable.
 */
enum GchaosStatus gchaos_hs_norm(const struct GchaosTensor *t, double *out);

/**
 * Spectral norm of an order-2 tensor.
 *
 * # Safety
 * `t` must be a live tensor handle and `out` writable.
 */
enum GchaosStatus gchaos_operator_norm_2d(const struct GchaosTensor *t, double *out);

/**
 * Partition norm for a partition string such as `{1,3}{2}`.
 *
 * # Safety
 * `t` must be a live tensor handle, `partition` NUL-terminated, `out` writable.
 */
enum GchaosStatus gchaos_partition_norm(const struct GchaosTensor *t,
                                        const char *partition,
                                        size_t restarts,
                                        uint64_t seed,
                                        double *out);

/**
 * Monte Carlo `(E|Z|^p)^{1/p}` and its standard error.
 *
 * # Safety
 * `t` must be a live tensor handle; `value` and `std_error` writable.
 */
enum GchaosStatus gchaos_sample_moment(const struct GchaosTensor *t,
                                       double p,
                                       size_t samples,
                                       uint64_t seed,
                                       bool decoupled,
                                       double *value,
                                       double *std_error);

/**
 * `Σ_P p^{card P / 2} ‖A‖_P` over all partitions of the axes.
 *
 * # Safety
 * `t` must be a live tensor handle and `out` writable.
 */
enum GchaosStatus gchaos_partition_moment_bound(const struct GchaosTensor *t,
                                                double p,
                                                size_t restarts,
                                                uint64_t seed,
                                                double *out);

/**
 * `√p ‖A‖_HS + p ‖A‖_op` for an order-2 tensor.
 *
 * # Safety
 * `t` must be a live tensor handle and `out` writable.
 */
enum GchaosStatus gchaos_hanson_wright_bound(const struct GchaosTensor *t, double p, double *out);

/**
 * Metric space from a row-major `size × size` distance matrix.
 *
 * # Safety
 * `dist` must point to `size * size` readable values and `out` be writable.
 */
enum GchaosStatus gchaos_metric_new(size_t size, const double *dist, struct GchaosMetric **out);

/**
 * Euclidean metric on `n` points of `R^dim` stored row-major.
 *
 * # Safety
 * `points` must point to `n * dim` readable values and `out` be writable.
 */
enum GchaosStatus gchaos_metric_from_points(const double *points,
                                            size_t n,
                                            size_t dim,
                                            struct GchaosMetric **out);

/**
 * Releases a metric; NULL is ignored.
 *
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void gchaos_metric_free(struct GchaosMetric *m);

/**
 * Chaining value of the greedy admissible sequence.
 *
 * # Safety
 * `m` must be a live metric handle and `out` writable.
 */
enum GchaosStatus gchaos_gamma(const struct GchaosMetric *m, double *out);

/**
 * Dudley entropy integral on the dyadic grid.
 *
 * # Safety
 * `m` must be a live metric handle and `out` writable.
 */
enum GchaosStatus gchaos_dudley(const struct GchaosMetric *m, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCHAOS_H */
