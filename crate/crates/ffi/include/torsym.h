#ifndef TORSYM_H
#define TORSYM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum TorsymStatus {
  TorsymStatus_Ok = 0,
  TorsymStatus_NullPointer = 1,
  TorsymStatus_InvalidUtf8 = 2,
  TorsymStatus_Malformed = 3,
  TorsymStatus_DimensionMismatch = 4,
  TorsymStatus_EmptyPolynomial = 5,
  TorsymStatus_InvalidConfig = 6,
  TorsymStatus_Unsupported = 7,
  TorsymStatus_Internal = 8,
} TorsymStatus;

/**
 * Opaque polynomial handle.
 */
typedef struct TorsymPoly TorsymPoly;

/**
 * Grid certification settings. `gradient_override <= 0` uses the computed bound.
 */
typedef struct TorsymCertifyConfig {
  uint32_t grid_log2;
  double gradient_override;
  /**
   * 0: full-diagonal cell error, 1: half-diagonal.
   */
  uint8_t half_diagonal;
  /**
   * 0: cell centers, 1: cell corners.
   */
  uint8_t zero_offset;
  double threshold_factor;
  double accuracy_budget_factor;
  /**
   * 0 uses every available core.
   */
  uint32_t threads;
} TorsymCertifyConfig;

typedef struct TorsymCertifyResult {
  uint64_t n_cells;
  uint64_t m_negative;
  uint64_t m_positive;
  double gradient_bound;
  double cell_error;
  double max_eval_error;
  uint8_t sound;
} TorsymCertifyResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the library;
 * valid until the next failing call on the same thread.
 */
const char *torsym_last_error_message(void);

/**
 * Parses a polynomial JSON document into a new handle.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum TorsymStatus torsym_poly_from_json(const char *json, struct TorsymPoly **out);

/**
 * # Safety
 * `poly` must come from [`torsym_poly_from_json`] and not be freed twice. Null is ignored.
 */
void torsym_poly_free(struct TorsymPoly *poly);

/**
 * Dimension of the torus, or 0 for a null handle.
 *
 * # Safety
 * `poly` must be null or a live handle.
 */
uintptr_t torsym_poly_dim(const struct TorsymPoly *poly);

/**
 * Number of stored terms, or 0 for a null handle.
 *
 * # Safety
 * `poly` must be null or a live handle.
 */
uintptr_t torsym_poly_n_terms(const struct TorsymPoly *poly);

/**
 * Evaluates `f(x)` with a rigorous bound: `|f(x) - *value| <= *err`.
 *
 * # Safety
 * `x` must point to `len` doubles; `value` and `err` must be writable (`err` may be null).
 */
enum TorsymStatus torsym_poly_evaluate(const struct TorsymPoly *poly,
                                       const double *x,
                                       uintptr_t len,
                                       double *value,
                                       double *err);

/**
 * Settings matching [`CertificationConfig::new`] at the given resolution.
 */
struct TorsymCertifyConfig torsym_certify_config_default(uint32_t grid_log2);

/**
 * Certified negative/positive cell counts on the dyadic grid.
 *
 * # Safety
 * `config` and `out` must be valid pointers.
 */
enum TorsymStatus torsym_certify_signs(const struct TorsymPoly *poly,
                                       const struct TorsymCertifyConfig *config,
                                       struct TorsymCertifyResult *out);

/**
 * Searches for a half-integer translation `u` with `f(x + u) = -f(x)`.
 *
 * On success `*json_out` holds either `{"found": true, "certificate": ...}` or
 * `{"found": false, "obstruction": ...}`; free it with [`torsym_string_free`].
 *
 * # Safety
 * `json_out` must be writable.
 */
enum TorsymStatus torsym_find_semi_integral(const struct TorsymPoly *poly, char **json_out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void torsym_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORSYM_H */
