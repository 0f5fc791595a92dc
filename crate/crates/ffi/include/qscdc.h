#ifndef QSCDC_H
#define QSCDC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QscdcStatus {
  QSCDC_STATUS_OK = 0,
  QSCDC_STATUS_CONFIG_VIOLATION = 1,
  QSCDC_STATUS_IO = 2,
  QSCDC_STATUS_INVALID_ARGUMENT = 3,
  QSCDC_STATUS_NULL_POINTER = 4,
  /**
   * The requested value does not exist, e.g. no recovered message.
   */
  QSCDC_STATUS_NOT_AVAILABLE = 5,
  QSCDC_STATUS_INTERNAL = 6,
} QscdcStatus;

/**
 * Opaque session configuration.
 */
typedef struct QscdcConfig QscdcConfig;

/**
 * Opaque session report.
 */
typedef struct QscdcReport QscdcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a session config from a NUL-terminated JSON string.
 *
 * # Safety
 * `json` must be a valid C string; `out` must be writable.
 */
enum QscdcStatus qscdc_config_from_json(const char *json, struct QscdcConfig **out);

/**
 * Check the config. Writes the number of violations to `n_violations` (may be
 * null) and returns `ConfigViolation` if there is at least one.
 *
 * # Safety
 * `config` must come from `qscdc_config_from_json`.
 */
enum QscdcStatus qscdc_config_validate(const struct QscdcConfig *config, size_t *n_violations);

/**
 * # Safety
 * `config` must come from `qscdc_config_from_json` or be null.
 */
void qscdc_config_free(struct QscdcConfig *config);

/**
 * Run one session. With `allow_bypass` set, control-bypass pools run anyway.
 *
 * # Safety
 * `config` must be a live handle; `out` must be writable.
 */
enum QscdcStatus qscdc_session_run(const struct QscdcConfig *config,
                                   bool allow_bypass,
                                   struct QscdcReport **out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QscdcStatus qscdc_report_to_json(const struct QscdcReport *report, char **out);

/**
 * Writes Bob's decoded message, or returns `NotAvailable` when the session
 * aborted or Charlie withheld the reveals.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QscdcStatus qscdc_report_recovered_message(const struct QscdcReport *report, char **out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QscdcStatus qscdc_report_recovery_accuracy(const struct QscdcReport *report, double *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QscdcStatus qscdc_report_detected(const struct QscdcReport *report, bool *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QscdcStatus qscdc_report_mismatches(const struct QscdcReport *report, size_t *out);

/**
 * # Safety
 * `report` must come from `qscdc_session_run` or be null.
 */
void qscdc_report_free(struct QscdcReport *report);

/**
 * Exact per-pair detection probability for an attack tag such as
 * `"ghz-coupling"` or `"intercept-resend:X:alice"` on a label such as `"phi-"`.
 *
 * # Safety
 * Both strings must be valid C strings; `out` must be writable.
 */
enum QscdcStatus qscdc_detection_probability(const char *attack, const char *label, double *out);

/**
 * Replay the built-in worked examples. Writes the number of failed checks to
 * `n_failed` (may be null); returns `Internal` if any failed.
 *
 * # Safety
 * `n_failed` must be writable or null.
 */
enum QscdcStatus qscdc_paper_check(size_t *n_failed);

/**
 * Copy of the calling thread's last error, or null. Free with `qscdc_string_free`.
 */
char *qscdc_last_error_message(void);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void qscdc_string_free(char *s);

/**
 * Static version string; do not free.
 */
const char *qscdc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSCDC_H */
