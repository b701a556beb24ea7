#ifndef WARPFIELD_H
#define WARPFIELD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WfStatus {
  WF_STATUS_OK = 0,
  /**
   * a positivity claim failed (certificate, homotopy, admissibility)
   */
  WF_STATUS_MATH_FAILURE = 1,
  WF_STATUS_INVALID_ARGUMENT = 2,
  WF_STATUS_PARSE = 3,
  WF_STATUS_IO = 4,
  WF_STATUS_NULL_POINTER = 5,
  WF_STATUS_PANIC = 6,
} WfStatus;

typedef struct WfCertificate WfCertificate;

typedef struct WfPath WfPath;

typedef struct WfProfile WfProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread ("" after a success).
 */
const char *wf_last_error(void);

/**
 * Library version, static string.
 */
const char *wf_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string returned by a `wf_*` function that documents this.
 */
void wf_string_free(char *s);

/**
 * Builds a profile from knot arrays of length `n` (r, f, f′, f″).
 *
 * # Safety
 * All four arrays must hold `n` doubles; `out` must be writable.
 */
enum WfStatus wf_profile_new(const double *knots,
                             const double *f,
                             const double *d1,
                             const double *d2,
                             size_t n,
                             bool origin_smooth,
                             struct WfProfile **out_profile);

/**
 * Reads a `r,f,d1,d2` CSV file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_profile` writable.
 */
enum WfStatus wf_profile_read_csv(const char *path, struct WfProfile **out_profile);

/**
 * Torpedo profile f_δ on [0, b] (`b` ≤ 0 selects the cap δπ/2).
 *
 * # Safety
 * `out_profile` must be writable.
 */
enum WfStatus wf_torpedo(double delta, double b, struct WfProfile **out_profile);

/**
 * # Safety
 * `profile` must be a live handle.
 */
double wf_profile_r_max(const struct WfProfile *profile);

/**
 * f, f′, f″ at r.
 *
 * # Safety
 * `profile` must be a live handle; the outputs writable (any may be NULL to skip).
 */
enum WfStatus wf_profile_eval(const struct WfProfile *profile,
                              double r,
                              double *f,
                              double *d1,
                              double *d2);

/**
 * Writes the profile as `r,f,d1,d2` CSV.
 *
 * # Safety
 * `profile` must be a live handle; `path` NUL-terminated.
 */
enum WfStatus wf_profile_write_csv(const struct WfProfile *profile, const char *path);

/**
 * # Safety
 * `profile` must be NULL or a handle not yet freed.
 */
void wf_profile_free(struct WfProfile *profile);

/**
 * Scalar curvature of dr² + f(r)² ds²_{n−1} at r.
 *
 * # Safety
 * `profile` must be a live handle; `out_r` writable.
 */
enum WfStatus wf_scalar_curvature(const struct WfProfile *profile,
                                  size_t n,
                                  double r,
                                  double *out_r);

/**
 * Grid certificate of R > margin. A failing certificate is still returned
 * (status OK); inspect `wf_certificate_pass`.
 *
 * # Safety
 * `profile` must be a live handle; `out_cert` writable.
 */
enum WfStatus wf_certificate_new(const struct WfProfile *profile,
                                 size_t n,
                                 size_t points,
                                 double margin,
                                 struct WfCertificate **out_cert);

/**
 * # Safety
 * `cert` must be a live handle.
 */
bool wf_certificate_pass(const struct WfCertificate *cert);

/**
 * # Safety
 * `cert` must be a live handle.
 */
double wf_certificate_r_min(const struct WfCertificate *cert);

/**
 * # Safety
 * `cert` must be a live handle.
 */
double wf_certificate_r_min_location(const struct WfCertificate *cert);

/**
 * Certificate JSON; free with `wf_string_free`. NULL if `cert` is NULL.
 *
 * # Safety
 * `cert` must be a live handle.
 */
char *wf_certificate_json(const struct WfCertificate *cert);

/**
 * # Safety
 * `cert` must be NULL or a handle not yet freed.
 */
void wf_certificate_free(struct WfCertificate *cert);

/**
 * Isotopy of a tube profile to torpedo form. `config_json` may be NULL.
 *
 * # Safety
 * `ambient` must be a live handle; `config_json` NULL or NUL-terminated; `out_path` writable.
 */
enum WfStatus wf_isotopy(const struct WfProfile *ambient,
                         size_t p,
                         size_t q,
                         const char *config_json,
                         struct WfPath **out_path);

/**
 * Deformation retract of an almost-standard profile. `config_json` may be NULL.
 *
 * # Safety
 * `w` must be a live handle; `config_json` NULL or NUL-terminated; `out_path` writable.
 */
enum WfStatus wf_retract(const struct WfProfile *w,
                         double rho_std,
                         size_t p,
                         size_t q,
                         const char *config_json,
                         struct WfPath **out_path);

/**
 * # Safety
 * `path` must be a live handle.
 */
size_t wf_path_len(const struct WfPath *path);

/**
 * # Safety
 * `path` must be a live handle.
 */
bool wf_path_all_pass(const struct WfPath *path);

/**
 * Smallest certified R_min along the path (NaN for NULL or empty).
 *
 * # Safety
 * `path` must be a live handle.
 */
double wf_path_worst_r_min(const struct WfPath *path);

/**
 * Copy of the profile at step `index` (the last step is `len − 1`).
 *
 * # Safety
 * `path` must be a live handle; `out_profile` writable.
 */
enum WfStatus wf_path_profile(const struct WfPath *path,
                              size_t index,
                              struct WfProfile **out_profile);

/**
 * Writes the path as `s,arc,f,R` CSV.
 *
 * # Safety
 * `path` must be a live handle; `file` NUL-terminated.
 */
enum WfStatus wf_path_write_csv(const struct WfPath *path, const char *file);

/**
 * # Safety
 * `path` must be NULL or a handle not yet freed.
 */
void wf_path_free(struct WfPath *path);

/**
 * Applies j (`inverse` false) or j⁻¹ to a descriptor given as JSON; the result
 * JSON is written to `out_json` and must be freed with `wf_string_free`.
 *
 * # Safety
 * `json` must be NUL-terminated; `out_json` writable.
 */
enum WfStatus wf_surgery(const char *json, bool inverse, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARPFIELD_H */
