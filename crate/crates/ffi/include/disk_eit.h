#ifndef DISK_EIT_H
#define DISK_EIT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DeBlock {
  DE_BLOCK_CC = 0,
  DE_BLOCK_SS = 1,
  DE_BLOCK_SC = 2,
  DE_BLOCK_CS = 3,
} DeBlock;

typedef enum DeStatus {
  DE_STATUS_OK = 0,
  DE_STATUS_NULL_POINTER = 1,
  DE_STATUS_PARSE = 2,
  DE_STATUS_KIND_OR_SHAPE = 3,
  DE_STATUS_INCONSISTENT_DATA = 4,
  DE_STATUS_DOMAIN = 5,
  DE_STATUS_RANGE = 6,
  DE_STATUS_SINGULAR_POINT = 7,
  DE_STATUS_INVALID_UTF8 = 8,
  DE_STATUS_IO = 9,
  DE_STATUS_PANIC = 10,
  DE_STATUS_OTHER = 11,
} DeStatus;

typedef struct DeArcReconstruction DeArcReconstruction;

typedef struct DeDtnSet DeDtnSet;

typedef struct DeField DeField;

typedef struct DeReconstruction DeReconstruction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; valid until the next failure.
 */
const char *de_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void de_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DeStatus de_field_from_json(const char *json, struct DeField **out);

/**
 * # Safety
 * `field` must be valid; `out` must be writable.
 */
enum DeStatus de_field_to_json(const struct DeField *field, char **out);

/**
 * # Safety
 * `field` must be valid; `out` must be writable.
 */
enum DeStatus de_field_eval(const struct DeField *field, double r, double phi, double *out);

/**
 * # Safety
 * `field` must be null or a handle from this library.
 */
void de_field_free(struct DeField *field);

/**
 * Analytic matrix set of a field at truncation `n`.
 *
 * # Safety
 * `field` must be valid; `out` must be writable.
 */
enum DeStatus de_forward(const struct DeField *field, size_t n, struct DeDtnSet **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DeStatus de_dtn_from_json(const char *json, struct DeDtnSet **out);

/**
 * # Safety
 * `set` must be valid; `out` must be writable.
 */
enum DeStatus de_dtn_to_json(const struct DeDtnSet *set, char **out);

/**
 * Entry at math indices `(i, j)` of a block.
 *
 * # Safety
 * `set` must be valid; `out` must be writable.
 */
enum DeStatus de_dtn_entry(const struct DeDtnSet *set,
                           enum DeBlock block,
                           size_t i,
                           size_t j,
                           double *out);

/**
 * # Safety
 * `set` must be valid.
 */
enum DeStatus de_dtn_set_entry(struct DeDtnSet *set,
                               enum DeBlock block,
                               size_t i,
                               size_t j,
                               double value);

/**
 * # Safety
 * `set` must be null or a handle from this library.
 */
void de_dtn_free(struct DeDtnSet *set);

/**
 * Structural checks; `passed` is 1 when every check holds.
 *
 * # Safety
 * `set` must be valid; `passed` and `max_deviation` must be writable.
 */
enum DeStatus de_validate(const struct DeDtnSet *set,
                          double tol,
                          int *passed,
                          double *max_deviation);

/**
 * # Safety
 * `set` must be valid; `out` must be writable.
 */
enum DeStatus de_reconstruct(const struct DeDtnSet *set,
                             size_t n,
                             double tol,
                             int rational,
                             struct DeReconstruction **out);

/**
 * # Safety
 * `rec` must be valid; `out` must be writable.
 */
enum DeStatus de_reconstruction_eval(const struct DeReconstruction *rec,
                                     double r,
                                     double phi,
                                     double *out);

/**
 * `p_{n,k}` when `sine` is 0, `q_{n,k}` otherwise; zero outside the stored triangle.
 *
 * # Safety
 * `rec` must be valid; `out` must be writable.
 */
enum DeStatus de_reconstruction_coefficient(const struct DeReconstruction *rec,
                                            int sine,
                                            size_t n,
                                            uint32_t k,
                                            double *out);

/**
 * # Safety
 * `rec` must be valid; `out` must be writable.
 */
enum DeStatus de_reconstruction_admissibility(const struct DeReconstruction *rec, double *out);

/**
 * # Safety
 * `rec` must be valid; `out` must be writable.
 */
enum DeStatus de_reconstruction_to_field(const struct DeReconstruction *rec, struct DeField **out);

/**
 * # Safety
 * `rec` must be valid; `out` must be writable.
 */
enum DeStatus de_reconstruction_to_json(const struct DeReconstruction *rec, char **out);

/**
 * # Safety
 * `rec` must be null or a handle from this library.
 */
void de_reconstruction_free(struct DeReconstruction *rec);

/**
 * Half-disk inversion of row-major `size x size` sine-mode pairings.
 *
 * # Safety
 * `data` must point to `size * size` doubles; `out` must be writable.
 */
enum DeStatus de_half_disk_invert(const double *data,
                                  size_t size,
                                  size_t n,
                                  double tol,
                                  struct DeReconstruction **out);

/**
 * `ψ(z)` for the arc of half-width `alpha`.
 *
 * # Safety
 * `out_re` and `out_im` must be writable.
 */
enum DeStatus de_psi(double alpha, double re, double im, double *out_re, double *out_im);

/**
 * `ψ⁻¹(z)`; fails with `SINGULAR_POINT` at endpoint images.
 *
 * # Safety
 * `out_re` and `out_im` must be writable.
 */
enum DeStatus de_psi_inverse(double alpha, double re, double im, double *out_re, double *out_im);

/**
 * # Safety
 * `data` must point to `size * size` doubles; `out` must be writable.
 */
enum DeStatus de_arc_invert(double alpha,
                            const double *data,
                            size_t size,
                            size_t n,
                            double tol,
                            struct DeArcReconstruction **out);

/**
 * # Safety
 * `rec` must be valid; `out` must be writable.
 */
enum DeStatus de_arc_eval(const struct DeArcReconstruction *rec, double re, double im, double *out);

/**
 * # Safety
 * `rec` must be null or a handle from this library.
 */
void de_arc_free(struct DeArcReconstruction *rec);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISK_EIT_H */
