#ifndef IETLAB_H
#define IETLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum IetlabStatus {
  IETLAB_STATUS_OK = 0,
  IETLAB_STATUS_NULL_POINTER = 1,
  IETLAB_STATUS_INVALID_UTF8 = 2,
  // Malformed input: bad syntax, reducible permutation, point out of range.
  IETLAB_STATUS_INVALID_INPUT = 3,
  // Arithmetic could not decide, e.g. equal lengths or exhausted precision.
  IETLAB_STATUS_NUMERIC = 4,
  IETLAB_STATUS_PANIC = 5,
} IetlabStatus;

// Opaque IET handle.
typedef struct IetlabIet IetlabIet;

// Opaque permutation handle.
typedef struct IetlabPermutation IetlabPermutation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string.
const char *ietlab_version(void);

// Message of the last failure on this thread, or null. Valid until the next
// failing call on the same thread.
const char *ietlab_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void ietlab_string_free(char *s);

// Parses `"A B C / C B A"`.
//
// # Safety
// `text` must be a nul-terminated string and `out` writable.
enum IetlabStatus ietlab_perm_parse(const char *text, struct IetlabPermutation **out);

// # Safety
// `p` must come from [`ietlab_perm_parse`] and not have been freed.
void ietlab_perm_free(struct IetlabPermutation *p);

// Classification as a JSON object string.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum IetlabStatus ietlab_perm_classify(const struct IetlabPermutation *p, char **out);

// Builds an IET from a permutation string and whitespace-separated rational
// lengths; lengths are normalized to sum to one.
//
// # Safety
// Both strings must be nul-terminated and `out` writable.
enum IetlabStatus ietlab_iet_new(const char *perm, const char *lengths, struct IetlabIet **out);

// # Safety
// `t` must come from this library and not have been freed.
void ietlab_iet_free(struct IetlabIet *t);

// Number of intervals.
//
// # Safety
// `t` must be a live handle or null (which yields 0).
size_t ietlab_iet_dimension(const struct IetlabIet *t);

// Exact image of the rational `x` (as `"p/q"`), returned as `"p/q"`.
//
// # Safety
// `t` must be a live handle, `x` nul-terminated and `out` writable.
enum IetlabStatus ietlab_iet_apply_str(const struct IetlabIet *t, const char *x, char **out);

// Image of a double, computed exactly from its binary value.
//
// # Safety
// `t` must be a live handle and `out` writable.
enum IetlabStatus ietlab_iet_apply_f64(const struct IetlabIet *t, double x, double *out);

// One Rauzy–Veech step in place (renormalized to length one). Writes `'t'`
// or `'b'` to `kind`.
//
// # Safety
// `t` must be a live handle and `kind` writable or null.
enum IetlabStatus ietlab_iet_rauzy_step(struct IetlabIet *t, char *kind);

// Permutation of the IET as `"A B / B A"` text.
//
// # Safety
// `t` must be a live handle and `out` writable.
enum IetlabStatus ietlab_iet_permutation(const struct IetlabIet *t, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IETLAB_H */
