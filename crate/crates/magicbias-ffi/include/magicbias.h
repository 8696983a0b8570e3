#ifndef MAGICBIAS_H
#define MAGICBIAS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MbStatus {
  MB_STATUS_OK = 0,
  MB_STATUS_NULL_POINTER = 1,
  MB_STATUS_INVALID_ARGUMENT = 2,
  MB_STATUS_COMPUTATION = 3,
  MB_STATUS_PANIC = 4,
} MbStatus;

// Fault-configuration counts of one gadget for up to four bias sets.
typedef struct MbEnumeration MbEnumeration;

// Logical noise of one grid point. `ptm` is the reconstructed logical PTM,
// row major in the I, X, Y, Z basis.
typedef struct MbMetrics {
  double accept_rate;
  double leak_rate;
  double r_proc;
  double r_avg;
  double p_xl;
  double p_yl;
  double p_zl;
  double eta_zl;
  double eta_xl;
  double ptm[16];
} MbMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mb_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *mb_last_error(void);

// Enumerates all fault configurations up to `order` for the gadget with the
// noisy components in `flags` (letters S, M, I, E or "none").
//
// Each entry of `sets` is a preset name (Z, X, Y, M) or comma-separated
// two-qubit generators such as "Z1Z2,X1". `workers` = 0 uses every core.
//
// # Safety
// `flags` and the `n_sets` entries of `sets` must be NUL-terminated strings;
// `out` must be writable.
enum MbStatus mb_enumerate(const char *flags,
                           const char *const *sets,
                           size_t n_sets,
                           uint32_t order,
                           uint32_t workers,
                           struct MbEnumeration **out);

// Number of fault sites of the enumerated gadget.
//
// # Safety
// `h` must come from `mb_enumerate`; `out` must be writable.
enum MbStatus mb_enumeration_sites(const struct MbEnumeration *h, size_t *out);

// Bias of the depolarizing channel for bias set `set`: 0.25 for every
// two-qubit set.
//
// # Safety
// `h` must come from `mb_enumerate`; `out` must be writable.
enum MbStatus mb_depolarizing_eta(const struct MbEnumeration *h, size_t set, double *out);

// Reconstructs the logical channel at one (eta, p) point. `eta` may be
// infinite. `adaptive` selects the adaptive T correction.
//
// # Safety
// `h` must come from `mb_enumerate`; `out` must be writable.
enum MbStatus mb_analyse(const struct MbEnumeration *h,
                         size_t set,
                         double eta,
                         double p,
                         bool adaptive,
                         struct MbMetrics *out);

// Frees a handle from `mb_enumerate`. NULL is ignored.
//
// # Safety
// `h` must come from `mb_enumerate` and not be used afterwards.
void mb_enumeration_free(struct MbEnumeration *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAGICBIAS_H */
