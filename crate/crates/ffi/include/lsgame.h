#ifndef LSGAME_H
#define LSGAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Status codes; the non-zero values match the command-line exit codes.
 */
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_MALFORMED = 2,
  LS_STATUS_PRECONDITION = 3,
  LS_STATUS_RESOURCE = 4,
  LS_STATUS_ANALYSIS = 5,
  LS_STATUS_NULL_POINTER = 10,
  LS_STATUS_INVALID_UTF8 = 11,
  LS_STATUS_PANIC = 12,
} LsStatus;

/*
 The linear-system game of a system.
 */
typedef struct LsGame LsGame;

/*
 A finite presentation, possibly with a designated involution.
 */
typedef struct LsPresentation LsPresentation;

/*
 A linear system `Mx = c` over GF(2).
 */
typedef struct LsSystem LsSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. Valid until the
 next failing call on the same thread.
 */
const char *ls_last_error(void);

/*
 # Safety
 `s` must be NULL or a string returned by this library.
 */
void ls_string_free(char *s);

/*
 Parse the `m n` / `j1 j2 ... | c` system format.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LsStatus ls_system_parse(const char *text, struct LsSystem **out);

/*
 # Safety
 `out` must be a valid pointer.
 */
enum LsStatus ls_system_magic_square(struct LsSystem **out);

/*
 # Safety
 `sys` must be NULL or a handle from this library, not used afterwards.
 */
void ls_system_free(struct LsSystem *sys);

/*
 Number of equations, or 0 for NULL.

 # Safety
 `sys` must be NULL or a live handle.
 */
uintptr_t ls_system_rows(const struct LsSystem *sys);

/*
 Number of variables, or 0 for NULL.

 # Safety
 `sys` must be NULL or a live handle.
 */
uintptr_t ls_system_columns(const struct LsSystem *sys);

/*
 The system in its text format.

 # Safety
 `sys` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_system_to_text(const struct LsSystem *sys, char **out);

/*
 Parse the `gens` / `inv` / `rel` presentation format.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LsStatus ls_presentation_parse(const char *text, struct LsPresentation **out);

/*
 # Safety
 `p` must be NULL or a handle from this library, not used afterwards.
 */
void ls_presentation_free(struct LsPresentation *p);

/*
 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_presentation_to_text(const struct LsPresentation *p, char **out);

/*
 Check an area certificate; `valid` receives 1 when the factors multiply
 out to the target and `area` the number of factors.

 # Safety
 `p` must be a live handle, `cert` a NUL-terminated string, `valid` and `area` valid pointers.
 */
enum LsStatus ls_presentation_verify_certificate(const struct LsPresentation *p,
                                                 const char *cert,
                                                 bool *valid,
                                                 uintptr_t *area);

/*
 J-normalize, double and compile a presentation with an involution into a weight-3 system.

 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_compile_presentation(const struct LsPresentation *p, struct LsSystem **out);

/*
 Solution group of a system.

 # Safety
 `sys` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_solution_group(const struct LsSystem *sys, struct LsPresentation **out);

/*
 # Safety
 `sys` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_game_new(const struct LsSystem *sys, struct LsGame **out);

/*
 # Safety
 `g` must be NULL or a handle from this library, not used afterwards.
 */
void ls_game_free(struct LsGame *g);

/*
 Exact classical value as `numer / denom`.

 # Safety
 `g` must be a live handle, `numer` and `denom` valid pointers.
 */
enum LsStatus ls_game_classical_value(const struct LsGame *g, int64_t *numer, int64_t *denom);

/*
 Upper bound on the commuting-operator value at NPA level 1 or 2.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum LsStatus ls_game_npa_bound(const struct LsGame *g, uint32_t level, double *out);

/*
 Run the referee against the regular-representation provers of a weight-3
 system. `digest` receives the hex SHA-256 of the transcript.

 # Safety
 `sys` must be a live handle; `accepted` and `digest` valid pointers.
 */
enum LsStatus ls_pzk_protocol(const struct LsSystem *sys,
                              uint64_t rounds,
                              uint64_t seed,
                              uint64_t *accepted,
                              char **digest);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LSGAME_H */
