#ifndef UNIGEN_H
#define UNIGEN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define UNIGEN_OK 0

#define UNIGEN_ERR_IO 1

#define UNIGEN_ERR_INVALID_INPUT 2

#define UNIGEN_ERR_NOT_GENERATING 3

#define UNIGEN_ERR_NO_CONVERGENCE 4

#define UNIGEN_ERR_COVERAGE_NOT_REACHED 5

#define UNIGEN_ERR_BUDGET_EXHAUSTED 6

#define UNIGEN_ERR_NULL_ARGUMENT 8

#define UNIGEN_ERR_PANIC 9

#define UNIGEN_ERR_OUT_OF_RANGE 10

// Generators completed to a basis of their algebra.
typedef struct UnigenBasis UnigenBasis;

// A validated epsilon-net.
typedef struct UnigenNet UnigenNet;

// Validated generators.
typedef struct UnigenProblem UnigenProblem;

// A word over the generators with the error it achieved against its target.
typedef struct UnigenWord UnigenWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. The pointer stays
// valid until the next call into this library on the same thread.
const char *unigen_last_error_message(void);

// Parses a problem document (`dim`, `structure`, `generators`, ...).
int32_t unigen_problem_from_json(const char *json, struct UnigenProblem **out);

// One of the bundled demos: `su2_pauli_pair`, `su3_gellmann_pair`,
// `so3_rotations`.
int32_t unigen_problem_demo(const char *name, struct UnigenProblem **out);

void unigen_problem_free(struct UnigenProblem *p);

// Matrix size `d` and generator count `m`.
int32_t unigen_problem_shape(const struct UnigenProblem *p, size_t *dim, size_t *count);

// Dimension of the Lie algebra spanned by the generators and their
// iterated brackets.
int32_t unigen_problem_closure_dim(const struct UnigenProblem *p, size_t *out);

// Word-length bound for an `n`-dimensional algebra with `m` generators.
int32_t unigen_bound(size_t n, size_t m, uint64_t *out);

// Completes the generators to a basis. Fails with
// `UNIGEN_ERR_NOT_GENERATING` if the problem declares an algebra dimension
// the generators do not reach.
int32_t unigen_basis_complete(const struct UnigenProblem *p, struct UnigenBasis **out);

void unigen_basis_free(struct UnigenBasis *b);

// Basis size `n` and the worst-case chart word length.
int32_t unigen_basis_info(const struct UnigenBasis *b, size_t *n, uint64_t *bound);

// Builds a validated net of the given radius. Random choices are fully
// determined by `seed`.
int32_t unigen_net_build(const struct UnigenBasis *b,
                         double radius,
                         uint64_t seed,
                         struct UnigenNet **out);

// Loads a net cache written by [`unigen_net_to_json`] or the CLI, checking
// it against the basis generators.
int32_t unigen_net_from_json(const struct UnigenBasis *b, const char *json, struct UnigenNet **out);

// Serializes the net; release the string with [`unigen_string_free`].
int32_t unigen_net_to_json(const struct UnigenBasis *b, const struct UnigenNet *n, char **out);

// Number of points and the longest point word.
int32_t unigen_net_info(const struct UnigenNet *n, size_t *points, size_t *max_word_len);

void unigen_net_free(struct UnigenNet *n);

// Writes `target` as a word whose replay is within `tol` of it.
int32_t unigen_synthesize(const struct UnigenBasis *b,
                          const struct UnigenNet *n,
                          const double *target,
                          size_t target_len,
                          double tol,
                          struct UnigenWord **out);

// Replaces every negative time by a nonnegative one with the same
// exponential up to `per_factor_tol`. The new word's stated error is the
// old one plus the accumulated lift error.
int32_t unigen_word_lift_nonneg(const struct UnigenBasis *b,
                                const struct UnigenWord *w,
                                double per_factor_tol,
                                struct UnigenWord **out);

int32_t unigen_word_len(const struct UnigenWord *w, size_t *out);

// Letter `index`: zero-based generator index and time.
int32_t unigen_word_letter(const struct UnigenWord *w,
                           size_t index,
                           size_t *generator,
                           double *time);

// Error bound stated for the word against its target.
int32_t unigen_word_stated_error(const struct UnigenWord *w, double *out);

// Frobenius distance between the replayed word and `target`.
int32_t unigen_word_replay_error(const struct UnigenBasis *b,
                                 const struct UnigenWord *w,
                                 const double *target,
                                 size_t target_len,
                                 double *out);

// Serializes the word in the CLI's word-file format.
int32_t unigen_word_to_json(const struct UnigenWord *w, char **out);

void unigen_word_free(struct UnigenWord *w);

// Releases a string returned by this library.
void unigen_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIGEN_H */
