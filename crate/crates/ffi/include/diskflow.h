#ifndef DISKFLOW_H
#define DISKFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum DfDwKind {
  DF_DW_KIND_DILATION = 0,
  DF_DW_KIND_HYPERBOLIC = 1,
  DF_DW_KIND_PARABOLIC_AUTOMORPHIC = 2,
  DF_DW_KIND_PARABOLIC_NONAUTOMORPHIC = 3,
  DF_DW_KIND_AUTOMORPHISM_GROUP_ELLIPTIC = 4,
} DfDwKind;

typedef enum DfKoenigsKind {
  // Chosen from the Denjoy-Wolff classification.
  DF_KOENIGS_KIND_AUTO = 0,
  DF_KOENIGS_KIND_SCHROEDER = 1,
  DF_KOENIGS_KIND_ABEL = 2,
} DfKoenigsKind;

typedef enum DfStatus {
  DF_STATUS_OK = 0,
  DF_STATUS_NULL_POINTER = 1,
  DF_STATUS_INVALID_UTF8 = 2,
  DF_STATUS_PARSE_ERROR = 3,
  DF_STATUS_EVAL_ERROR = 4,
  DF_STATUS_INVALID_ARGUMENT = 5,
  DF_STATUS_FLOW_ERROR = 6,
  DF_STATUS_BOUNDARY_ERROR = 7,
  DF_STATUS_KOENIGS_ERROR = 8,
  DF_STATUS_COMMUTE_ERROR = 9,
  DF_STATUS_PANIC = 10,
} DfStatus;

// Parsed expression.
typedef struct DfExpr DfExpr;

// Semigroup generator.
typedef struct DfGenerator DfGenerator;

// Schroeder or Abel model.
typedef struct DfKoenigsModel DfKoenigsModel;

typedef struct DfIntegratorConfig {
  double rel_tol;
  double abs_tol;
  double h_init;
  double h_min;
  uint64_t max_steps;
} DfIntegratorConfig;

typedef struct DfComplex {
  double re;
  double im;
} DfComplex;

typedef struct DfClassification {
  enum DfDwKind kind;
  struct DfComplex tau;
  struct DfComplex beta;
  // Valid only when `has_alpha` is nonzero.
  struct DfComplex alpha;
  // Valid only when `has_gamma` is nonzero.
  struct DfComplex gamma;
  uint8_t has_alpha;
  uint8_t has_gamma;
} DfClassification;

typedef struct DfBoundaryDerivative {
  struct DfComplex tau;
  struct DfComplex predicted;
  struct DfComplex measured;
  double measured_error;
  double residual;
} DfBoundaryDerivative;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *df_version(void);

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *df_last_error_message(void);

// Writes the default integrator settings.
//
// # Safety
// `out` must be null or point to writable memory for one `DfIntegratorConfig`.
enum DfStatus df_integrator_default(struct DfIntegratorConfig *out);

// Parses `text`. On a parse error `*error_offset` (if non-null) receives the
// byte offset of the error.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable;
// `error_offset` may be null.
enum DfStatus df_expr_parse(const char *text, struct DfExpr **out, uintptr_t *error_offset);

// # Safety
// `expr` must be null or a handle from `df_expr_parse` not yet freed.
void df_expr_free(struct DfExpr *expr);

// Value of the expression at `z`.
//
// # Safety
// `expr` must be a live handle; `out` must be writable.
enum DfStatus df_expr_eval(const struct DfExpr *expr, struct DfComplex z, struct DfComplex *out);

// Value and derivatives of orders 1..=3 at `z`, written to `out[0..4]`.
//
// # Safety
// `expr` must be a live handle; `out` must point to 4 writable `DfComplex`.
enum DfStatus df_expr_eval_jet(const struct DfExpr *expr,
                               struct DfComplex z,
                               struct DfComplex *out);

// Canonical printed form; release with `df_string_free`.
//
// # Safety
// `expr` must be a live handle; `out` must be writable.
enum DfStatus df_expr_to_string(const struct DfExpr *expr, char **out);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void df_string_free(char *s);

// Parses and validates a generator expression.
//
// # Safety
// As for `df_expr_parse`.
enum DfStatus df_generator_new(const char *text, struct DfGenerator **out, uintptr_t *error_offset);

// # Safety
// `g` must be null or a handle from `df_generator_new` not yet freed.
void df_generator_free(struct DfGenerator *g);

// `F_t(z)` and its z-derivatives through `order` (0..=3), written to
// `out[0..=order]`. A null `cfg` selects the defaults.
//
// # Safety
// `g` must be a live handle; `cfg` null or valid; `out` must point to
// `order + 1` writable `DfComplex`.
enum DfStatus df_flow_evolve(const struct DfGenerator *g,
                             struct DfComplex z,
                             double t,
                             uint32_t order,
                             const struct DfIntegratorConfig *cfg,
                             struct DfComplex *out);

// Denjoy-Wolff point and type.
//
// # Safety
// `g` must be a live handle; `cfg` null or valid; `out` writable.
enum DfStatus df_classify(const struct DfGenerator *g,
                          const struct DfIntegratorConfig *cfg,
                          struct DfClassification *out);

// Boundary derivative of order `order` (1..=3) of `F_t` at the Denjoy-Wolff
// point, measured and predicted from `f'`, `f''`, `f'''` there.
//
// # Safety
// `g` must be a live handle; `cfg` null or valid; `out` writable.
enum DfStatus df_boundary_derivative(const struct DfGenerator *g,
                                     double t,
                                     uint32_t order,
                                     const struct DfIntegratorConfig *cfg,
                                     struct DfBoundaryDerivative *out);

// Builds a Schroeder or Abel model with the default stopping rule.
//
// # Safety
// `g` must be a live handle; `cfg` null or valid; `out` writable.
enum DfStatus df_koenigs_build(const struct DfGenerator *g,
                               enum DfKoenigsKind kind,
                               const struct DfIntegratorConfig *cfg,
                               struct DfKoenigsModel **out);

// # Safety
// `m` must be null or a handle from `df_koenigs_build` not yet freed.
void df_koenigs_free(struct DfKoenigsModel *m);

// Model kind: `Schroeder` for both interior and boundary Schroeder models.
//
// # Safety
// `m` must be a live handle; `out` writable.
enum DfStatus df_koenigs_kind(const struct DfKoenigsModel *m, enum DfKoenigsKind *out);

// Value of the model's intertwining function at `z`.
//
// # Safety
// `m` must be a live handle; `out` writable.
enum DfStatus df_koenigs_eval(const struct DfKoenigsModel *m,
                              struct DfComplex z,
                              struct DfComplex *out);

// Largest `|F_t(G_s(z)) - G_s(F_t(z))|` over the default grid and time pairs.
//
// # Safety
// `f`, `g` must be live handles; `cfg` null or valid; `out` writable.
enum DfStatus df_commute_residual(const struct DfGenerator *f,
                                  const struct DfGenerator *g,
                                  const struct DfIntegratorConfig *cfg,
                                  double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DISKFLOW_H */
