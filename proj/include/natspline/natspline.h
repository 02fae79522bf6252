#ifndef NATSPLINE_H
#define NATSPLINE_H

#include <stddef.h>

#if defined(NATSPLINE_BUILDING)
#define NS_API __attribute__((visibility("default")))
#else
#define NS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 1..19 mirror natspline::ErrorCode. */
typedef enum {
    NS_OK = 0,
    NS_NON_INCREASING_KNOTS = 1,
    NS_TOO_FEW_KNOTS = 2,
    NS_NON_FINITE_INPUT = 3,
    NS_SHAPE_MISMATCH = 4,
    NS_SINGULAR_SYSTEM = 5,
    NS_OUT_OF_DOMAIN = 6,
    NS_INVALID_ORDER = 7,
    NS_INDEX_OUT_OF_RANGE = 8,
    NS_INVALID_DERIVATIVE_ORDER = 9,
    NS_ALL_COEFFICIENTS_ZERO = 10,
    NS_OVERLAPPING_NULLSPACES = 11,
    NS_INCONSISTENT_CONSTRAINT = 12,
    NS_NEGATIVE_LAMBDA = 13,
    NS_NON_POSITIVE_LAMBDA = 14,
    NS_SINGULAR_CORNER = 15,
    NS_EMPTY_NULLSPACE = 16,
    NS_BRACKET_TOO_NARROW = 17,
    NS_SINGULAR_GLS = 18,
    NS_INVALID_ARGUMENT = 19,
    NS_NULL_ARGUMENT = 100,
    NS_BUFFER_TOO_SMALL = 101,
    NS_INTERNAL = 102
} ns_status;

/* Message of the last failing call on this thread ("" if none). */
NS_API const char* ns_last_error(void);
NS_API const char* ns_status_name(int status);

typedef struct ns_grid ns_grid;
typedef struct ns_penalty ns_penalty;
typedef struct ns_fit ns_fit;
typedef struct ns_blup ns_blup;

/* Knot grids. Indices are zero-based: knots t_0..t_n, coordinates
   x = (u_0, p_0..p_n, u_n) of length n + 3. */
NS_API int ns_grid_create(const double* knots, size_t count, ns_grid** out);
NS_API int ns_grid_uniform(int n, ns_grid** out);
NS_API void ns_grid_free(ns_grid* grid);
NS_API size_t ns_grid_size(const ns_grid* grid);
NS_API int ns_grid_knots(const ns_grid* grid, double* out, size_t capacity);

/* Dense matrices, row-major. Pass out = NULL to query the shape. */
typedef enum { NS_MATRIX_C, NS_MATRIX_PPEN, NS_MATRIX_U, NS_MATRIX_Q, NS_MATRIX_V } ns_matrix_kind;

/* coeffs holds (a0, a1, a2) for NS_MATRIX_PPEN and is ignored otherwise. */
NS_API int ns_matrix(const ns_grid* grid, ns_matrix_kind kind, const double* coeffs, double* out,
                     size_t capacity, size_t* rows, size_t* cols);

/* phi_j^(order)(t), j = 0..n+2. */
NS_API int ns_eval_basis(const ns_grid* grid, int j, double t, int order, double* out);

/* Penalties on natural coordinates. */
NS_API int ns_penalty_curvature(const ns_grid* grid, ns_penalty** out);
NS_API int ns_penalty_combined(const ns_grid* grid, double a0, double a1, double a2,
                               ns_penalty** out);
NS_API void ns_penalty_free(ns_penalty* penalty);
NS_API int ns_penalty_nullity(const ns_penalty* penalty);

/* Penalized fit of y (length n + 1). penalty = NULL selects the curvature
   smoother; any other penalty uses the general estimator, where lambda = 0
   means the lambda -> 0 limit. */
NS_API int ns_fit_create(const ns_grid* grid, const ns_penalty* penalty, const double* y,
                         double lambda, ns_fit** out);
NS_API void ns_fit_free(ns_fit* fit);
NS_API double ns_fit_lambda(const ns_fit* fit);
NS_API double ns_fit_rss(const ns_fit* fit);
/* Trace of the knot-value hat matrix. */
NS_API double ns_fit_trace(const ns_fit* fit);
/* n + 3 coordinates (u_0, p, u_n). */
NS_API int ns_fit_coords(const ns_fit* fit, double* out, size_t capacity);
NS_API int ns_fit_eval(const ns_fit* fit, double t, int order, double* out);

/* Curvature smoother diagnostics. */
NS_API int ns_hat(const ns_grid* grid, double lambda, double* out, size_t capacity);
NS_API int ns_hat_trace(const ns_grid* grid, double lambda, double* out);
NS_API int ns_psi(const ns_grid* grid, const double* y, double lambda, double* out);
NS_API int ns_detrended_norm2(const ns_grid* grid, const double* y, double* out);
NS_API int ns_sure(const ns_grid* grid, const double* y, double lambda, double sigma2,
                   double* out);
NS_API int ns_pe_estimate(const ns_grid* grid, const double* y, double lambda, double sigma2,
                          double* out);
NS_API int ns_leverage_linear(const ns_grid* grid, int i, int j, double* out);
NS_API int ns_nsr_column(const ns_grid* grid, int i, double lambda, double* out);
NS_API int ns_trend_line(const ns_grid* grid, int i, double* intercept, double* slope);
NS_API int ns_estimate_sigma2(const ns_grid* grid, const double* y, double* out);

/* Smoothing-parameter selection. found = 0 marks "no solution". */
typedef enum {
    NS_METHOD_NOISE_MATCH = 0,
    NS_METHOD_BAND_LOWER = 1,
    NS_METHOD_BAND_UPPER = 2,
    NS_METHOD_SURE = 3
} ns_method;

typedef struct {
    int found;
    double lambda;
    double criterion;
    double log10_lo; /* bracket actually searched */
    double log10_hi;
    int method;
} ns_selection;

typedef struct {
    double sigma2;
    double epsilon;
    double log10_lo;
    double log10_hi;
    double tol;
} ns_selection_config;

NS_API void ns_selection_config_default(ns_selection_config* cfg);
NS_API int ns_select_noise_match(const ns_grid* grid, const double* y, double w_norm2,
                                 const ns_selection_config* cfg, ns_selection* out);
NS_API int ns_select_band(const ns_grid* grid, const double* y, const ns_selection_config* cfg,
                          ns_selection* lower, ns_selection* upper);
NS_API int ns_select_sure(const ns_grid* grid, const double* y, const ns_selection_config* cfg,
                          ns_selection* out);

/* Mixed-model view of a penalized fit. The penalized route is always
   computed; the closed-form (Henderson) route needs sigma_w2 > 0. */
NS_API int ns_blup_create(const ns_grid* grid, const ns_penalty* penalty, const double* y,
                          double sigma_w2, double sigma_s2, ns_blup** out);
NS_API void ns_blup_free(ns_blup* blup);
NS_API size_t ns_blup_fixed_dim(const ns_blup* blup);
NS_API size_t ns_blup_random_dim(const ns_blup* blup);
NS_API int ns_blup_has_closed_form(const ns_blup* blup);
/* route 0: penalized, route 1: closed form. */
NS_API int ns_blup_beta(const ns_blup* blup, int route, double* out, size_t capacity);
NS_API int ns_blup_eta(const ns_blup* blup, int route, double* out, size_t capacity);
NS_API int ns_blup_coords(const ns_blup* blup, double* out, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
