/* C interface to libgwmm: minimax recursions on Galton-Watson trees. */
#ifndef GWMM_H
#define GWMM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GWMM_BUILDING)
#define GWMM_API __declspec(dllexport)
#else
#define GWMM_API __declspec(dllimport)
#endif
#else
#define GWMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gwmm_status {
  GWMM_OK = 0,
  GWMM_E_DOMAIN = 1,
  GWMM_E_CONFIG = 2,
  GWMM_E_UNRESOLVED_TOUCHPOINT = 3,
  GWMM_E_NO_CONVERGENCE = 4,
  GWMM_E_ASSUMPTION_VIOLATED = 5,
  GWMM_E_BUDGET_EXCEEDED = 6,
  GWMM_E_INFINITE_DERIVATIVE = 7,
  GWMM_E_PRECISION_LOSS = 8,
  GWMM_E_DERIVATIVE_ORDER_NOT_FOUND = 9,
  GWMM_E_NOT_A_FIXED_POINT = 10,
  GWMM_E_INSUFFICIENT_SAMPLES = 11,
  GWMM_E_NULL_ARGUMENT = 12,
  GWMM_E_NOT_FOUND = 13,
  GWMM_E_INTERNAL = 99
} gwmm_status;

typedef enum gwmm_precision { GWMM_PRECISION_DOUBLE = 0, GWMM_PRECISION_EXTENDED = 1 } gwmm_precision;

typedef enum gwmm_boundary {
  GWMM_BOUNDARY_UNIFORM = 0,
  GWMM_BOUNDARY_BERNOULLI = 1,
  GWMM_BOUNDARY_BIVARIATE = 2
} gwmm_boundary;

typedef struct gwmm_dist gwmm_dist;
typedef struct gwmm_result gwmm_result;

/* Options shared by the command entry points. Fields a command does not use
   are ignored but still echoed into its output. Fill with gwmm_options_init. */
typedef struct gwmm_options {
  int grid;               /* curve points; scan uses it as the number of rows when step <= 0 */
  int depth;              /* simulate: tree depth; scaling (case C): levels to verify, 0 = skip */
  uint64_t samples;       /* Monte Carlo samples */
  uint64_t seed;
  uint64_t node_budget;   /* per tree sample */
  unsigned threads;       /* 0 = hardware concurrency */
  gwmm_precision precision;
  gwmm_boundary boundary;
  double x;               /* Bernoulli/bivariate leaf parameter; endogeny point */
  int has_x;              /* endogeny: use x instead of the default interior fixed point */
  double q;               /* scaling: fixed point selector (nearest) */
  int has_q;
  double scan_lo, scan_hi, scan_step;
  int pruned;             /* alpha-beta pruned sampler */
} gwmm_options;

GWMM_API void gwmm_options_init(gwmm_options* opt);

GWMM_API const char* gwmm_version(void);
/* Message for the last failing call on this thread. */
GWMM_API const char* gwmm_last_error(void);
GWMM_API const char* gwmm_status_name(gwmm_status s);
/* Process exit code for a status: 0 ok, 2 config, 3 unresolved touchpoint,
   4 numerical failure, 5 budget exceeded, 1 other. */
GWMM_API int gwmm_exit_code(gwmm_status s);

/* spec: text grammar (finite:1=0.45,3=0.55, regular:2, ...) or a JSON object. */
GWMM_API gwmm_status gwmm_dist_parse(const char* spec, gwmm_dist** out);
GWMM_API void gwmm_dist_free(gwmm_dist* d);
/* Canonical text spec; valid until the handle is freed. */
GWMM_API const char* gwmm_dist_spec(const gwmm_dist* d);
GWMM_API gwmm_status gwmm_dist_mean(const gwmm_dist* d, double* out);
GWMM_API gwmm_status gwmm_dist_mass(const gwmm_dist* d, long k, double* out);

GWMM_API gwmm_status gwmm_eval_G(const gwmm_dist* d, double x, double* out);
GWMM_API gwmm_status gwmm_eval_R(const gwmm_dist* d, double x, double* out);
GWMM_API gwmm_status gwmm_eval_f(const gwmm_dist* d, double x, double* out);
GWMM_API gwmm_status gwmm_inverse_G(const gwmm_dist* d, double y, double* out);
/* Taylor coefficients c_0..c_order of f at q; coeffs must hold order+1 values. */
GWMM_API gwmm_status gwmm_jet_f(const gwmm_dist* d, double q, int order, double* coeffs);

/* Commands. On success *out holds a JSON report and, for tabular commands,
   a CSV table. simulate returns GWMM_E_BUDGET_EXCEEDED together with a result
   when more than half of the tree samples hit the node budget. */
GWMM_API gwmm_status gwmm_analyze(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out);
GWMM_API gwmm_status gwmm_curve(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out);
/* family: distribution spec with {p} and {1-p} placeholders. */
GWMM_API gwmm_status gwmm_scan(const char* family, const gwmm_options* opt, gwmm_result** out);
GWMM_API gwmm_status gwmm_simulate(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out);
GWMM_API gwmm_status gwmm_scaling(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out);
GWMM_API gwmm_status gwmm_endogeny(const gwmm_dist* d, const gwmm_options* opt, gwmm_result** out);

GWMM_API const char* gwmm_result_json(const gwmm_result* r);
/* Empty string when the command has no table. */
GWMM_API const char* gwmm_result_csv(const gwmm_result* r);
/* Number at a JSON pointer such as "/fixed_points/1/q". */
GWMM_API gwmm_status gwmm_result_get_double(const gwmm_result* r, const char* pointer, double* out);
GWMM_API void gwmm_result_free(gwmm_result* r);

#ifdef __cplusplus
}
#endif

#endif
