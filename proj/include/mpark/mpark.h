#ifndef MPARK_H_
#define MPARK_H_

/*
 * mpark - mixed-precision additive Runge-Kutta toolkit, C API.
 *
 * The library evaluates implicit Runge-Kutta methods whose implicit stages
 * run at a reduced floating-point precision while explicit stages and the
 * final combination run at full precision. It ships three methods (the
 * implicit midpoint rule, a third-order SDIRK scheme, and a four-stage
 * third-order additive scheme, named "imr", "sdirk" and "novela"), checks
 * their order-condition residuals, maps linear stability regions under a
 * stochastic roundoff model, and drives convergence / efficiency /
 * largest-stable-step experiments.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return MPARK_OK on success; on failure mpark_last_error()
 * describes the problem. Precision levels are spelled "f16", "f32", "f64",
 * "f128"; a mixed pair is written "high/low", e.g. "f64/f16".
 */

#include <stddef.h>

#if defined(_WIN32)
#define MPARK_EXPORT __declspec(dllexport)
#else
#define MPARK_EXPORT __attribute__((visibility("default")))
#endif

#if defined(__cplusplus)
extern "C" {
#endif

typedef enum mpark_status {
  MPARK_OK = 0,
  MPARK_ERR_ARG = 1,           /* bad argument / unknown name / malformed config */
  MPARK_ERR_NOT_CONVERGED = 2, /* Newton hit its iteration cap */
  MPARK_ERR_SINGULAR = 3,      /* singular Jacobian or resolvent */
  MPARK_ERR_RANGE = 4,         /* overflow at the working precision */
  MPARK_ERR_IO = 5             /* file could not be written or read */
} mpark_status;

MPARK_EXPORT const char* mpark_version(void);
MPARK_EXPORT const char* mpark_status_string(mpark_status s);
/* Message for the most recent failure on this thread. */
MPARK_EXPORT const char* mpark_last_error(void);

/* Precision levels */

/* unit roundoff 2^-p of a level named "f16".."f128" */
MPARK_EXPORT mpark_status mpark_unit_roundoff(const char* level, double* out);
/* Round x into the level's value set. mode 0 = nearest-even, 1 = stochastic
 * (seeded, reproducible). Overflow saturates to signed infinity. */
MPARK_EXPORT mpark_status mpark_round(double x, const char* level, int mode,
                                      unsigned long long seed, double* out);

/* Tableaus */

typedef struct mpark_tableau mpark_tableau;

/* method: "imr" | "sdirk" | "novela"; corrections = explicit correction count */
MPARK_EXPORT mpark_status mpark_tableau_create(const char* method, int corrections,
                                               mpark_tableau** out);
MPARK_EXPORT mpark_status mpark_tableau_from_file(const char* path, mpark_tableau** out);
MPARK_EXPORT mpark_status mpark_tableau_write_file(const mpark_tableau* t, const char* path);
MPARK_EXPORT void mpark_tableau_destroy(mpark_tableau* t);
MPARK_EXPORT int mpark_tableau_stages(const mpark_tableau* t);
MPARK_EXPORT int mpark_tableau_corrections(const mpark_tableau* t);
MPARK_EXPORT int mpark_tableau_design_order(const mpark_tableau* t);
/* A and A_eps are s*s row-major, b and b_eps length s; any pointer may be NULL */
MPARK_EXPORT mpark_status mpark_tableau_coefficients(const mpark_tableau* t, double* A,
                                                     double* A_eps, double* b, double* b_eps);

/* Order-condition residuals: the consistency conditions plus the fifteen
 * perturbation rows in both the non-smooth and smooth reading. */
typedef struct mpark_order_report mpark_order_report;

MPARK_EXPORT mpark_status mpark_order_report_create(const mpark_tableau* t,
                                                    mpark_order_report** out);
MPARK_EXPORT void mpark_order_report_destroy(mpark_order_report* r);
MPARK_EXPORT int mpark_order_report_count(const mpark_order_report* r);
/* group is "scheme", "nonsmooth" or "smooth"; name is the residual formula */
MPARK_EXPORT mpark_status mpark_order_report_row(const mpark_order_report* r, int index,
                                                 const char** group, const char** name,
                                                 double* value);
MPARK_EXPORT mpark_status mpark_order_report_value(const mpark_order_report* r, const char* group,
                                                   const char* name, double* value);

/* Problems */

typedef struct mpark_problem mpark_problem;

/* "vdp" {alpha}; "burgers" {nx}; "dahlquist" {re} or {re, im}; "heat" {nx} */
MPARK_EXPORT mpark_status mpark_problem_create(const char* name, const double* params,
                                               int nparams, mpark_problem** out);
MPARK_EXPORT void mpark_problem_destroy(mpark_problem* p);
MPARK_EXPORT int mpark_problem_dim(const mpark_problem* p);
MPARK_EXPORT double mpark_problem_t_final(const mpark_problem* p);
MPARK_EXPORT mpark_status mpark_problem_initial_state(const mpark_problem* p, double* y0);
/* F evaluated at the named precision level; y and f have problem dimension */
MPARK_EXPORT mpark_status mpark_problem_rhs(const mpark_problem* p, const double* y, double* f,
                                            const char* level);

/* Integration */

typedef struct mpark_run mpark_run;

typedef struct mpark_run_options {
  int store_every;            /* 0: endpoints only */
  int newton_max_iters;       /* 0: default 20 */
  double newton_tol_factor;   /* 0: default 10 */
  const double* feps_injection; /* length dim, or NULL; added to every F_eps */
} mpark_run_options;

/* steps * dt must reach the problem's final time. options may be NULL. */
MPARK_EXPORT mpark_status mpark_integrate(const mpark_tableau* t, const mpark_problem* p,
                                          const char* pair, double dt, int steps,
                                          const mpark_run_options* options, mpark_run** out);
MPARK_EXPORT void mpark_run_destroy(mpark_run* r);
/* status of the run itself: OK, NOT_CONVERGED, SINGULAR or RANGE */
MPARK_EXPORT mpark_status mpark_run_status(const mpark_run* r);
MPARK_EXPORT int mpark_run_steps_completed(const mpark_run* r);
MPARK_EXPORT double mpark_run_newton_iters_mean(const mpark_run* r);
MPARK_EXPORT mpark_status mpark_run_final_state(const mpark_run* r, double* y);

/* Classical RK4 ground truth at the named level ("f128" for references). */
MPARK_EXPORT mpark_status mpark_rk4_reference(const mpark_problem* p, double dt_ref,
                                              const char* level, double* y);

/* Stability analysis */

/* Psi_eps = 1 + z b (I - z(A+A_eps) - z eps_tilde diag(tau))^-1 e;
 * tau has one entry per stage (NULL = zeros). */
MPARK_EXPORT mpark_status mpark_psi_eps(const mpark_tableau* t, double z_re, double z_im,
                                        double eps_tilde, const double* tau, double* out_re,
                                        double* out_im);
/* Stable-cell scan: window = {re_min, re_max, im_min, im_max}; cells is
 * nx*ny row-major (1 = stable for all samples) and may be NULL when only the
 * fraction is wanted. */
MPARK_EXPORT mpark_status mpark_stability_region(const mpark_tableau* t, const double window[4],
                                                 int nx, int ny, double eps_tilde, int samples,
                                                 unsigned long long seed, int threads,
                                                 unsigned char* cells, double* stable_fraction);
/* Spectral radius of the mixed-model one-step matrix; ops are "dc" | "ds".
 * dense = 1 computes it from a dense eigensolve instead of per mode. */
MPARK_EXPORT mpark_status mpark_mixed_model_radius(int nx, int corrections, double cfl,
                                                   const char* implicit_op,
                                                   const char* explicit_op, int dense,
                                                   double* rho);
/* Sum_j |Psi_j| (|A_eps|e)_j at real z */
MPARK_EXPORT mpark_status mpark_sensitivity_metric(const mpark_tableau* t, double z, double* out);
/* (z/2)^(c+1) / (1 - z/2) */
MPARK_EXPORT mpark_status mpark_imr_perturbation_gain(double z, int corrections, double* out);
/* Bound on |u^n - U^n| after n steps; model 0: per-step eps*dt, 1: per-step
 * eps (re-cast accounting). Requires |stability function| <= 1 at z. */
MPARK_EXPORT mpark_status mpark_roundoff_growth_bound(const mpark_tableau* t, double z, double eps,
                                                      int n_steps, double dt, int model,
                                                      double* out);

/* Experiment driver
 *
 * config_json is the sweep configuration tree, e.g.
 *   {"problem": {"name": "vdp", "alpha": 3.0},
 *    "method": {"name": "sdirk", "corrections": 2},
 *    "pairs": ["f64/f64", "f64/f16"],
 *    "dts": [0.03125, 0.015625], ...}
 * kind is "converge", "efficiency" or "stable-dt". When out_base is not NULL
 * the driver writes <out_base>.csv and <out_base>.meta.json (plus .svg when
 * plot != 0).
 */

typedef struct mpark_report mpark_report;

MPARK_EXPORT mpark_status mpark_sweep_run(const char* config_json, const char* kind,
                                          const char* out_base, int plot, mpark_report** out);
MPARK_EXPORT void mpark_report_destroy(mpark_report* r);
MPARK_EXPORT int mpark_report_rows(const mpark_report* r);
/* Numeric fields: "dt", "error", "wall_time_s", "newton_iters_mean",
 * "corrections", "largest_stable_dt", "dt_ref", "ref_self_check",
 * "observed_order". String fields: "method", "pair", "status", "ladder". */
MPARK_EXPORT mpark_status mpark_report_value(const mpark_report* r, int row, const char* field,
                                             double* out);
MPARK_EXPORT mpark_status mpark_report_string(const mpark_report* r, int row, const char* field,
                                              const char** out);

/* Analysis artifact writers used by the command-line tool; out_base follows
 * the same .csv/.meta.json/.svg convention. */
MPARK_EXPORT mpark_status mpark_stability_to_files(const char* method, int corrections,
                                                   const double window[4], int nx, int ny,
                                                   double eps_tilde, int samples,
                                                   unsigned long long seed, int threads,
                                                   const char* out_base, int plot,
                                                   double* stable_fraction);
MPARK_EXPORT mpark_status mpark_mixed_model_sweep_to_files(int nx, int corrections, double cfl_min,
                                                           double cfl_max, double cfl_step,
                                                           const char* implicit_op,
                                                           const char* explicit_op, int dense,
                                                           const char* out_base, int plot);
/* methods: comma list like "imr,sdirk,novela"; corrections applies to every
 * listed method (novela only accepts 0); z sweeps [z_min, z_max] linearly. */
MPARK_EXPORT mpark_status mpark_sensitivity_to_files(const char* methods, int corrections,
                                                     double z_min, double z_max, int points,
                                                     const char* out_base, int plot);

#if defined(__cplusplus)
}
#endif

#endif /* MPARK_H_ */
