/* Plain C surface over KrylovSolver for foreign-language bindings.
 *
 * Action and outcome codes are the integer values of gltr::ActionKind and
 * gltr::Outcome. Functions return 0 on success and a negative code on
 * error; gltr_last_error() describes the last failure. The h array of an
 * action stays valid until the next call on the same handle. */
#ifndef GLTR_C_API_H
#define GLTR_C_API_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  GLTR_INIT_PRECOND = 1,
  GLTR_HESS_PROD = 2,
  GLTR_CG_UPDATE = 3,
  GLTR_CG_DIR = 4,
  GLTR_LANCZOS_GRAD = 5,
  GLTR_RETRANSFORM = 6,
  GLTR_NEW_KRYLOV = 7,
  GLTR_OBJ_VALUE = 8,
  GLTR_DONE = 9
};

enum {
  GLTR_OUTCOME_NONE = 0,
  GLTR_OUTCOME_INTERIOR = 1,
  GLTR_OUTCOME_BOUNDARY = 2,
  GLTR_OUTCOME_MAX_ITER = 3,
  GLTR_OUTCOME_HARD_CASE_INVARIANT = 4,
  GLTR_OUTCOME_CONVEXIFIED = 5,
  GLTR_OUTCOME_NUMERICAL_FAILURE = 6
};

enum {
  GLTR_OK = 0,
  GLTR_ERR_ARGUMENT = -1,
  GLTR_ERR_PROTOCOL = -2,
  GLTR_ERR_PRECONDITIONER = -3,
  GLTR_ERR_INTERNAL = -4
};

typedef struct gltr_action {
  int kind;
  int outcome;
  int has_store_basis;
  double store_basis;
  int has_p_from_v;
  double p_from_v;
  double alpha;
  double beta;
  double coef_g;
  double coef_gprev;
  double shift_scale;
  const double* h;
  size_t h_len;
} gltr_action;

/* Negative relative tolerances and max_iter == 0 select the defaults. */
typedef struct gltr_config {
  double tol_abs_i;
  double tol_abs_b;
  double tol_rel_i;
  double tol_rel_b;
  size_t max_iter;
  size_t dimension; /* 0 when unknown */
  int lanczos_only;
} gltr_config;

typedef struct gltr_solver gltr_solver;

gltr_config gltr_default_config(void);
gltr_solver* gltr_create(void);
void gltr_destroy(gltr_solver* s);

int gltr_init(gltr_solver* s, const gltr_config* cfg, double radius, gltr_action* out);
int gltr_step(gltr_solver* s, double reply, gltr_action* out);
int gltr_step_noreply(gltr_solver* s, gltr_action* out);
int gltr_reenter_radius(gltr_solver* s, double radius, gltr_action* out);
int gltr_request_new_krylov(gltr_solver* s, gltr_action* out);

double gltr_lambda(const gltr_solver* s);
size_t gltr_hess_products(const gltr_solver* s);
const char* gltr_last_error(const gltr_solver* s);

#ifdef __cplusplus
}
#endif

#endif
