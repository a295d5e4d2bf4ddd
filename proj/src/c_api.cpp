#include "gltr/c_api.h"

#include <new>
#include <string>

#include "gltr/krylov.hpp"

struct gltr_solver {
  gltr::KrylovSolver solver;
  gltr::Action last;
  std::string error;
};

namespace {

void export_action(const gltr::Action& a, gltr_action* out) {
  out->kind = static_cast<int>(a.kind);
  out->outcome = static_cast<int>(a.outcome);
  out->has_store_basis = a.store_basis.has_value();
  out->store_basis = a.store_basis.value_or(0.0);
  out->has_p_from_v = a.p_from_v.has_value();
  out->p_from_v = a.p_from_v.value_or(0.0);
  out->alpha = a.alpha;
  out->beta = a.beta;
  out->coef_g = a.coef_g;
  out->coef_gprev = a.coef_gprev;
  out->shift_scale = a.shift_scale;
  out->h = a.h.empty() ? nullptr : a.h.data();
  out->h_len = a.h.size();
}

template <class F>
int guarded(gltr_solver* s, gltr_action* out, F&& f) {
  if (!s || !out) return GLTR_ERR_ARGUMENT;
  try {
    s->last = f();
    s->error.clear();
    export_action(s->last, out);
    return GLTR_OK;
  } catch (const gltr::ProtocolError& e) {
    s->error = e.what();
    return GLTR_ERR_PROTOCOL;
  } catch (const gltr::PreconditionerError& e) {
    s->error = e.what();
    return GLTR_ERR_PRECONDITIONER;
  } catch (const std::invalid_argument& e) {
    s->error = e.what();
    return GLTR_ERR_ARGUMENT;
  } catch (const std::exception& e) {
    s->error = e.what();
    return GLTR_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

gltr_config gltr_default_config(void) {
  gltr_config c{};
  c.tol_rel_i = -1.0;
  c.tol_rel_b = -1.0;
  return c;
}

gltr_solver* gltr_create(void) { return new (std::nothrow) gltr_solver(); }

void gltr_destroy(gltr_solver* s) { delete s; }

int gltr_init(gltr_solver* s, const gltr_config* cfg, double radius, gltr_action* out) {
  if (!cfg) return GLTR_ERR_ARGUMENT;
  return guarded(s, out, [&] {
    gltr::TerminationConfig tc;
    tc.tol_abs_i = cfg->tol_abs_i;
    tc.tol_abs_b = cfg->tol_abs_b;
    if (cfg->tol_rel_i >= 0.0) tc.tol_rel_i = cfg->tol_rel_i;
    if (cfg->tol_rel_b >= 0.0) tc.tol_rel_b = cfg->tol_rel_b;
    if (cfg->max_iter > 0) tc.max_iter = cfg->max_iter;
    gltr::DriverOptions opts;
    if (cfg->dimension > 0) opts.dimension = cfg->dimension;
    if (cfg->lanczos_only) opts.mode = gltr::KrylovMode::lanczos_only;
    return s->solver.init(tc, radius, opts);
  });
}

int gltr_step(gltr_solver* s, double reply, gltr_action* out) {
  return guarded(s, out, [&] { return s->solver.step(reply); });
}

int gltr_step_noreply(gltr_solver* s, gltr_action* out) {
  return guarded(s, out, [&] { return s->solver.step(); });
}

int gltr_reenter_radius(gltr_solver* s, double radius, gltr_action* out) {
  return guarded(s, out, [&] { return s->solver.reenter_radius(radius); });
}

int gltr_request_new_krylov(gltr_solver* s, gltr_action* out) {
  return guarded(s, out, [&] { return s->solver.request_new_krylov(); });
}

double gltr_lambda(const gltr_solver* s) { return s ? s->solver.state().lambda : 0.0; }

size_t gltr_hess_products(const gltr_solver* s) {
  return s ? s->solver.state().hess_products : 0;
}

const char* gltr_last_error(const gltr_solver* s) { return s ? s->error.c_str() : "null handle"; }

}
