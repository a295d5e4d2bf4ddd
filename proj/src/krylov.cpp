#include "gltr/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gltr {

namespace {

constexpr double kSqrtEps = 1.4901161193847656e-08;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::init_precond: return "INIT_PRECOND";
    case ActionKind::hess_prod: return "HESS_PROD";
    case ActionKind::cg_update: return "CG_UPDATE";
    case ActionKind::cg_dir: return "CG_DIR";
    case ActionKind::lanczos_grad: return "LANCZOS_GRAD";
    case ActionKind::retransform: return "RETRANSFORM";
    case ActionKind::new_krylov: return "NEW_KRYLOV";
    case ActionKind::obj_value: return "OBJ_VALUE";
    case ActionKind::done: return "DONE";
  }
  return "UNKNOWN";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::none: return "none";
    case Outcome::interior_converged: return "interior-converged";
    case Outcome::boundary_converged: return "boundary-converged";
    case Outcome::max_iter: return "max-iter";
    case Outcome::hard_case_invariant_subspace: return "hard-case-invariant-subspace";
    case Outcome::convexified_resolve: return "convexified-resolve";
    case Outcome::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

bool Action::expects_reply() const {
  switch (kind) {
    case ActionKind::init_precond:
    case ActionKind::hess_prod:
    case ActionKind::cg_update:
    case ActionKind::lanczos_grad:
    case ActionKind::new_krylov:
    case ActionKind::obj_value:
      return true;
    default:
      return false;
  }
}

bool ill_conditioning_suspected(double lambda, double rho_min, double rho_max) {
  return rho_max > 0.0 && lambda >= 1e-2 * std::max(1.0, rho_max) &&
         std::abs(rho_min) <= 1e-8 * rho_max;
}

GateDecision ill_conditioning_gate(double q_h, double q_x) {
  if (q_x > 0.0 || std::abs(q_x - q_h) > 1e-7 * std::max(1.0, std::abs(q_x)))
    return GateDecision::convexify_resolve;
  return GateDecision::proceed;
}

Action KrylovSolver::init(const TerminationConfig& cfg, double radius, const DriverOptions& opts) {
  auto nonneg = [](double x) { return x >= 0.0; };
  if (!nonneg(cfg.tol_abs_i) || !nonneg(cfg.tol_abs_b) || !nonneg(cfg.tol_curvature) ||
      (cfg.tol_rel_i && !nonneg(*cfg.tol_rel_i)) || (cfg.tol_rel_b && !nonneg(*cfg.tol_rel_b)))
    throw std::invalid_argument("KrylovSolver::init: tolerances must be nonnegative");
  if (!(radius > 0.0) || !finite(radius))
    throw std::invalid_argument("KrylovSolver::init: radius must be positive");

  cfg_ = cfg;
  opts_ = opts;
  st_ = KrylovState{};
  st_.radius = radius;
  st_.phase = opts.mode == KrylovMode::cg_first ? Phase::cg : Phase::lanczos;
  gv_.clear();
  norms_.clear();
  signs_.clear();
  p_norm2_ = 0.0;
  s_dot_p_ = 0.0;
  coupling_max_ = 0.0;
  block_start_ = true;
  switching_ = false;
  has_rayleigh_ = false;
  block_begin_ = 0;
  warm_ = WarmStart{};
  base_outcome_ = Outcome::none;
  gate_pending_ = false;
  work_phase_ = st_.phase;
  Action a;
  a.kind = ActionKind::init_precond;
  return emit(a, Await::init_precond);
}

Action KrylovSolver::emit(Action a, Await next) {
  await_ = next;
  pending_ = std::move(a);
  return pending_;
}

Action KrylovSolver::step() {
  switch (await_) {
    case Await::cg_dir: {
      Action a;
      a.kind = ActionKind::hess_prod;
      return emit(a, Await::cg_hess);
    }
    case Await::retransform: {
      if (gate_pending_) {
        gate_pending_ = false;
        Action a;
        a.kind = ActionKind::obj_value;
        return emit(a, Await::obj_value);
      }
      return finish_done(base_outcome_);
    }
    case Await::final_retransform:
      return finish_done(Outcome::convexified_resolve);
    default:
      throw ProtocolError(std::string("step(): pending ") + to_string(pending_.kind) +
                          " expects a reply");
  }
}

Action KrylovSolver::step(double reply) {
  if (!pending_.expects_reply())
    throw ProtocolError(std::string("step(reply): pending ") + to_string(pending_.kind) +
                        " takes no reply");
  if (!finite(reply)) return fail_numerically();

  switch (await_) {
    case Await::init_precond: {
      if (reply < 0.0) throw PreconditionerError("preconditioner is not positive definite");
      st_.gamma0 = std::sqrt(reply);
      if (reply == 0.0) {
        st_.status = SolutionStatus::interior;
        return finish(Outcome::interior_converged);
      }
      gv_ = {reply};
      norms_ = {st_.gamma0};
      signs_ = {1.0};
      p_norm2_ = reply;
      st_.s_norm = {0.0};
      return begin_iteration();
    }

    case Await::cg_hess: {
      ++st_.hess_products;
      const std::size_t j = st_.iteration;
      update_rayleigh(reply / p_norm2_);
      if (std::abs(reply) <= cfg_.tol_curvature * rho_scale() * p_norm2_) {
        st_.phase = Phase::lanczos;
        work_phase_ = Phase::lanczos;
        switching_ = true;
        return begin_iteration();
      }
      const double alpha = gv_[j] / reply;
      double delta = 1.0 / alpha;
      if (j > 0) delta += st_.beta[j - 1] / st_.alpha[j - 1];
      st_.alpha.push_back(alpha);
      st_.t.push_back(delta, j == 0 ? 0.0 : norms_[j]);
      Action a;
      a.kind = ActionKind::cg_update;
      a.alpha = alpha;
      return emit(a, Await::cg_update);
    }

    case Await::cg_update: {
      if (reply < 0.0) throw PreconditionerError("preconditioner is not positive definite");
      const std::size_t j = st_.iteration;
      const double alpha = st_.alpha[j];
      const double beta = reply / gv_[j];
      st_.beta.push_back(beta);
      gv_.push_back(reply);
      signs_.push_back(alpha > 0.0 ? -signs_[j] : signs_[j]);

      const double s_prev = st_.s_norm.back();
      const double s2 = s_prev * s_prev + 2.0 * alpha * s_dot_p_ + alpha * alpha * p_norm2_;
      st_.s_norm.push_back(std::sqrt(std::max(0.0, s2)));
      s_dot_p_ = beta * (s_dot_p_ + alpha * p_norm2_);
      p_norm2_ = reply + beta * beta * p_norm2_;

      return after_extension(std::sqrt(beta) / std::abs(alpha));
    }

    case Await::lanczos_hess: {
      ++st_.hess_products;
      const std::size_t j = st_.iteration;
      const double delta = reply;
      update_rayleigh(delta);
      const bool opens_block = block_start_;
      if (opens_block && !st_.t.empty()) {
        st_.t.start_block(delta);
        block_begin_ = j;
      } else {
        st_.t.push_back(delta, j == 0 ? 0.0 : norms_[j]);
      }
      // Scale of the caller's g and g_prev relative to Lanczos normalization.
      const double c_cur = switching_ ? norms_[j] * signs_[j] / std::sqrt(gv_[j]) : 1.0;
      double coef_prev = 0.0;
      if (!opens_block) {
        const double c_prev =
            switching_ ? norms_[j - 1] * signs_[j - 1] / std::sqrt(gv_[j - 1]) : 1.0;
        coef_prev = -(norms_[j] / norms_[j - 1]) * c_prev;
      }
      Action a;
      a.kind = ActionKind::lanczos_grad;
      a.coef_g = -(delta / norms_[j]) * c_cur;
      a.coef_gprev = coef_prev;
      a.shift_scale = c_cur;
      switching_ = false;
      block_start_ = false;
      return emit(a, Await::lanczos_grad);
    }

    case Await::lanczos_grad: {
      if (reply < 0.0) throw PreconditionerError("preconditioner is not positive definite");
      return after_extension(std::sqrt(reply));
    }

    case Await::new_krylov: {
      if (!(reply > 0.0)) {
        throw std::invalid_argument("NEW_KRYLOV: start vector has zero M-norm");
      }
      ++st_.restarts;
      st_.invariant_subspace = false;
      st_.phase = Phase::lanczos;
      work_phase_ = Phase::lanczos;
      norms_.back() = std::sqrt(reply);
      block_start_ = true;
      switching_ = false;
      return begin_iteration();
    }

    case Await::obj_value: {
      const double q_h = objective(st_.t, st_.gamma0, st_.h);
      if (ill_conditioning_gate(q_h, reply) == GateDecision::proceed)
        return finish_done(base_outcome_);
      auto shift = convexify(st_.t);
      const TriMatrix convex = st_.t.plus_diagonal(shift);
      const SubproblemSolution sol = solve(convex, st_.gamma0, st_.radius);
      st_.h = sol.h;
      st_.lambda = sol.lambda;
      st_.status = sol.status;
      st_.convexify_shift = std::move(shift);
      Action a;
      a.kind = ActionKind::retransform;
      a.h = st_.h;
      return emit(a, Await::final_retransform);
    }

    default:
      throw ProtocolError("step(reply): no reply expected in this state");
  }
}

Action KrylovSolver::begin_iteration() {
  const std::size_t j = st_.iteration;
  Action a;
  if (st_.phase == Phase::cg) {
    a.kind = ActionKind::cg_dir;
    a.beta = j == 0 ? 0.0 : st_.beta[j - 1];
    a.store_basis = signs_[j] / std::sqrt(gv_[j]);
    return emit(a, Await::cg_dir);
  }
  a.kind = ActionKind::hess_prod;
  if (switching_) {
    // Row j was stored as a CG direction already; it is the same vector.
    a.p_from_v = signs_[j] / std::sqrt(gv_[j]);
  } else {
    a.p_from_v = 1.0 / norms_[j];
    a.store_basis = a.p_from_v;
  }
  return emit(a, Await::lanczos_hess);
}

Action KrylovSolver::after_extension(double next_norm) {
  ++st_.iteration;
  norms_.push_back(next_norm);
  coupling_max_ = std::max(coupling_max_, next_norm);
  if (st_.phase == Phase::lanczos) {
    // CG bookkeeping is only read for CG rows; keep the arrays aligned.
    signs_.resize(norms_.size(), 1.0);
    gv_.resize(norms_.size(), 0.0);
  }
  solve_tridiagonal();
  return evaluate();
}

Action KrylovSolver::evaluate() {
  const double next_norm = norms_.back();
  st_.invariant_subspace = next_norm <= opts_.invariant_tol * rho_scale();
  const double gamma_next = st_.invariant_subspace ? 0.0 : next_norm;
  st_.residual = gamma_next * std::abs(st_.h.back());
  st_.tolerance = st_.lambda == 0.0 ? interior_tolerance() : boundary_tolerance();

  if (st_.invariant_subspace) return finish(Outcome::hard_case_invariant_subspace);
  if (st_.residual <= st_.tolerance && restart_block_settled()) {
    return finish(st_.lambda == 0.0 ? Outcome::interior_converged : Outcome::boundary_converged);
  }
  if (st_.iteration >= max_iter()) return finish(Outcome::max_iter);
  return begin_iteration();
}

void KrylovSolver::solve_tridiagonal() {
  const SubproblemSolution sol = solve(st_.t, st_.gamma0, st_.radius, &warm_);
  warm_ = warm_start_from(sol, st_.t.size(), warm_.prev_theta_min);
  st_.h = sol.h;
  st_.lambda = sol.lambda;
  st_.status = sol.status;
}

Action KrylovSolver::finish(Outcome o) {
  base_outcome_ = o;
  st_.phase = Phase::done;
  gate_pending_ = o == Outcome::boundary_converged && opts_.ill_conditioning_gate &&
                  ill_conditioning_suspected(st_.lambda, st_.rho_min, st_.rho_max);
  Action a;
  a.kind = ActionKind::retransform;
  a.h = st_.h;
  return emit(a, Await::retransform);
}

Action KrylovSolver::finish_done(Outcome o) {
  st_.outcome = o;
  st_.phase = Phase::done;
  Action a;
  a.kind = ActionKind::done;
  a.outcome = o;
  return emit(a, Await::done);
}

Action KrylovSolver::fail_numerically() { return finish_done(Outcome::numerical_failure); }

Action KrylovSolver::reenter_radius(double new_radius) {
  if (await_ != Await::done) throw ProtocolError("reenter_radius: solver has not finished");
  if (st_.outcome == Outcome::numerical_failure || st_.outcome == Outcome::none)
    throw ProtocolError("reenter_radius: no usable Krylov data");
  if (!(new_radius > 0.0) || !finite(new_radius))
    throw std::invalid_argument("reenter_radius: radius must be positive");
  st_.radius = new_radius;
  st_.convexify_shift.reset();
  st_.outcome = Outcome::none;
  if (st_.t.empty()) return finish(Outcome::interior_converged);
  st_.phase = work_phase_;
  const SubproblemSolution sol = resolve_radius(st_.t, st_.gamma0, new_radius, warm_);
  warm_ = warm_start_from(sol, st_.t.size(), warm_.prev_hat_theta_min);
  st_.h = sol.h;
  st_.lambda = sol.lambda;
  st_.status = sol.status;
  return evaluate();
}

Action KrylovSolver::request_new_krylov() {
  if (await_ != Await::done || !st_.invariant_subspace)
    throw ProtocolError("request_new_krylov: needs a finished solve with an invariant subspace");
  st_.outcome = Outcome::none;
  Action a;
  a.kind = ActionKind::new_krylov;
  return emit(a, Await::new_krylov);
}

void KrylovSolver::update_rayleigh(double rho) {
  if (!has_rayleigh_) {
    st_.rho_min = st_.rho_max = rho;
    has_rayleigh_ = true;
  } else {
    st_.rho_min = std::min(st_.rho_min, rho);
    st_.rho_max = std::max(st_.rho_max, rho);
  }
}

double KrylovSolver::rho_scale() const {
  // Rayleigh quotients alone can sit far below ||H|| when the directions
  // mix curvature of both signs.
  return std::max({std::abs(st_.rho_min), std::abs(st_.rho_max), coupling_max_});
}

std::size_t KrylovSolver::max_iter() const {
  if (cfg_.max_iter) return *cfg_.max_iter;
  return opts_.dimension ? 10 * *opts_.dimension : 1000;
}

double KrylovSolver::interior_tolerance() const {
  const double rel = cfg_.tol_rel_i.value_or(std::min(0.5, st_.gamma0));
  return std::max(cfg_.tol_abs_i, rel * st_.gamma0);
}

double KrylovSolver::boundary_tolerance() const {
  const double rel =
      cfg_.tol_rel_b.value_or(std::max(1e-6, std::min(0.5, std::sqrt(st_.gamma0))));
  return std::max(cfg_.tol_abs_b, rel * st_.gamma0);
}

bool KrylovSolver::restart_block_settled() const {
  // A restart block must resolve its leftmost Ritz pair before its
  // contribution to the global solution can be trusted.
  if (st_.t.num_blocks() < 2) return true;
  try {
    const TriMatrix last = st_.t.block(st_.t.num_blocks() - 1);
    const double theta = smallest_eig(last);
    const auto u = inverse_iteration(last, theta);
    return norms_.back() * std::abs(u.back()) <= kSqrtEps * rho_scale();
  } catch (const std::runtime_error&) {
    return false;
  }
}

}  // namespace gltr
