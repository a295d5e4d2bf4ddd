#include "gltr/dense_backend.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gltr {

DenseProblem DenseProblem::from_matrices(const Mat& h, const Vec& g, double radius) {
  if (h.rows() != h.cols() || h.rows() != g.size())
    throw std::invalid_argument("DenseProblem: dimension mismatch");
  DenseProblem p;
  p.hess = [h](const Vec& x) -> Vec { return h * x; };
  p.g = g;
  p.radius = radius;
  return p;
}

DenseProblem DenseProblem::from_matrices(const Mat& h, const Mat& m, const Vec& g, double radius) {
  DenseProblem p = from_matrices(h, g, radius);
  if (m.rows() != h.rows() || m.cols() != h.cols())
    throw std::invalid_argument("DenseProblem: metric dimension mismatch");
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("DenseProblem: metric is not positive definite");
  p.metric = [m](const Vec& x) -> Vec { return m * x; };
  p.metric_inv = [llt](const Vec& x) -> Vec { return llt.solve(x); };
  return p;
}

Vec mgs_restart(const std::vector<Vec>& directions, const DenseProblem& problem, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(problem.dim());
  if (directions.size() >= problem.dim()) throw SubspaceFull("mgs_restart: directions span the space");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  const double start = std::sqrt(v.dot(problem.apply_metric(v)));
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (const Vec& p : directions) v -= p.dot(problem.apply_metric(v)) * p;
  }
  const double left = std::sqrt(std::max(0.0, v.dot(problem.apply_metric(v))));
  if (!(left > 1e-10 * start)) throw SubspaceFull("mgs_restart: no direction left after projection");
  return v / left;
}

GltrSession::GltrSession(DenseProblem problem, TerminationConfig cfg, SolveOptions opts)
    : prob_(std::move(problem)), cfg_(cfg), opts_(opts) {
  if (!prob_.hess) throw std::invalid_argument("GltrSession: missing Hessian operator");
  if (!opts_.driver.dimension) opts_.driver.dimension = prob_.dim();
}

SolveReport GltrSession::solve() {
  const auto n = static_cast<Eigen::Index>(prob_.dim());
  g_ = prob_.g;
  g_prev_ = Vec::Zero(n);
  v_ = Vec::Zero(n);
  p_ = Vec::Zero(n);
  hp_ = Vec::Zero(n);
  x_ = Vec::Zero(n);
  basis_.clear();
  restarts_used_ = 0;
  return run(driver_.init(cfg_, prob_.radius, opts_.driver));
}

SolveReport GltrSession::resolve(double new_radius) {
  prob_.radius = new_radius;
  return run(driver_.reenter_radius(new_radius));
}

double GltrSession::serve(const Action& a) {
  if (a.store_basis) basis_.push_back(*a.store_basis * v_);
  switch (a.kind) {
    case ActionKind::init_precond:
      v_ = prob_.apply_metric_inv(g_);
      return g_.dot(v_);
    case ActionKind::cg_dir:
      if (a.beta == 0.0) {
        p_ = -v_;
      } else {
        p_ = -v_ + a.beta * p_;
      }
      return 0.0;
    case ActionKind::hess_prod:
      if (a.p_from_v) p_ = *a.p_from_v * v_;
      hp_ = prob_.hess(p_);
      return p_.dot(hp_);
    case ActionKind::cg_update:
      g_prev_ = g_;
      g_ += a.alpha * hp_;
      v_ = prob_.apply_metric_inv(g_);
      return g_.dot(v_);
    case ActionKind::lanczos_grad: {
      Vec w = hp_ + a.coef_g * g_ + a.coef_gprev * g_prev_;
      g_prev_ = a.shift_scale * g_;
      g_ = std::move(w);
      v_ = prob_.apply_metric_inv(g_);
      return g_.dot(v_);
    }
    case ActionKind::retransform:
      if (a.h.size() > basis_.size()) throw std::logic_error("RETRANSFORM: more coordinates than directions");
      x_.setZero();
      for (std::size_t j = 0; j < a.h.size(); ++j) x_ += a.h[j] * basis_[j];
      return 0.0;
    case ActionKind::obj_value:
      return 0.5 * x_.dot(prob_.hess(x_)) + prob_.g.dot(x_);
    case ActionKind::new_krylov:
    case ActionKind::done:
      break;
  }
  throw std::logic_error("GltrSession: unexpected action");
}

SolveReport GltrSession::run(Action a) {
  for (;;) {
    if (a.kind == ActionKind::done) {
      const bool exhausted = a.outcome == Outcome::hard_case_invariant_subspace;
      if (!exhausted || !opts_.explore_invariant_subspaces || restarts_used_ >= opts_.max_restarts)
        break;
      Vec start;
      try {
        start = mgs_restart(basis_, prob_, opts_.seed + restarts_used_);
      } catch (const SubspaceFull&) {
        break;
      }
      ++restarts_used_;
      a = driver_.request_new_krylov();
      v_ = start;
      g_ = prob_.apply_metric(start);
      g_prev_.setZero();
      a = driver_.step(g_.dot(v_));
      continue;
    }
    const double reply = serve(a);
    a = a.expects_reply() ? driver_.step(reply) : driver_.step();
  }
  return report();
}

SolveReport GltrSession::report() const {
  const KrylovState& st = driver_.state();
  SolveReport r;
  r.x = x_;
  r.lambda = st.lambda;
  if (!st.h.empty()) {
    r.model_objective = st.convexify_shift
                            ? objective(st.t.plus_diagonal(*st.convexify_shift), st.gamma0, st.h)
                            : objective(st.t, st.gamma0, st.h);
  }
  if (opts_.evaluate_true_objective) {
    const Vec hx = prob_.hess(x_);
    r.objective = 0.5 * x_.dot(hx) + prob_.g.dot(x_);
    const Vec res = hx + st.lambda * prob_.apply_metric(x_) + prob_.g;
    r.kkt_residual = std::sqrt(std::max(0.0, res.dot(prob_.apply_metric_inv(res))));
  } else {
    r.objective = r.model_objective;
    r.kkt_residual = st.residual;
  }
  r.outcome = st.outcome;
  r.status = st.status;
  r.hess_products = st.hess_products;
  r.iterations = st.iteration;
  r.restarts = st.restarts;
  return r;
}

SolveReport solve_gltr(const DenseProblem& problem, const TerminationConfig& cfg,
                       const SolveOptions& opts) {
  GltrSession session(problem, cfg, opts);
  return session.solve();
}

StReport solve_st(const DenseProblem& problem, const TerminationConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(problem.dim());
  StReport out;
  out.x = Vec::Zero(n);
  Vec g = problem.g;
  Vec v = problem.apply_metric_inv(g);
  double gv = g.dot(v);
  if (gv < 0.0) throw PreconditionerError("solve_st: preconditioner is not positive definite");
  const double gamma0 = std::sqrt(gv);
  const double tol =
      std::max(cfg.tol_abs_i, cfg.tol_rel_i.value_or(std::min(0.5, gamma0)) * gamma0);
  const std::size_t max_iter = cfg.max_iter.value_or(10 * problem.dim());
  const double r2 = problem.radius * problem.radius;

  Vec& s = out.x;
  Vec p = -v;
  double s_norm2 = 0.0;
  double s_dot_p = 0.0;
  double p_norm2 = gv;
  auto to_boundary = [&]() {
    const double disc = s_dot_p * s_dot_p + p_norm2 * (r2 - s_norm2);
    return (-s_dot_p + std::sqrt(std::max(0.0, disc))) / p_norm2;
  };

  while (gamma0 > tol && std::sqrt(gv) > tol && out.iterations < max_iter) {
    ++out.iterations;
    const Vec hp = problem.hess(p);
    ++out.hess_products;
    const double kappa = p.dot(hp);
    if (kappa <= 0.0) {
      const double tau = to_boundary();
      s += tau * p;
      out.objective += -tau * gv + 0.5 * tau * tau * kappa;
      out.negative_curvature = true;
      out.hit_boundary = true;
      break;
    }
    const double alpha = gv / kappa;
    if (s_norm2 + 2.0 * alpha * s_dot_p + alpha * alpha * p_norm2 >= r2) {
      const double tau = to_boundary();
      s += tau * p;
      out.objective += -tau * gv + 0.5 * tau * tau * kappa;
      out.hit_boundary = true;
      break;
    }
    s += alpha * p;
    out.objective -= 0.5 * alpha * gv;
    s_norm2 += 2.0 * alpha * s_dot_p + alpha * alpha * p_norm2;
    g += alpha * hp;
    v = problem.apply_metric_inv(g);
    const double gv_next = g.dot(v);
    const double beta = gv_next / gv;
    s_dot_p = beta * (s_dot_p + alpha * p_norm2);
    p_norm2 = gv_next + beta * beta * p_norm2;
    p = -v + beta * p;
    gv = gv_next;
  }
  return out;
}

}  // namespace gltr
