#include "gltr/bench/outer_loop.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>

#include "gltr/oracle.hpp"

namespace gltr::bench {

const char* to_string(SubSolver s) {
  switch (s) {
    case SubSolver::gltr: return "gltr";
    case SubSolver::st: return "st";
    case SubSolver::oracle: return "oracle";
  }
  return "?";
}

SubSolver parse_sub_solver(const std::string& name) {
  if (name == "gltr") return SubSolver::gltr;
  if (name == "st") return SubSolver::st;
  if (name == "oracle") return SubSolver::oracle;
  throw std::invalid_argument("unknown solver: " + name);
}

void OuterConfig::validate() const {
  if (!(0.0 < rho_acc && rho_acc <= rho_inc && rho_inc < 1.0))
    throw std::invalid_argument("OuterConfig: need 0 < rho_acc <= rho_inc < 1");
  if (!(gamma_dec < 1.0 && 1.0 < gamma_inc) || !(gamma_dec > 0.0))
    throw std::invalid_argument("OuterConfig: need 0 < gamma_dec < 1 < gamma_inc");
  if (!(tol_abs >= 0.0)) throw std::invalid_argument("OuterConfig: tol_abs must be nonnegative");
}

namespace {

struct Step {
  Vec d;
  double q = 0.0;
};

/// One subproblem per iterate; radius changes on the same iterate go
/// through resolve().
class StepFinder {
 public:
  StepFinder(const NlpProblem& p, SubSolver solver) : p_(p), solver_(solver) {}

  void reset(const Vec& x, const Vec& g) {
    sub_ = DenseProblem{};
    sub_.hess = [this, x](const Vec& v) { return p_.hess_vec(x, v); };
    sub_.metric = p_.metric;
    sub_.metric_inv = p_.metric_inv;
    sub_.g = g;
    session_.reset();
    dense_h_.reset();
    x_ = x;
  }

  Step solve(double radius) {
    sub_.radius = radius;
    switch (solver_) {
      case SubSolver::gltr: {
        SolveReport r;
        if (!session_) {
          SolveOptions opts;
          opts.evaluate_true_objective = false;
          session_ = std::make_unique<GltrSession>(sub_, TerminationConfig{}, opts);
          seen_ = 0;
          r = session_->solve();
        } else {
          r = session_->resolve(radius);
        }
        if (r.outcome == Outcome::numerical_failure) throw std::runtime_error("subproblem: numerical failure");
        const std::size_t total = session_->driver().state().hess_products;
        hv += total - seen_;
        seen_ = total;
        return {r.x, r.model_objective};
      }
      case SubSolver::st: {
        const StReport r = solve_st(sub_);
        hv += r.hess_products;
        return {r.x, r.objective};
      }
      case SubSolver::oracle: {
        if (!dense_h_) {
          dense_h_ = p_.dense_hessian(x_);
          dense_m_ = p_.dense_metric();
          hv += p_.dim();
        }
        const auto sol = oracle::solve(*dense_h_, dense_m_, sub_.g, radius);
        return {sol.x, sol.objective};
      }
    }
    throw std::logic_error("unreachable");
  }

  const DenseProblem& subproblem() const { return sub_; }

  std::size_t hv = 0;

 private:
  const NlpProblem& p_;
  SubSolver solver_;
  DenseProblem sub_;
  std::unique_ptr<GltrSession> session_;
  std::size_t seen_ = 0;
  std::optional<Mat> dense_h_;
  Mat dense_m_;
  Vec x_;
};

double m_norm(const NlpProblem& p, const Vec& v) { return std::sqrt(std::max(0.0, v.dot(p.apply_metric(v)))); }
double dual_norm(const NlpProblem& p, const Vec& g) { return std::sqrt(std::max(0.0, g.dot(p.apply_metric_inv(g)))); }

}  // namespace

OuterResult outer_loop(const NlpProblem& p, SubSolver solver, const OuterConfig& cfg,
                       const SubproblemObserver& observer) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  OuterResult res;
  res.record.problem = p.name;
  res.record.solver = to_string(solver);

  double radius = cfg.delta0 > 0.0 ? cfg.delta0
                  : p.delta0       ? *p.delta0
                                   : 1.0 / std::sqrt(static_cast<double>(p.dim()));
  Vec x = p.x0;
  double f = p.f(x);
  Vec g = p.grad(x);
  StepFinder finder(p, solver);
  bool fresh_iterate = true;
  std::string outcome = "iteration-limit";

  std::size_t k = 0;
  try {
    for (; k < cfg.max_outer; ++k) {
      const double gnorm = dual_norm(p, g);
      if (!std::isfinite(f) || !std::isfinite(gnorm)) {
        outcome = "numerical-failure";
        break;
      }
      if (gnorm <= cfg.tol_abs) {
        outcome = "converged";
        break;
      }
      if (fresh_iterate) finder.reset(x, g);
      const std::size_t hv_before = finder.hv;
      const Step step = finder.solve(radius);
      if (observer) observer(k, finder.subproblem(), step.d, step.q);

      IterationLog log;
      log.k = k;
      log.f = f;
      log.grad_norm = gnorm;
      log.radius = radius;
      log.step_norm = m_norm(p, step.d);
      log.model_change = step.q;
      log.hv = finder.hv - hv_before;
      if (!(step.q < 0.0)) {
        res.trace.push_back(log);
        outcome = "ascent-failure";
        break;
      }
      const Vec trial = x + step.d;
      const double f_trial = p.f(trial);
      log.rho = std::isfinite(f_trial) ? (f_trial - f) / step.q : -std::numeric_limits<double>::infinity();
      log.accepted = log.rho >= cfg.rho_acc;
      res.trace.push_back(log);

      if (log.accepted) {
        x = trial;
        f = f_trial;
        g = p.grad(x);
        fresh_iterate = true;
      } else {
        fresh_iterate = false;
      }
      if (log.rho >= cfg.rho_inc) {
        radius *= cfg.gamma_inc;
      } else if (log.rho < cfg.rho_acc) {
        radius *= cfg.gamma_dec;
      }
    }
  } catch (const std::exception&) {
    outcome = "subproblem-failure";
  }

  res.x = x;
  res.f = f;
  res.record.grad_norm = dual_norm(p, g);
  res.record.hv_count = finder.hv;
  res.record.outer_iters = k;
  res.record.outcome = outcome;
  res.record.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace gltr::bench
