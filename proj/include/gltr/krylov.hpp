#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gltr/tri_subproblem.hpp"
#include "gltr/tridiag.hpp"

namespace gltr {

/// Reverse-communication solver for
///   min 1/2 <x, H x> + <g, x>   subject to ||x||_M <= radius.
///
/// The caller owns the vectors g, g_prev, v, p, Hp, the stored directions
/// P and the output x; the driver only sees the scalars it asks for.
/// Each Action says what to do with those vectors. Integer values of
/// ActionKind and Outcome are stable and form the wire contract.
///
///   INIT_PRECOND  v <- M^{-1} g.                         reply <g, v>
///   CG_DIR        p <- -v + beta p (p <- -v when beta == 0).  no reply
///   HESS_PROD     if p_from_v: p <- p_from_v * v.  Hp <- H p.  reply <p, Hp>
///   CG_UPDATE     g_prev <- g; g <- g + alpha Hp; v <- M^{-1} g.  reply <g, v>
///   LANCZOS_GRAD  w <- Hp + coef_g g + coef_gprev g_prev;
///                 g_prev <- shift_scale g; g <- w; v <- M^{-1} g.  reply <g, v>
///   RETRANSFORM   x <- sum_j h[j] P[j].                   no reply
///   NEW_KRYLOV    put a start vector in g with <g, P[j]> = 0 for all j,
///                 v <- M^{-1} g, g_prev <- 0.             reply <g, v>
///   OBJ_VALUE     reply 1/2 <x, H x> + <g0, x> for the current x.
///   DONE          finished; see outcome.
///
/// Whenever store_basis is set, append store_basis * v to P before doing
/// anything else for that action.
enum class ActionKind : int {
  init_precond = 1,
  hess_prod = 2,
  cg_update = 3,
  cg_dir = 4,
  lanczos_grad = 5,
  retransform = 6,
  new_krylov = 7,
  obj_value = 8,
  done = 9,
};

enum class Outcome : int {
  none = 0,
  interior_converged = 1,
  boundary_converged = 2,
  max_iter = 3,
  hard_case_invariant_subspace = 4,
  convexified_resolve = 5,
  numerical_failure = 6,
};

const char* to_string(ActionKind k);
const char* to_string(Outcome o);

struct Action {
  ActionKind kind = ActionKind::done;
  std::optional<double> store_basis;
  std::optional<double> p_from_v;
  double alpha = 0.0;
  double beta = 0.0;
  double coef_g = 0.0;
  double coef_gprev = 0.0;
  double shift_scale = 1.0;
  std::vector<double> h;
  Outcome outcome = Outcome::none;

  bool expects_reply() const;
};

/// Absolute and relative stopping tolerances on ||grad L||_{M^-1}.
/// Unset relative tolerances are derived from gamma0 = ||g||_{M^-1}:
/// interior min{0.5, gamma0}, boundary max{1e-6, min{0.5, sqrt(gamma0)}}.
struct TerminationConfig {
  double tol_abs_i = 0.0;
  double tol_abs_b = 0.0;
  std::optional<double> tol_rel_i;
  std::optional<double> tol_rel_b;
  /// Curvature crossover: leave CG when |<p,Hp>| <= tol_curvature * rho * <p,Mp>,
  /// rho the largest |Rayleigh quotient| or Lanczos coupling seen so far.
  double tol_curvature = 1.4901161193847656e-08;
  /// Unset: 10 n when the dimension is known, else 1000.
  std::optional<std::size_t> max_iter;
};

enum class KrylovMode { cg_first, lanczos_only };

struct DriverOptions {
  KrylovMode mode = KrylovMode::cg_first;
  std::optional<std::size_t> dimension;
  bool ill_conditioning_gate = true;
  /// Next Lanczos norm <= invariant_tol * scale counts as an exhausted
  /// subspace; scale is the largest |Rayleigh quotient| or coupling seen.
  double invariant_tol = 1e-8;
};

enum class Phase { cg, lanczos, done };

class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// <g, M^{-1} g> < 0 was reported.
class PreconditionerError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct KrylovState {
  Phase phase = Phase::cg;
  std::size_t iteration = 0;  // rows of T
  TriMatrix t;
  double gamma0 = 0.0;
  double radius = 0.0;
  std::vector<double> alpha;  // CG step lengths
  std::vector<double> beta;   // CG direction updates
  std::vector<double> s_norm; // ||s^i||_M of the CG iterates
  double rho_min = 0.0;       // extreme Rayleigh quotients seen
  double rho_max = 0.0;
  double lambda = 0.0;
  std::vector<double> h;
  SolutionStatus status = SolutionStatus::interior;
  double residual = 0.0;      // gamma_{i+1} |h_i|
  double tolerance = 0.0;     // what residual was compared with
  bool invariant_subspace = false;
  std::size_t hess_products = 0;
  std::size_t restarts = 0;
  Outcome outcome = Outcome::none;
  std::optional<std::vector<double>> convexify_shift;
};

/// Gate decision after a boundary solve that looks numerically suspect.
enum class GateDecision { proceed, convexify_resolve };

/// Suspect when lambda >= 1e-2 max{1, rho_max} and |rho_min| <= 1e-8 rho_max.
bool ill_conditioning_suspected(double lambda, double rho_min, double rho_max);

/// q_x is the objective at the retransformed x, q_h the tridiagonal one.
GateDecision ill_conditioning_gate(double q_h, double q_x);

class KrylovSolver {
 public:
  KrylovSolver() = default;

  /// Start a solve. Returns INIT_PRECOND.
  Action init(const TerminationConfig& cfg, double radius, const DriverOptions& opts = {});

  /// Advance with the reply to the pending action.
  Action step(double reply);
  /// Advance after an action that takes no reply.
  Action step();

  /// Hot start after DONE with a new radius on the same Krylov space.
  Action reenter_radius(double new_radius);

  /// After DONE with an exhausted invariant subspace: ask for a new start vector.
  Action request_new_krylov();

  const KrylovState& state() const { return st_; }
  const Action& pending() const { return pending_; }

 private:
  enum class Await {
    nothing,
    init_precond,
    cg_dir,
    cg_hess,
    cg_update,
    lanczos_hess,
    lanczos_grad,
    new_krylov,
    retransform,
    obj_value,
    final_retransform,
    done,
  };

  Action emit(Action a, Await next);
  Action begin_iteration();
  Action after_extension(double next_norm);
  Action evaluate();
  Action finish(Outcome o);
  Action finish_done(Outcome o);
  Action fail_numerically();
  void update_rayleigh(double rho);
  void solve_tridiagonal();
  double rho_scale() const;
  std::size_t max_iter() const;
  double interior_tolerance() const;
  double boundary_tolerance() const;
  bool restart_block_settled() const;

  TerminationConfig cfg_;
  DriverOptions opts_;
  KrylovState st_;
  Action pending_;
  Await await_ = Await::nothing;

  std::vector<double> gv_;     // <g_j, v_j> of CG rows
  std::vector<double> norms_;  // ||g_j||_{M^-1} in Lanczos scaling, per row (+1 ahead)
  std::vector<double> signs_;  // sign of the CG-to-Lanczos map per row (+1 ahead)
  double p_norm2_ = 0.0;       // ||p||_M^2 of the current CG direction
  double s_dot_p_ = 0.0;       // <s, M p> for the CG iterate norm
  double coupling_max_ = 0.0;  // largest Lanczos coupling so far
  bool block_start_ = false;   // next Lanczos row opens a new block
  bool switching_ = false;     // current Lanczos row converts CG quantities
  bool has_rayleigh_ = false;
  bool gate_pending_ = false;  // ask for OBJ_VALUE after RETRANSFORM
  std::size_t block_begin_ = 0;
  Phase work_phase_ = Phase::cg;  // phase to resume after a hot start
  WarmStart warm_;
  Outcome base_outcome_ = Outcome::none;
};

}  // namespace gltr
