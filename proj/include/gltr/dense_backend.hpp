#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gltr/krylov.hpp"

namespace gltr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using LinearOperator = std::function<Vec(const Vec&)>;

/// min 1/2 <x,Hx> + <g,x>  s.t. ||x||_M <= radius, with H, M and M^{-1}
/// given as operators. An empty metric means M = I.
struct DenseProblem {
  LinearOperator hess;
  LinearOperator metric;      // x -> M x
  LinearOperator metric_inv;  // x -> M^{-1} x
  Vec g;
  double radius = 1.0;

  std::size_t dim() const { return static_cast<std::size_t>(g.size()); }
  Vec apply_metric(const Vec& x) const { return metric ? metric(x) : x; }
  Vec apply_metric_inv(const Vec& x) const { return metric_inv ? metric_inv(x) : x; }

  static DenseProblem from_matrices(const Mat& h, const Vec& g, double radius);
  /// m must be symmetric positive definite; throws std::invalid_argument otherwise.
  static DenseProblem from_matrices(const Mat& h, const Mat& m, const Vec& g, double radius);
};

struct SolveOptions {
  DriverOptions driver;
  /// Open new Krylov blocks when a subspace is exhausted. With a random
  /// start, one restart reaches every distinct eigenvalue left over.
  bool explore_invariant_subspaces = true;
  std::size_t max_restarts = 1;
  std::uint64_t seed = 0x5eedULL;
  /// Apply H once more to x for the reported objective and KKT residual.
  /// Off: both come from the tridiagonal solution.
  bool evaluate_true_objective = true;
};

struct SolveReport {
  Vec x;
  double lambda = 0.0;
  double objective = 0.0;        // 1/2 <x,Hx> + <g,x> evaluated on x
  double model_objective = 0.0;  // same value from the tridiagonal coordinates
  double kkt_residual = 0.0;     // ||(H + lambda M) x + g||_{M^-1}
  Outcome outcome = Outcome::none;
  SolutionStatus status = SolutionStatus::interior;
  std::size_t hess_products = 0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
};

class SubspaceFull : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random unit vector (in the M-norm) M-orthogonal to `directions`, by two
/// modified Gram-Schmidt sweeps. Throws SubspaceFull when nothing is left.
Vec mgs_restart(const std::vector<Vec>& directions, const DenseProblem& problem, std::uint64_t seed);

/// Serves the reverse-communication driver with in-memory vectors and
/// keeps them alive between calls so the radius can be changed cheaply.
class GltrSession {
 public:
  GltrSession(DenseProblem problem, TerminationConfig cfg = {}, SolveOptions opts = {});

  SolveReport solve();
  /// Hot start on the Krylov data of the last solve. Hessian products made
  /// here are added to the running count.
  SolveReport resolve(double new_radius);

  const KrylovSolver& driver() const { return driver_; }
  const std::vector<Vec>& directions() const { return basis_; }
  /// Current dual vector g of the Krylov process (Lanczos or CG scaling).
  const Vec& krylov_gradient() const { return g_; }

 private:
  SolveReport run(Action a);
  SolveReport report() const;
  double serve(const Action& a);

  DenseProblem prob_;
  TerminationConfig cfg_;
  SolveOptions opts_;
  KrylovSolver driver_;
  Vec g_, g_prev_, v_, p_, hp_, x_;
  std::vector<Vec> basis_;
  std::size_t restarts_used_ = 0;
};

SolveReport solve_gltr(const DenseProblem& problem, const TerminationConfig& cfg = {},
                       const SolveOptions& opts = {});

struct StReport {
  Vec x;
  double objective = 0.0;  // tracked along the iteration, no extra product
  std::size_t hess_products = 0;
  std::size_t iterations = 0;
  bool hit_boundary = false;
  bool negative_curvature = false;
};

/// Truncated preconditioned CG: stop at the boundary, at nonpositive
/// curvature, or when ||g||_{M^-1} <= max{tol_abs_i, tol_rel_i ||g0||_{M^-1}}.
StReport solve_st(const DenseProblem& problem, const TerminationConfig& cfg = {});

}  // namespace gltr
