#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gltr/tridiag.hpp"

namespace gltr {

/// Trust-region problem in Krylov coordinates:
///   min 1/2 h^T T h + gamma0 * h_0   subject to ||h|| <= radius.

enum class SolutionStatus { interior, boundary, hard_case, near_hard_case };

const char* to_string(SolutionStatus s);

struct SubproblemSolution {
  std::vector<double> h;
  double lambda = 0.0;
  double objective = 0.0;
  SolutionStatus status = SolutionStatus::interior;
  int newton_iterations = 0;
  /// Smallest eigenvalue of T, when it had to be computed.
  std::optional<double> theta_min;
  /// Factor of T + lambda*I at the returned lambda (interior and easy case).
  std::optional<LdlFactor> factor;
};

/// Information carried from one tridiagonal solve to the next.
struct WarmStart {
  double prev_lambda = 0.0;
  /// Smallest eigenvalue of the T of the previous solve.
  std::optional<double> prev_theta_min;
  std::optional<double> prev_hat_theta_min;
  /// Dimension of the T of the previous solve. When the new T has one more
  /// row, prev_theta_min is the pole of its last-pivot function; when it has
  /// the same size, prev_theta_min is its smallest eigenvalue.
  std::size_t prev_dim = 0;
  /// Factor of T + prev_lambda*I from the previous solve.
  std::optional<LdlFactor> factor_cache;
};

struct NewtonStart {
  double lambda = 0.0;
  std::optional<double> theta_min;
};

double objective(const TriMatrix& t, double gamma0, std::span<const double> h);

/// ||(T + lambda*I) h + gamma0 e_1||.
double stationarity_residual(const TriMatrix& t, double gamma0, std::span<const double> h,
                             double lambda);

SubproblemSolution solve(const TriMatrix& t, double gamma0, double radius,
                         const WarmStart* warm = nullptr);

/// Newton on 1/||h(lambda)|| - 1/radius from a lambda0 with T + lambda0*I
/// positive definite and ||h(lambda0)|| >= radius. Stops at
/// | ||h|| - radius | <= 1e-10 radius or after 100 steps.
SubproblemSolution solve_easy(const TriMatrix& t, double gamma0, double radius, double lambda0,
                              std::vector<double>* lambda_trace = nullptr);

NewtonStart newton_init(const TriMatrix& t, const WarmStart& warm, double gamma0, double radius);

/// T with several irreducible blocks; gamma0 e_1 only touches the first.
/// Status is hard_case for every boundary solution whose leftmost
/// eigenvalue sits outside the first block.
SubproblemSolution solve_blocks(const TriMatrix& t, double gamma0, double radius);

/// No admissible lambda reaches the boundary in floating point: take the
/// pseudo-solution at -theta_min and fill up with the eigenvector.
SubproblemSolution near_hard(const TriMatrix& t, double gamma0, double radius, double theta_min);

/// Diagonal shift D making T + D positive definite with all pivots >= eps.
std::vector<double> convexify(const TriMatrix& t, double eps = 1e-12, double sigma = 10.0);

/// Re-solve for a new radius on an unchanged T.
SubproblemSolution resolve_radius(const TriMatrix& t, double gamma0, double new_radius,
                                  const WarmStart& warm);

WarmStart warm_start_from(const SubproblemSolution& s, std::size_t dim,
                          const std::optional<double>& prev_hat_theta_min = std::nullopt);

/// h = (T + lambda I)^{-1} (-gamma0 e_1).
std::vector<double> trace_shifted_min(const TriMatrix& t, double gamma0, double lambda);

struct BandSolution {
  double lambda = 0.0;
  std::vector<double> h;
  double ratio = 0.0;  // lambda / ||h||
  int iterations = 0;
};

/// Find lambda >= max(0, -theta_min) with lambda/||h(lambda)|| in [lower, upper].
BandSolution trace_band(const TriMatrix& t, double gamma0, double lower, double upper);

}  // namespace gltr
