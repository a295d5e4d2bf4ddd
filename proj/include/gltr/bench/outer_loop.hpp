#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gltr/bench/problem.hpp"
#include "gltr/bench/record.hpp"
#include "gltr/dense_backend.hpp"

namespace gltr::bench {

enum class SubSolver { gltr, st, oracle };

const char* to_string(SubSolver s);
/// Throws std::invalid_argument for anything but gltr, st, oracle.
SubSolver parse_sub_solver(const std::string& name);

struct OuterConfig {
  double delta0 = 0.0;  // <= 0: problem override, else 1/sqrt(n)
  double tol_abs = 1e-7;
  double rho_acc = 1e-2;
  double rho_inc = 0.95;
  double gamma_inc = 2.0;
  double gamma_dec = 0.5;
  std::size_t max_outer = 5000;

  /// Throws std::invalid_argument unless 0 < rho_acc <= rho_inc < 1,
  /// gamma_dec < 1 < gamma_inc, tol_abs >= 0.
  void validate() const;
};

struct IterationLog {
  std::size_t k = 0;
  double f = 0.0;
  double grad_norm = 0.0;  // ||g||_{M^-1}
  double radius = 0.0;
  double step_norm = 0.0;  // ||d||_M
  double model_change = 0.0;  // q(d)
  double rho = 0.0;
  bool accepted = false;
  std::size_t hv = 0;  // spent on this iteration's subproblem
};

struct OuterResult {
  BenchRecord record;
  std::vector<IterationLog> trace;
  Vec x;
  double f = 0.0;
};

/// Called after every subproblem solve with the subproblem itself, the step
/// and the model change it reports.
using SubproblemObserver =
    std::function<void(std::size_t k, const DenseProblem& sub, const Vec& step, double q)>;

/// Basic trust-region method. Rejected steps with the gltr solver reuse the
/// Krylov data of the previous solve at the smaller radius.
OuterResult outer_loop(const NlpProblem& p, SubSolver solver, const OuterConfig& cfg = {},
                       const SubproblemObserver& observer = {});

}  // namespace gltr::bench
