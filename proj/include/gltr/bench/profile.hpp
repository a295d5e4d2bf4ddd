#pragma once

#include <map>
#include <string>
#include <vector>

#include "gltr/bench/record.hpp"

namespace gltr::bench {

enum class ProfileMetric { hv, time };

struct ProfilePoint {
  double tau = 0.0;
  std::string solver;
  double rho = 0.0;
};

/// Extended performance profile: each solver is compared with the best of
/// the others, so ratios can drop below 1. Failed or missing runs count as
/// t = inf. Conventions for the degenerate ratios:
///   finite / inf -> 0,  inf / anything -> inf,  0 / 0 -> 1.
class PerformanceProfile {
 public:
  const std::vector<std::string>& solvers() const { return solvers_; }
  const std::vector<std::string>& problems() const { return problems_; }
  double ratio(const std::string& solver, const std::string& problem) const;
  /// Fraction of problems with ratio <= tau. Nondecreasing in tau.
  double rho(const std::string& solver, double tau) const;
  /// rho at every distinct finite ratio, ascending in tau, per solver.
  std::vector<ProfilePoint> points() const;

 private:
  friend PerformanceProfile performance_profile(const std::vector<BenchRecord>&, ProfileMetric);
  std::vector<std::string> solvers_;
  std::vector<std::string> problems_;
  std::map<std::string, std::map<std::string, double>> ratios_;
};

/// Throws std::invalid_argument on an empty set, fewer than two solvers,
/// or a duplicated (problem, solver) pair.
PerformanceProfile performance_profile(const std::vector<BenchRecord>& records, ProfileMetric metric);

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points);

}  // namespace gltr::bench
