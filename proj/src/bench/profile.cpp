#include "gltr/bench/profile.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

namespace gltr::bench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cost(const BenchRecord& r, ProfileMetric metric) {
  if (!r.solved()) return kInf;
  return metric == ProfileMetric::hv ? static_cast<double>(r.hv_count) : r.wall_ms;
}

double divide(double t, double best_other) {
  if (std::isinf(t)) return kInf;
  if (std::isinf(best_other)) return 0.0;
  if (best_other == 0.0) return t == 0.0 ? 1.0 : kInf;
  return t / best_other;
}

}  // namespace

double PerformanceProfile::ratio(const std::string& solver, const std::string& problem) const {
  return ratios_.at(solver).at(problem);
}

double PerformanceProfile::rho(const std::string& solver, double tau) const {
  const auto& row = ratios_.at(solver);
  const auto hits = std::count_if(row.begin(), row.end(), [tau](const auto& kv) { return kv.second <= tau; });
  return static_cast<double>(hits) / static_cast<double>(problems_.size());
}

std::vector<ProfilePoint> PerformanceProfile::points() const {
  std::set<double> taus;
  for (const auto& [solver, row] : ratios_)
    for (const auto& [problem, r] : row)
      if (std::isfinite(r)) taus.insert(r);
  std::vector<ProfilePoint> out;
  for (const auto& s : solvers_)
    for (double tau : taus) out.push_back({tau, s, rho(s, tau)});
  return out;
}

PerformanceProfile performance_profile(const std::vector<BenchRecord>& records, ProfileMetric metric) {
  if (records.empty()) throw std::invalid_argument("performance_profile: no records");
  std::map<std::string, std::map<std::string, double>> cost_of;  // solver -> problem -> t
  std::set<std::string> problems;
  for (const auto& r : records) {
    auto [it, fresh] = cost_of[r.solver].emplace(r.problem, cost(r, metric));
    if (!fresh) throw std::invalid_argument("performance_profile: duplicate run " + r.problem + "/" + r.solver);
    problems.insert(r.problem);
  }
  if (cost_of.size() < 2) throw std::invalid_argument("performance_profile: needs at least two solvers");

  PerformanceProfile prof;
  prof.problems_.assign(problems.begin(), problems.end());
  for (const auto& [solver, row] : cost_of) prof.solvers_.push_back(solver);

  auto t_of = [&](const std::string& s, const std::string& p) {
    const auto& row = cost_of.at(s);
    const auto it = row.find(p);
    return it == row.end() ? kInf : it->second;
  };
  for (const auto& s : prof.solvers_) {
    for (const auto& p : prof.problems_) {
      double best = kInf;
      for (const auto& other : prof.solvers_)
        if (other != s) best = std::min(best, t_of(other, p));
      prof.ratios_[s][p] = divide(t_of(s, p), best);
    }
  }
  return prof;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points) {
  out << "tau,solver,rho\n" << std::setprecision(17);
  for (const auto& pt : points) out << pt.tau << ',' << pt.solver << ',' << pt.rho << '\n';
}

}  // namespace gltr::bench
