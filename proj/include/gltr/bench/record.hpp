#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace gltr::bench {

/// One outer-loop run. Outcome is "converged" for a run that met the
/// gradient tolerance; anything else counts as a failure in profiles.
struct BenchRecord {
  std::string problem;
  std::string solver;
  double grad_norm = 0.0;
  std::size_t hv_count = 0;
  std::size_t outer_iters = 0;
  double wall_ms = 0.0;
  std::string outcome;

  bool solved() const { return outcome == "converged"; }
};

void to_json(nlohmann::json& j, const BenchRecord& r);
void from_json(const nlohmann::json& j, BenchRecord& r);

inline constexpr const char* kResultsHeader = "problem,solver,grad_norm,hv_count,outer_iters,wall_ms,outcome";

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_csv(std::istream& in);

/// Every *.json file in dir holding one record object. Sorted by file name.
std::vector<BenchRecord> read_record_dir(const std::filesystem::path& dir);

}  // namespace gltr::bench
