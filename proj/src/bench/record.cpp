#include "gltr/bench/record.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gltr::bench {

void to_json(nlohmann::json& j, const BenchRecord& r) {
  j = nlohmann::json{{"problem", r.problem},   {"solver", r.solver},
                     {"grad_norm", r.grad_norm}, {"hv_count", r.hv_count},
                     {"outer_iters", r.outer_iters}, {"wall_ms", r.wall_ms},
                     {"outcome", r.outcome}};
}

void from_json(const nlohmann::json& j, BenchRecord& r) {
  j.at("problem").get_to(r.problem);
  j.at("solver").get_to(r.solver);
  // NaN and Inf serialize as null.
  r.grad_norm = j.at("grad_norm").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                            : j.at("grad_norm").get<double>();
  j.at("hv_count").get_to(r.hv_count);
  j.at("outer_iters").get_to(r.outer_iters);
  j.at("wall_ms").get_to(r.wall_ms);
  j.at("outcome").get_to(r.outcome);
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    if (r.problem.find(',') != std::string::npos || r.solver.find(',') != std::string::npos)
      throw std::invalid_argument("write_csv: names must not contain commas");
    out << r.problem << ',' << r.solver << ',' << std::setprecision(17) << r.grad_norm << ','
        << r.hv_count << ',' << r.outer_iters << ',' << r.wall_ms << ',' << r.outcome << '\n';
  }
}

std::vector<BenchRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw std::runtime_error("read_csv: unexpected header");
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error("read_csv: bad row: " + line);
    BenchRecord r;
    r.problem = cells[0];
    r.solver = cells[1];
    r.grad_norm = std::stod(cells[2]);
    r.hv_count = std::stoul(cells[3]);
    r.outer_iters = std::stoul(cells[4]);
    r.wall_ms = std::stod(cells[5]);
    r.outcome = cells[6];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BenchRecord> read_record_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<BenchRecord> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    out.push_back(nlohmann::json::parse(in).get<BenchRecord>());
  }
  return out;
}

}  // namespace gltr::bench
