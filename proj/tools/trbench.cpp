// trbench: outer trust-region runs over the synthetic suite, performance
// profiles from stored records, and the control-problem mesh study.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gltr/bench/control_problem.hpp"
#include "gltr/bench/outer_loop.hpp"
#include "gltr/bench/profile.hpp"
#include "gltr/bench/record.hpp"
#include "gltr/bench/suite.hpp"

namespace fs = std::filesystem;
using namespace gltr::bench;

namespace {

// Flat key=value file; '#' starts a comment. Keys mirror OuterConfig.
OuterConfig load_config(const std::string& path, OuterConfig cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  const std::map<std::string, double*> reals{
      {"delta0", &cfg.delta0},     {"tol_abs", &cfg.tol_abs},     {"rho_acc", &cfg.rho_acc},
      {"rho_inc", &cfg.rho_inc},   {"gamma_inc", &cfg.gamma_inc}, {"gamma_dec", &cfg.gamma_dec}};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "max_outer") {
      cfg.max_outer = std::stoul(value);
    } else if (auto it = reals.find(key); it != reals.end()) {
      *it->second = std::stod(value);
    } else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

int run_suite(const std::string& solver_name, std::uint64_t seed, const OuterConfig& cfg, const fs::path& out_dir) {
  const SubSolver solver = parse_sub_solver(solver_name);
  fs::create_directories(out_dir);
  std::vector<BenchRecord> records;
  for (const auto& p : suite(seed)) {
    const OuterResult res = outer_loop(p, solver, cfg);
    records.push_back(res.record);
    std::ofstream(out_dir / (p.name + "." + solver_name + ".json")) << nlohmann::json(res.record).dump(2) << '\n';
    std::cout << p.name << ' ' << res.record.outcome << " outer=" << res.record.outer_iters
              << " hv=" << res.record.hv_count << " |g|=" << res.record.grad_norm << '\n';
  }
  // Merge with rows of other solvers already in the directory.
  std::vector<BenchRecord> all = read_record_dir(out_dir);
  std::ofstream csv(out_dir / "results.csv");
  write_csv(csv, all);
  return 0;
}

int run_profile(const std::string& metric, const fs::path& in_dir, const fs::path& out_file) {
  ProfileMetric m;
  if (metric == "hv") {
    m = ProfileMetric::hv;
  } else if (metric == "time") {
    m = ProfileMetric::time;
  } else {
    throw std::runtime_error("unknown metric " + metric);
  }
  const auto prof = performance_profile(read_record_dir(in_dir), m);
  std::ofstream out(out_file);
  write_profile_csv(out, prof.points());
  return 0;
}

int run_control(std::size_t mesh, double beta, int dims, const std::string& solver_name, const OuterConfig& cfg) {
  const NlpProblem p = control_problem(mesh, beta, dims);
  const OuterResult res = outer_loop(p, parse_sub_solver(solver_name), cfg);
  std::cout << "problem,n,beta,outer_iters,hv_count,grad_norm,outcome\n"
            << p.name << ',' << p.dim() << ',' << beta << ',' << res.record.outer_iters << ','
            << res.record.hv_count << ',' << res.record.grad_norm << ',' << res.record.outcome << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trust-region subproblem benchmark"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "key=value file with outer-loop parameters");

  auto* run = app.add_subcommand("run", "outer loop over the problem suite");
  bool use_suite = false;
  std::string solver = "gltr";
  std::uint64_t seed = 1;
  std::size_t max_outer = 0;
  std::string out_dir = "results";
  run->add_flag("--suite", use_suite, "run the synthetic suite")->required();
  run->add_option("--solver", solver, "gltr | st | oracle")->check(CLI::IsMember({"gltr", "st", "oracle"}));
  run->add_option("--seed", seed, "seed for the random problems");
  run->add_option("--max-outer", max_outer, "outer iteration limit");
  run->add_option("--out", out_dir, "output directory");

  auto* profile = app.add_subcommand("profile", "performance profile from stored records");
  std::string metric = "hv";
  std::string in_dir;
  std::string out_file = "profile.csv";
  profile->add_option("--metric", metric, "hv | time")->check(CLI::IsMember({"hv", "time"}));
  profile->add_option("--in", in_dir, "directory of run records")->required();
  profile->add_option("--out", out_file, "profile CSV");

  auto* control = app.add_subcommand("control", "control problem on one mesh");
  std::size_t mesh = 64;
  double beta = 1e-4;
  int dims = 1;
  std::string control_solver = "gltr";
  control->add_option("--mesh", mesh, "cells per direction")->check(CLI::PositiveNumber);
  control->add_option("--beta", beta, "regularization weight");
  control->add_option("--dims", dims, "1 or 2")->check(CLI::IsMember({1, 2}));
  control->add_option("--solver", control_solver, "gltr | st | oracle")->check(CLI::IsMember({"gltr", "st", "oracle"}));

  CLI11_PARSE(app, argc, argv);

  try {
    OuterConfig cfg;
    if (!config_file.empty()) cfg = load_config(config_file, cfg);
    if (max_outer > 0) cfg.max_outer = max_outer;
    if (*run) return run_suite(solver, seed, cfg, out_dir);
    if (*profile) return run_profile(metric, in_dir, out_file);
    if (*control) return run_control(mesh, beta, dims, control_solver, cfg);
  } catch (const std::exception& e) {
    std::cerr << "trbench: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
