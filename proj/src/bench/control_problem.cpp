#include "gltr/bench/control_problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace gltr::bench {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Discretization {
  SpMat stiffness;
  Vec mass;     // lumped, diagonal
  Vec target;   // y_d at the nodes
};

Discretization interval(std::size_t cells) {
  const auto n = static_cast<Eigen::Index>(cells + 1);
  const double h = 1.0 / static_cast<double>(cells);
  std::vector<Triplet> trip;
  for (Eigen::Index e = 0; e + 1 < n; ++e) {
    trip.emplace_back(e, e, 1.0 / h);
    trip.emplace_back(e + 1, e + 1, 1.0 / h);
    trip.emplace_back(e, e + 1, -1.0 / h);
    trip.emplace_back(e + 1, e, -1.0 / h);
  }
  Discretization d;
  d.stiffness.resize(n, n);
  d.stiffness.setFromTriplets(trip.begin(), trip.end());
  d.mass = Vec::Constant(n, h);
  d.mass(0) = d.mass(n - 1) = 0.5 * h;
  d.target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.target(i) = std::sin(std::numbers::pi * i * h);
  return d;
}

// Five-point stencil with half weights on boundary edges, which is what
// linear elements on a right-triangle mesh give.
Discretization square(std::size_t cells) {
  const auto m = static_cast<Eigen::Index>(cells + 1);
  const double h = 1.0 / static_cast<double>(cells);
  auto id = [m](Eigen::Index i, Eigen::Index j) { return i * m + j; };
  std::vector<Triplet> trip;
  auto edge = [&](Eigen::Index a, Eigen::Index b, double w) {
    trip.emplace_back(a, a, w);
    trip.emplace_back(b, b, w);
    trip.emplace_back(a, b, -w);
    trip.emplace_back(b, a, -w);
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j + 1 < m) edge(id(i, j), id(i, j + 1), (i == 0 || i == m - 1) ? 0.5 : 1.0);
      if (i + 1 < m) edge(id(i, j), id(i + 1, j), (j == 0 || j == m - 1) ? 0.5 : 1.0);
    }
  }
  Discretization d;
  d.stiffness.resize(m * m, m * m);
  d.stiffness.setFromTriplets(trip.begin(), trip.end());
  d.mass.resize(m * m);
  d.target.resize(m * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double wi = (i == 0 || i == m - 1) ? 0.5 : 1.0;
      const double wj = (j == 0 || j == m - 1) ? 0.5 : 1.0;
      d.mass(id(i, j)) = h * h * wi * wj;
      d.target(id(i, j)) = std::sin(std::numbers::pi * i * h) * std::sin(std::numbers::pi * j * h);
    }
  }
  return d;
}

struct ControlOperators {
  Vec mass;
  Vec target;
  Vec u_ref;
  double beta = 0.0;
  SpMat a;
  Eigen::SimplicialLDLT<SpMat> a_solver;
  Eigen::SimplicialLDLT<SpMat> schur_solver;  // A M^{-1} A + M

  Vec state(const Vec& u) const { return a_solver.solve(Vec(mass.cwiseProduct(u))); }
  // M A^{-1} M A^{-1} M v
  Vec tracking_hess(const Vec& v) const {
    const Vec w = a_solver.solve(Vec(mass.cwiseProduct(v)));
    return mass.cwiseProduct(a_solver.solve(Vec(mass.cwiseProduct(w))));
  }
};

}  // namespace

NlpProblem control_problem(std::size_t mesh_n, double beta, int dims) {
  if (mesh_n < 8) throw std::invalid_argument("control_problem: mesh_n must be at least 8");
  if (!(beta > 0.0)) throw std::invalid_argument("control_problem: beta must be positive");
  if (dims != 1 && dims != 2) throw std::invalid_argument("control_problem: dims must be 1 or 2");

  Discretization d = dims == 1 ? interval(mesh_n) : square(mesh_n);
  auto ops = std::make_shared<ControlOperators>();
  ops->mass = d.mass;
  ops->target = d.target;
  ops->u_ref = Vec::Zero(d.mass.size());
  ops->beta = beta;

  SpMat mass_mat(d.mass.size(), d.mass.size());
  mass_mat.setIdentity();
  mass_mat = mass_mat * d.mass.asDiagonal();
  ops->a = d.stiffness + mass_mat;
  ops->a_solver.compute(ops->a);
  if (ops->a_solver.info() != Eigen::Success) throw std::runtime_error("control_problem: factorization of A failed");
  const Vec inv_mass = d.mass.cwiseInverse();
  const SpMat schur = SpMat(ops->a * inv_mass.asDiagonal() * ops->a) + mass_mat;
  ops->schur_solver.compute(schur);
  if (ops->schur_solver.info() != Eigen::Success)
    throw std::runtime_error("control_problem: factorization of the metric failed");

  NlpProblem p;
  p.name = "control_" + std::to_string(dims) + "d_" + std::to_string(mesh_n);
  p.x0 = Vec::Zero(d.mass.size());
  p.delta0 = 1.0;
  p.f = [ops](const Vec& u) {
    const Vec r = ops->state(u) - ops->target;
    const Vec e = u - ops->u_ref;
    return 0.5 * r.dot(ops->mass.cwiseProduct(r)) + 0.5 * ops->beta * e.dot(ops->mass.cwiseProduct(e));
  };
  p.grad = [ops](const Vec& u) {
    const Vec r = ops->state(u) - ops->target;
    const Vec adj = ops->a_solver.solve(Vec(ops->mass.cwiseProduct(r)));
    return Vec(ops->mass.cwiseProduct(adj) + ops->beta * ops->mass.cwiseProduct(u - ops->u_ref));
  };
  p.hess_vec = [ops](const Vec&, const Vec& v) {
    return Vec(ops->tracking_hess(v) + ops->beta * ops->mass.cwiseProduct(v));
  };
  p.metric = [ops](const Vec& v) { return Vec(ops->mass.cwiseProduct(v) + ops->tracking_hess(v)); };
  // W = M A^{-1} (A M^{-1} A + M) A^{-1} M
  p.metric_inv = [ops](const Vec& r) {
    const Vec inv_mass = ops->mass.cwiseInverse();
    const Vec w = ops->schur_solver.solve(Vec(ops->a * inv_mass.cwiseProduct(r)));
    return Vec(inv_mass.cwiseProduct(ops->a * w));
  };
  return p;
}

}  // namespace gltr::bench
