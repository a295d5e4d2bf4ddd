#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gltr/dense_backend.hpp"
#include "gltr/oracle.hpp"
#include "support.hpp"

using namespace gltr;
using namespace gltr::testing;

namespace {

TerminationConfig tight() {
  TerminationConfig cfg;
  cfg.tol_rel_i = 1e-12;
  cfg.tol_rel_b = 1e-12;
  return cfg;
}

Mat random_spd(Eigen::Index n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec eig(n);
  for (auto& x : eig) x = u(rng);
  return with_spectrum(eig, rng);
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(SolveGltr, IdentityInterior) {
  const Vec g = Eigen::Vector4d(1.0, 2.0, -1.0, 0.5);
  SolveOptions opts;
  opts.explore_invariant_subspaces = false;
  const auto r = solve_gltr(DenseProblem::from_matrices(Mat::Identity(4, 4), g, 10.0), {}, opts);
  EXPECT_LE((r.x + g).norm(), 1e-14);
  EXPECT_EQ(r.lambda, 0.0);
  EXPECT_EQ(r.hess_products, 1u);
}

TEST(SolveGltr, IdentityWithExplorationSpendsOneRestart) {
  const Vec g = Eigen::Vector4d(1.0, 2.0, -1.0, 0.5);
  const auto r = solve_gltr(DenseProblem::from_matrices(Mat::Identity(4, 4), g, 10.0));
  EXPECT_LE((r.x + g).norm(), 1e-12);
  EXPECT_EQ(r.restarts, 1u);
  EXPECT_EQ(r.hess_products, 2u);
}

TEST(SolveGltr, HardCasePipeline) {
  const Mat h = Vec(Eigen::Vector2d(1.0, -2.0)).asDiagonal();
  const auto r = solve_gltr(DenseProblem::from_matrices(h, Eigen::Vector2d(1.0, 0.0), 1.0), tight());
  EXPECT_EQ(r.status, SolutionStatus::hard_case);
  EXPECT_NEAR(r.objective, -7.0 / 6.0, 1e-12);
  EXPECT_NEAR(r.lambda, 2.0, 1e-12);
  EXPECT_NEAR(r.x(0), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(std::abs(r.x(1)), std::sqrt(8.0) / 3.0, 1e-12);
}

TEST(SolveGltr, RandomIndefiniteMatchesOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 30;
    const Mat h = random_symmetric(n, rng);
    const Mat m = random_spd(n, rng, 0.5, 2.0);
    const Vec g = random_vec(n, rng);
    const double radius = std::pow(10.0, std::uniform_real_distribution<double>(-1.5, 1.0)(rng));
    const auto r = solve_gltr(DenseProblem::from_matrices(h, m, g, radius), tight());
    const auto ref = oracle::solve(h, m, g, radius);
    EXPECT_LE(rel_gap(r.objective, ref.objective), 1e-6) << "trial " << trial;

    const auto kkt = oracle::kkt_residual(h, m, g, radius, r.x, r.lambda);
    const double scale = std::max(1.0, h.norm());
    EXPECT_LE(kkt.stationarity, 1e-6 * scale);
    EXPECT_LE(kkt.feasibility, 1e-6 * radius);
    EXPECT_LE(kkt.complementarity, 1e-6 * scale * radius);
    EXPECT_GE(kkt.min_eig_shift, -1e-6 * scale);
    EXPECT_GE(r.lambda, 0.0);
  }
}

TEST(SolveGltr, Deterministic) {
  std::mt19937_64 rng(42);
  const Mat h = random_symmetric(25, rng);
  const Vec g = random_vec(25, rng);
  const auto a = solve_gltr(DenseProblem::from_matrices(h, g, 1.0));
  const auto b = solve_gltr(DenseProblem::from_matrices(h, g, 1.0));
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.hess_products, b.hess_products);
  EXPECT_EQ(a.outcome, b.outcome);
}

TEST(SolveGltr, HessProductsCounted) {
  std::mt19937_64 rng(43);
  const Mat h = random_symmetric(20, rng);
  std::size_t served = 0;
  DenseProblem p = DenseProblem::from_matrices(h, random_vec(20, rng), 1.0);
  p.hess = [&](const Vec& x) -> Vec {
    ++served;
    return h * x;
  };
  SolveOptions opts;
  opts.evaluate_true_objective = false;
  opts.driver.ill_conditioning_gate = false;
  const auto r = solve_gltr(p, tight(), opts);
  EXPECT_EQ(r.hess_products, served);
}

TEST(SolveGltr, ExactHardCaseFamilyHitsBoundary) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 12;
    Vec eig = Vec::LinSpaced(n, -1.0, 3.0);
    eig(0) = -2.0;
    const Mat q = random_orthogonal(n, rng);
    const Mat h = q * eig.asDiagonal() * q.transpose();
    Vec c = random_vec(n, rng);
    c(0) = 0.0;
    const Vec g = q * c;
    // Large radius forces the eigenvector branch, small radius the other one.
    const double radius = trial % 2 == 0 ? 5.0 : 0.05;
    const auto r = solve_gltr(DenseProblem::from_matrices(0.5 * (h + h.transpose()), g, radius), tight());
    const auto ref = oracle::solve(0.5 * (h + h.transpose()), g, radius);
    EXPECT_NEAR(r.x.norm(), radius, 1e-8 * radius) << "trial " << trial;
    EXPECT_LE(rel_gap(r.objective, ref.objective), 1e-6) << "trial " << trial;
  }
}

TEST(SolveGltr, HardCaseDetectedWhenCurvatureCancels) {
  // <g,Hg> is nearly zero, so CG Rayleigh quotients underestimate ||H||.
  const Mat h = Vec((Vec(5) << -2.0, -0.798416, 0.785245, 1.0, 2.0).finished()).asDiagonal();
  const Vec g = (Vec(5) << 0.0, -1.32969, 1.33982, 0.0, 0.0).finished();
  const auto r = solve_gltr(DenseProblem::from_matrices(h, g, 10.0), tight());
  const auto ref = oracle::solve(h, g, 10.0);
  EXPECT_EQ(r.status, SolutionStatus::hard_case);
  EXPECT_NEAR(r.lambda, 2.0, 1e-10);
  EXPECT_LE(rel_gap(r.objective, ref.objective), 1e-10);
}

TEST(SolveSt, SpdInteriorMatchesGltr) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat h = random_spd(20, rng, 1.0, 5.0);
    const Vec g = random_vec(20, rng);
    const auto p = DenseProblem::from_matrices(h, g, 1e3);
    const auto st = solve_st(p, tight());
    const auto gl = solve_gltr(p, tight());
    EXPECT_FALSE(st.hit_boundary);
    EXPECT_LE((st.x - gl.x).norm(), 1e-8);
  }
}

TEST(SolveSt, NegativeCurvatureGoesToBoundaryAlongFirstDirection) {
  const Mat h = Vec(Eigen::Vector2d(-1.0, -3.0)).asDiagonal();
  const Vec g = Eigen::Vector2d(1.0, 1.0);
  const auto r = solve_st(DenseProblem::from_matrices(h, g, 2.0));
  EXPECT_TRUE(r.negative_curvature);
  EXPECT_EQ(r.hess_products, 1u);
  EXPECT_NEAR(r.x.norm(), 2.0, 1e-14);
  EXPECT_NEAR(r.x.normalized().dot(-g.normalized()), 1.0, 1e-14);
  EXPECT_NEAR(r.objective, 0.5 * r.x.dot(h * r.x) + g.dot(r.x), 1e-12);
}

TEST(SolveSt, ObjectiveTrackedWithoutExtraProducts) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat h = random_symmetric(15, rng);
    const Vec g = random_vec(15, rng);
    const auto r = solve_st(DenseProblem::from_matrices(h, g, 0.8), tight());
    EXPECT_NEAR(r.objective, 0.5 * r.x.dot(h * r.x) + g.dot(r.x), 1e-10);
  }
}

TEST(SolveSt, GltrNeverWorse) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 5 + trial % 30;
    const Mat h = random_symmetric(n, rng);
    const Vec g = random_vec(n, rng);
    const auto p = DenseProblem::from_matrices(h, g, 1.0);
    const auto st = solve_st(p, tight());
    const auto gl = solve_gltr(p, tight());
    EXPECT_LE(gl.objective, st.objective + 1e-10 * std::max(1.0, h.norm())) << "trial " << trial;
  }
}

TEST(Mgs, OrthogonalToSingleDirection) {
  const auto p = DenseProblem::from_matrices(Mat::Identity(3, 3), Vec::Ones(3), 1.0);
  const Vec v = mgs_restart({Vec::Unit(3, 0)}, p, 7);
  EXPECT_NEAR(v(0), 0.0, 1e-15);
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
}

TEST(Mgs, FullSubspaceThrows) {
  const auto p = DenseProblem::from_matrices(Mat::Identity(2, 2), Vec::Ones(2), 1.0);
  EXPECT_THROW(mgs_restart({Vec::Unit(2, 0), Vec::Unit(2, 1)}, p, 7), SubspaceFull);
}

TEST(Mgs, RandomMOrthonormalSets) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 50, k = 25;
    const Mat m = random_spd(n, rng, 0.5, 3.0);
    const auto p = DenseProblem::from_matrices(Mat::Identity(n, n), m, Vec::Ones(n), 1.0);
    // M-orthonormal directions through a Cholesky factor of M.
    const Mat l = Eigen::LLT<Mat>(m).matrixL();
    const Mat basis = l.transpose().triangularView<Eigen::Upper>().solve(random_orthogonal(n, rng));
    std::vector<Vec> dirs;
    for (Eigen::Index j = 0; j < k; ++j) dirs.push_back(basis.col(j));
    const Vec v = mgs_restart(dirs, p, static_cast<std::uint64_t>(trial));
    double worst = 0.0;
    for (const Vec& d : dirs) worst = std::max(worst, std::abs(v.dot(m * d)));
    EXPECT_LE(worst, 1e-10);
    EXPECT_NEAR(std::sqrt(v.dot(m * v)), 1.0, 1e-12);
  }
}

TEST(DenseProblem, RejectsIndefiniteMetric) {
  const Mat m = Vec(Eigen::Vector2d(1.0, -1.0)).asDiagonal();
  EXPECT_THROW(DenseProblem::from_matrices(Mat::Identity(2, 2), m, Vec::Ones(2), 1.0), std::invalid_argument);
}
