#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gltr/tridiag.hpp"
#include "support.hpp"

using namespace gltr;
using namespace gltr::testing;

namespace {

TriMatrix two_by_two() { return TriMatrix({2.0, 2.0}, {1.0}); }

}  // namespace

TEST(TriMatrix, RejectsBrokenStructure) {
  EXPECT_THROW(TriMatrix({1.0, 2.0}, {}), std::invalid_argument);
  EXPECT_THROW(TriMatrix({1.0, 2.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(TriMatrix({1.0, 2.0}, {1.0}, {0, 1}), std::invalid_argument);
  EXPECT_NO_THROW(TriMatrix({1.0, 2.0}, {0.0}, {0, 1}));
}

TEST(TriMatrix, GrowsByRowsAndBlocks) {
  TriMatrix t;
  t.push_back(1.0, 0.0);
  t.push_back(2.0, 0.5);
  t.start_block(-3.0);
  t.push_back(4.0, 0.25);
  ASSERT_EQ(t.size(), 4u);
  ASSERT_EQ(t.num_blocks(), 2u);
  EXPECT_EQ(t.block_begin(1), 2u);
  EXPECT_EQ(t.offdiag()[1], 0.0);
  const TriMatrix b = t.block(1);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_EQ(b.diag()[0], -3.0);
  EXPECT_THROW(t.push_back(1.0, 0.0), std::invalid_argument);
}

TEST(Ldlt, TwoByTwoPivots) {
  const LdlFactor f = ldlt_shifted(two_by_two(), 0.0);
  ASSERT_TRUE(f.complete());
  ASSERT_EQ(f.pivots.size(), 2u);
  EXPECT_DOUBLE_EQ(f.pivots[0], 2.0);
  EXPECT_DOUBLE_EQ(f.pivots[1], 1.5);
  EXPECT_TRUE(f.positive_definite());
}

TEST(Ldlt, NegativeLeadingPivotIsReported) {
  const LdlFactor f = ldlt_shifted(two_by_two(), -2.5);
  ASSERT_TRUE(f.failed_at.has_value());
  EXPECT_EQ(*f.failed_at, 0u);
  try {
    solve_shifted(two_by_two(), -2.5, std::vector<double>{1.0, 0.0});
    FAIL() << "expected IndefiniteError";
  } catch (const IndefiniteError& e) {
    EXPECT_EQ(e.index(), 0u);
  }
}

TEST(Ldlt, ReconstructsRandomSpd) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const TriMatrix t = random_spd_tri(20, rng);
    const LdlFactor f = ldlt_shifted(t, 0.0);
    ASSERT_TRUE(f.positive_definite());
    Mat l = Mat::Identity(20, 20);
    for (int j = 1; j < 20; ++j) l(j, j - 1) = f.multipliers[j - 1];
    const Mat rebuilt = l * to_vec(f.pivots).asDiagonal() * l.transpose();
    EXPECT_LE((rebuilt - dense(t)).cwiseAbs().maxCoeff(), 1e-12 * t.norm_estimate());
  }
}

TEST(Ldlt, ExtendMatchesFreshFactor) {
  std::mt19937_64 rng(5);
  const TriMatrix t = random_spd_tri(12, rng);
  const TriMatrix head(std::vector<double>(t.diag().begin(), t.diag().end() - 1),
                       std::vector<double>(t.offdiag().begin(), t.offdiag().end() - 1));
  const auto grown = extend_factor(ldlt_shifted(head, 0.3), t);
  ASSERT_TRUE(grown.has_value());
  const LdlFactor fresh = ldlt_shifted(t, 0.3);
  for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(grown->pivots[j], fresh.pivots[j], 1e-14);
}

TEST(LastPivot, TwoByTwoValues) {
  const auto at0 = last_pivot(two_by_two(), 0.0);
  ASSERT_TRUE(at0);
  EXPECT_DOUBLE_EQ(at0->value, 1.5);
  const auto at1 = last_pivot(two_by_two(), 1.0);
  ASSERT_TRUE(at1);
  EXPECT_NEAR(at1->value, 0.0, 1e-15);
  EXPECT_FALSE(last_pivot(two_by_two(), 2.5).has_value());
}

TEST(LastPivot, MatchesDeterminantRatio) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pick(-4.0, 4.0);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 19;
    const TriMatrix t = random_tri(n, rng);
    const double theta = pick(rng);
    const auto d = last_pivot(t, theta, 0);
    if (!d) continue;
    // Three-term determinant recurrence of the leading minors of T - theta I.
    double prev = 1.0, cur = t.diag()[0] - theta;
    for (std::size_t j = 1; j < n; ++j) {
      const double next = (t.diag()[j] - theta) * cur - t.offdiag()[j - 1] * t.offdiag()[j - 1] * prev;
      prev = cur;
      cur = next;
    }
    const double ratio = cur / prev;
    EXPECT_NEAR(d->value, ratio, 1e-10 * std::max(1.0, std::abs(ratio)));
    ++compared;
  }
  EXPECT_GT(compared, 30);
}

TEST(LastPivot, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(8);
  int compared = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const TriMatrix t = random_tri(10, rng);
    const double theta = min_eig(dense(t)) - 0.5;  // regular region, away from poles
    const double step = 1e-6 * std::max(1.0, t.norm_estimate());
    const auto d = last_pivot(t, theta, 2);
    const auto up = last_pivot(t, theta + step, 2);
    const auto down = last_pivot(t, theta - step, 2);
    ASSERT_TRUE(d && up && down);
    const double fd1 = (up->value - down->value) / (2 * step);
    const double fd2 = (up->first - down->first) / (2 * step);
    EXPECT_LE(std::abs(fd1 - d->first), 1e-5 * std::max(1.0, std::abs(d->first)));
    EXPECT_LE(std::abs(fd2 - d->second), 1e-5 * std::max(1.0, std::abs(d->second)));
    ++compared;
  }
  EXPECT_EQ(compared, 50);
}

TEST(Gershgorin, Examples) {
  EXPECT_EQ(gershgorin(two_by_two()), std::make_pair(1.0, 3.0));
  EXPECT_EQ(gershgorin(TriMatrix({5.0}, {})), std::make_pair(5.0, 5.0));
}

TEST(Gershgorin, ContainsSpectrum) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const TriMatrix t = random_tri(30, rng);
    const auto [lo, hi] = gershgorin(t);
    const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(dense(t)).eigenvalues();
    EXPECT_LE(lo, ev.minCoeff());
    EXPECT_GE(hi, ev.maxCoeff());
  }
}

TEST(SmallestEig, Examples) {
  EXPECT_NEAR(smallest_eig(two_by_two()), 1.0, 1e-14);
  for (double c : {-7.5, 0.0, 3.25}) EXPECT_DOUBLE_EQ(smallest_eig(TriMatrix({c}, {})), c);
}

TEST(SmallestEig, MatchesDenseSolverWithAndWithoutLifting) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 39;
    const TriMatrix t = random_tri(n, rng);
    const double scale = t.norm_estimate();
    const double expected = min_eig(dense(t));
    EXPECT_NEAR(smallest_eig(t), expected, 1e-10 * scale) << "n=" << n;
    const Mat head = dense(t).topLeftCorner(n - 1, n - 1);
    EXPECT_NEAR(smallest_eig(t, min_eig(head)), expected, 1e-10 * scale) << "n=" << n;
  }
}

TEST(InverseIteration, Examples) {
  const auto v = inverse_iteration(two_by_two(), 1.0);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(v[1], -1.0 / std::sqrt(2.0), 1e-12);
  const auto one = inverse_iteration(TriMatrix({-2.0}, {}), -2.0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0], 1.0);
}

TEST(InverseIteration, SmallResidualOnRandomMatrices) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const TriMatrix t = random_tri(25, rng);
    const double theta = min_eig(dense(t));
    const Vec v = to_vec(inverse_iteration(t, theta));
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_LE((dense(t) * v - theta * v).norm(), 1e-8 * t.norm_estimate());
  }
}

TEST(SolveShifted, Examples) {
  const auto a = solve_shifted(TriMatrix({2.0}, {}), 0.0, std::vector<double>{-1.0});
  EXPECT_DOUBLE_EQ(a[0], -0.5);
  const auto b = solve_shifted(two_by_two(), 0.0, std::vector<double>{1.0, 0.0});
  EXPECT_NEAR(b[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b[1], -1.0 / 3.0, 1e-15);
}

TEST(SolveShifted, RandomSpdResidual) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const TriMatrix t = random_spd_tri(50, rng);
    const Vec rhs = random_vec(50, rng);
    const Vec x = to_vec(solve_shifted(t, 0.25, std::vector<double>(rhs.data(), rhs.data() + 50)));
    const Mat a = dense(t) + 0.25 * Mat::Identity(50, 50);
    const double cond = 1.0 / min_eig(a) * a.norm();
    EXPECT_LE((a * x - rhs).norm(), 1e-12 * rhs.norm() * cond);
    EXPECT_LE((x - a.ldlt().solve(rhs)).norm(), 1e-10 * x.norm());
  }
}
