#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gltr/tridiag.hpp"

namespace gltr::testing {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Mat dense(const TriMatrix& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Mat a = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = t.diag()[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = t.offdiag()[i];
  return a;
}

inline double min_eig(const Mat& a) {
  return Eigen::SelfAdjointEigenSolver<Mat>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

inline Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Irreducible T with entries drawn from N(0,1) on the diagonal and
/// couplings bounded away from zero.
inline TriMatrix random_tri(std::size_t n, std::mt19937_64& rng, double diag_shift = 0.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> coupling(0.2, 1.5);
  std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
  for (auto& x : d) x = normal(rng) + diag_shift;
  for (auto& x : e) x = coupling(rng) * (normal(rng) < 0 ? -1.0 : 1.0);
  return TriMatrix(d, e);
}

/// Positive definite irreducible T.
inline TriMatrix random_spd_tri(std::size_t n, std::mt19937_64& rng) {
  TriMatrix t = random_tri(n, rng);
  const double shift = 1.0 - min_eig(dense(t));
  std::vector<double> s(n, shift);
  return t.plus_diagonal(s);
}

inline Mat random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ();
}

inline Vec random_vec(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

/// Q diag(eig) Q^T, exactly symmetric.
inline Mat with_spectrum(const Vec& eig, std::mt19937_64& rng) {
  const Mat q = random_orthogonal(eig.size(), rng);
  const Mat a = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

inline Mat random_symmetric(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return 0.5 * (a + a.transpose());
}

}  // namespace gltr::testing
