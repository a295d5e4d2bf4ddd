#include "gltr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gltr::oracle {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Coordinates in the eigenbasis: x_i = -c_i / (theta_i + lambda), skipping `skip`.
double shifted_norm(const Vec& theta, const Vec& c, double lambda, const std::vector<bool>& skip) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (skip[static_cast<std::size_t>(i)]) continue;
    const double xi = c(i) / (theta(i) + lambda);
    s += xi * xi;
  }
  return std::sqrt(s);
}

Vec shifted_coords(const Vec& theta, const Vec& c, double lambda, const std::vector<bool>& skip) {
  Vec y = Vec::Zero(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (!skip[static_cast<std::size_t>(i)]) y(i) = -c(i) / (theta(i) + lambda);
  return y;
}

double quad(const Mat& h, const Vec& g, const Vec& x) { return 0.5 * x.dot(h * x) + g.dot(x); }

}  // namespace

const char* to_string(Case c) {
  switch (c) {
    case Case::interior: return "interior";
    case Case::easy: return "easy";
    case Case::hard: return "hard";
  }
  return "unknown";
}

Solution solve(const Mat& h, const Vec& g, double radius) {
  if (h.rows() != h.cols() || h.rows() != g.size()) throw std::invalid_argument("oracle: dimension mismatch");
  if (!(radius > 0.0)) throw std::invalid_argument("oracle: radius must be positive");
  const Eigen::Index n = g.size();
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (h + h.transpose()));
  const Vec& theta = eig.eigenvalues();
  const Mat& q = eig.eigenvectors();
  const Vec c = q.transpose() * g;
  const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  const double theta_min = theta(0);
  const double gnorm = g.norm();

  Solution out;
  const std::vector<bool> none(static_cast<std::size_t>(n), false);

  if (theta_min > 0.0) {
    const double nrm = shifted_norm(theta, c, 0.0, none);
    if (nrm <= radius) {
      out.x = q * shifted_coords(theta, c, 0.0, none);
      out.lambda = 0.0;
      out.kind = Case::interior;
      out.objective = quad(h, g, out.x);
      return out;
    }
  }

  // Leftmost eigenspace, identified with a relative cluster tolerance.
  std::vector<bool> leftmost(static_cast<std::size_t>(n), false);
  double c_left = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (theta(i) - theta_min <= 1e-12 * scale) {
      leftmost[static_cast<std::size_t>(i)] = true;
      c_left += c(i) * c(i);
    }
  }
  c_left = std::sqrt(c_left);

  const double lam_lo = std::max(0.0, -theta_min);
  if (c_left <= 1e-13 * gnorm && theta_min <= 0.0) {
    const double pinv_norm = shifted_norm(theta, c, lam_lo, leftmost);
    if (pinv_norm <= radius) {
      Vec y = shifted_coords(theta, c, lam_lo, leftmost);
      // Canonical representative: project e_k onto the eigenspace.
      Vec v = Vec::Zero(n);
      for (Eigen::Index k = 0; k < n && v.norm() <= 1e-8; ++k) {
        v.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
          if (leftmost[static_cast<std::size_t>(i)]) v += q(k, i) * q.col(i);
      }
      v.normalize();
      const double alpha = std::sqrt(std::max(0.0, radius * radius - pinv_norm * pinv_norm));
      const Vec base = q * y;
      const Vec xp = base + alpha * v;
      const Vec xm = base - alpha * v;
      const double qp = quad(h, g, xp);
      const double qm = quad(h, g, xm);
      out.x = qm < qp ? xm : xp;
      out.objective = std::min(qp, qm);
      out.lambda = lam_lo;
      out.kind = Case::hard;
      return out;
    }
  }

  // Easy case: bisection on ||x(lambda)|| = radius over (lam_lo, lam_hi].
  double lo = lam_lo;
  double hi = lam_lo + gnorm / radius + scale;
  while (shifted_norm(theta, c, hi, none) > radius) hi = 2.0 * hi + 1.0;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool definite = theta_min + mid > 0.0;
    if (definite && shifted_norm(theta, c, mid, none) <= radius) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.lambda = hi;
  Vec y = shifted_coords(theta, c, hi, none);
  out.kind = Case::easy;
  if (theta_min <= 0.0 && y.norm() < radius * (1.0 - 1e-12)) {
    // ||x(lambda)|| jumps across the radius in floating point: put the rest
    // on the leftmost eigenvector, on the side that lowers the objective.
    const double rest = std::sqrt(std::max(0.0, radius * radius - (y.squaredNorm() - y(0) * y(0))));
    Vec yp = y, ym = y;
    yp(0) = rest;
    ym(0) = -rest;
    const double qp = quad(h, g, q * yp);
    const double qm = quad(h, g, q * ym);
    y = qm < qp ? ym : yp;
  }
  out.x = q * y;
  out.objective = quad(h, g, out.x);
  return out;
}

Solution solve(const Mat& h, const Mat& m, const Vec& g, double radius) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("oracle: metric is not positive definite");
  // With M = L L^T and y = L^T x the problem has the Euclidean norm.
  const Mat l = llt.matrixL();
  const Mat l_inv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(m.rows(), m.cols()));
  const Mat ht = l_inv * h * l_inv.transpose();
  const Vec gt = l_inv * g;
  Solution s = solve(ht, gt, radius);
  s.x = l_inv.transpose() * s.x;
  s.objective = quad(h, g, s.x);
  return s;
}

KktResidual kkt_residual(const Mat& h, const Mat& m, const Vec& g, double radius, const Vec& x,
                         double lambda) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("kkt_residual: metric is not positive definite");
  KktResidual r;
  const Vec res = (h + lambda * m) * x + g;
  r.stationarity = std::sqrt(std::max(0.0, res.dot(llt.solve(res))));
  const double xn = std::sqrt(std::max(0.0, x.dot(m * x)));
  r.feasibility = std::max(0.0, xn - radius);
  r.complementarity = std::abs(lambda * (xn - radius));
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(h + lambda * m, m, Eigen::EigenvaluesOnly);
  r.min_eig_shift = ges.eigenvalues()(0);
  return r;
}

}  // namespace gltr::oracle
