#pragma once

#include <Eigen/Dense>

namespace gltr::oracle {

enum class Case { interior, easy, hard };

const char* to_string(Case c);

struct Solution {
  Eigen::VectorXd x;
  double lambda = 0.0;
  double objective = 0.0;
  Case kind = Case::interior;
};

/// Global minimizer of 1/2 <x,Hx> + <g,x> over ||x|| <= radius from a full
/// eigendecomposition. The hard case is declared when the gradient part on
/// the leftmost eigenspace is below 1e-13 ||g||; the eigenvector added there
/// is the normalized projection of the first unit vector that has one.
Solution solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, double radius);

/// Same with the norm ||x||_M, M symmetric positive definite.
Solution solve(const Eigen::MatrixXd& h, const Eigen::MatrixXd& m, const Eigen::VectorXd& g,
               double radius);

struct KktResidual {
  double stationarity = 0.0;   // ||(H + lambda M) x + g||_{M^-1}
  double feasibility = 0.0;    // max{0, ||x||_M - radius}
  double complementarity = 0.0;  // |lambda (||x||_M - radius)|
  double min_eig_shift = 0.0;  // smallest eigenvalue of H + lambda M relative to M
};

/// Throws std::invalid_argument when m is not positive definite.
KktResidual kkt_residual(const Eigen::MatrixXd& h, const Eigen::MatrixXd& m, const Eigen::VectorXd& g,
                         double radius, const Eigen::VectorXd& x, double lambda);

}  // namespace gltr::oracle
