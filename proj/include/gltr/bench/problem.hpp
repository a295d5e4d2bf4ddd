#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gltr::bench {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Smooth unconstrained problem min f(x). The metric pair defines the
/// trust-region norm; leave both empty for the Euclidean norm.
struct NlpProblem {
  std::string name;
  Vec x0;
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad;
  std::function<Vec(const Vec&, const Vec&)> hess_vec;  // (x, v) -> H(x) v
  std::function<Vec(const Vec&)> metric;
  std::function<Vec(const Vec&)> metric_inv;
  std::optional<double> delta0;     // overrides 1/sqrt(n)
  std::optional<Vec> known_minimizer;

  std::size_t dim() const { return static_cast<std::size_t>(x0.size()); }
  Vec apply_metric(const Vec& v) const { return metric ? metric(v) : v; }
  Vec apply_metric_inv(const Vec& v) const { return metric_inv ? metric_inv(v) : v; }
  /// Column-by-column assembly through hess_vec.
  Mat dense_hessian(const Vec& x) const;
  Mat dense_metric() const;
};

/// Largest relative deviation between grad(x) and central differences of f,
/// measured against max{1, ||grad(x)||_inf}.
double gradient_check(const NlpProblem& p, const Vec& x, double step = 1e-6);

/// Throws std::invalid_argument when the check at x0 exceeds 1e-5.
void validate(const NlpProblem& p);

}  // namespace gltr::bench
