#include "gltr/bench/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gltr::bench {

Mat NlpProblem::dense_hessian(const Vec& x) const {
  const auto n = x.size();
  Mat h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) h.col(j) = hess_vec(x, Vec::Unit(n, j));
  return 0.5 * (h + h.transpose());
}

Mat NlpProblem::dense_metric() const {
  const auto n = x0.size();
  Mat m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = apply_metric(Vec::Unit(n, j));
  return 0.5 * (m + m.transpose());
}

double gradient_check(const NlpProblem& p, const Vec& x, double step) {
  const Vec g = p.grad(x);
  const double scale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double hi = step * std::max(1.0, std::abs(x(i)));
    Vec xp = x, xm = x;
    xp(i) += hi;
    xm(i) -= hi;
    const double fd = (p.f(xp) - p.f(xm)) / (2.0 * hi);
    worst = std::max(worst, std::abs(fd - g(i)) / scale);
  }
  return worst;
}

void validate(const NlpProblem& p) {
  if (!p.f || !p.grad || !p.hess_vec) throw std::invalid_argument(p.name + ": missing evaluator");
  if (p.x0.size() == 0) throw std::invalid_argument(p.name + ": empty start point");
  const double err = gradient_check(p, p.x0);
  if (!(err <= 1e-5))
    throw std::invalid_argument(p.name + ": gradient check failed (" + std::to_string(err) + ")");
}

}  // namespace gltr::bench
