#include "gltr/bench/suite.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include "gltr/bench/control_problem.hpp"

namespace gltr::bench {
namespace {

Mat random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ();
}

Vec random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

NlpProblem quadratic(std::string name, const Mat& a, const Vec& b) {
  NlpProblem p;
  p.name = std::move(name);
  p.x0 = Vec::Zero(b.size());
  p.f = [a, b](const Vec& x) { return 0.5 * x.dot(a * x) + b.dot(x); };
  p.grad = [a, b](const Vec& x) { return Vec(a * x + b); };
  p.hess_vec = [a](const Vec&, const Vec& v) { return Vec(a * v); };
  return p;
}

NlpProblem quartic(std::string name, const Mat& a, const Vec& b, double mu) {
  NlpProblem p;
  p.name = std::move(name);
  p.x0 = Vec::Zero(b.size());
  p.f = [a, b, mu](const Vec& x) {
    const double r2 = x.squaredNorm();
    return 0.5 * x.dot(a * x) + b.dot(x) + 0.25 * mu * r2 * r2;
  };
  p.grad = [a, b, mu](const Vec& x) { return Vec(a * x + b + mu * x.squaredNorm() * x); };
  p.hess_vec = [a, mu](const Vec& x, const Vec& v) {
    return Vec(a * v + mu * (x.squaredNorm() * v + 2.0 * x.dot(v) * x));
  };
  return p;
}

/// f = sum_i r_i(x)^2 with residuals, gradients and Hessians supplied per
/// residual.
struct Residual {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

NlpProblem least_squares(std::string name, Vec x0, std::vector<Residual> res) {
  NlpProblem p;
  p.name = std::move(name);
  p.x0 = std::move(x0);
  p.f = [res](const Vec& x) {
    double s = 0.0;
    for (const auto& r : res) s += r.value(x) * r.value(x);
    return s;
  };
  p.grad = [res](const Vec& x) {
    Vec g = Vec::Zero(x.size());
    for (const auto& r : res) g += 2.0 * r.value(x) * r.grad(x);
    return g;
  };
  p.hess_vec = [res](const Vec& x, const Vec& v) {
    Vec out = Vec::Zero(x.size());
    for (const auto& r : res) {
      const Vec j = r.grad(x);
      out += 2.0 * (j.dot(v) * j + r.value(x) * (r.hess(x) * v));
    }
    return out;
  };
  return p;
}

}  // namespace

NlpProblem rosenbrock() {
  NlpProblem p = extended_rosenbrock(2);
  p.name = "rosenbrock";
  p.known_minimizer = Vec::Ones(2);
  return p;
}

NlpProblem extended_rosenbrock(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("extended_rosenbrock: n must be even");
  NlpProblem p;
  p.name = "ext_rosenbrock_" + std::to_string(n);
  p.x0.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.x0.size(); i += 2) {
    p.x0(i) = -1.2;
    p.x0(i + 1) = 1.0;
  }
  p.known_minimizer = Vec::Ones(static_cast<Eigen::Index>(n));
  p.f = [](const Vec& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); i += 2) {
      const double a = x(i + 1) - x(i) * x(i);
      const double b = 1.0 - x(i);
      s += 100.0 * a * a + b * b;
    }
    return s;
  };
  p.grad = [](const Vec& x) {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); i += 2) {
      const double a = x(i + 1) - x(i) * x(i);
      g(i) = -400.0 * x(i) * a - 2.0 * (1.0 - x(i));
      g(i + 1) = 200.0 * a;
    }
    return g;
  };
  p.hess_vec = [](const Vec& x, const Vec& v) {
    Vec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); i += 2) {
      const double h11 = 1200.0 * x(i) * x(i) - 400.0 * x(i + 1) + 2.0;
      const double h12 = -400.0 * x(i);
      out(i) = h11 * v(i) + h12 * v(i + 1);
      out(i + 1) = h12 * v(i) + 200.0 * v(i + 1);
    }
    return out;
  };
  return p;
}

NlpProblem beale() {
  std::vector<Residual> res;
  for (int k = 1; k <= 3; ++k) {
    const double c = k == 1 ? 1.5 : k == 2 ? 2.25 : 2.625;
    res.push_back({
        [c, k](const Vec& x) { return c - x(0) * (1.0 - std::pow(x(1), k)); },
        [k](const Vec& x) {
          return Vec{{-(1.0 - std::pow(x(1), k)), x(0) * k * std::pow(x(1), k - 1)}};
        },
        [k](const Vec& x) {
          const double cross = k * std::pow(x(1), k - 1);
          const double yy = k > 1 ? x(0) * k * (k - 1) * std::pow(x(1), k - 2) : 0.0;
          return Mat{{0.0, cross}, {cross, yy}};
        },
    });
  }
  NlpProblem p = least_squares("beale", Vec{{1.0, 1.0}}, std::move(res));
  p.known_minimizer = Vec{{3.0, 0.5}};
  return p;
}

NlpProblem powell_singular() {
  const double s5 = std::sqrt(5.0);
  const double s10 = std::sqrt(10.0);
  const Vec u{{0.0, 1.0, -2.0, 0.0}};
  const Vec w{{1.0, 0.0, 0.0, -1.0}};
  std::vector<Residual> res;
  res.push_back({[](const Vec& x) { return x(0) + 10.0 * x(1); },
                 [](const Vec&) { return Vec{{1.0, 10.0, 0.0, 0.0}}; },
                 [](const Vec&) { return Mat(Mat::Zero(4, 4)); }});
  res.push_back({[s5](const Vec& x) { return s5 * (x(2) - x(3)); },
                 [s5](const Vec&) { return Vec{{0.0, 0.0, s5, -s5}}; },
                 [](const Vec&) { return Mat(Mat::Zero(4, 4)); }});
  res.push_back({[u](const Vec& x) { return std::pow(u.dot(x), 2); },
                 [u](const Vec& x) { return Vec(2.0 * u.dot(x) * u); },
                 [u](const Vec&) { return Mat(2.0 * u * u.transpose()); }});
  res.push_back({[s10, w](const Vec& x) { return s10 * std::pow(w.dot(x), 2); },
                 [s10, w](const Vec& x) { return Vec(2.0 * s10 * w.dot(x) * w); },
                 [s10, w](const Vec&) { return Mat(2.0 * s10 * w * w.transpose()); }});
  NlpProblem p = least_squares("powell_singular", Vec{{3.0, -1.0, 0.0, 1.0}}, std::move(res));
  p.known_minimizer = Vec::Zero(4);
  return p;
}

NlpProblem convex_quadratic(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(n);
  const Mat q = random_orthogonal(m, rng);
  const Vec eig = Vec::LinSpaced(m, -2.0, 2.0).unaryExpr([](double t) { return std::pow(10.0, t); });
  const Mat a = q * eig.asDiagonal() * q.transpose();
  NlpProblem p = quadratic("convex_quadratic_" + std::to_string(n), 0.5 * (a + a.transpose()), random_vector(m, rng));
  return p;
}

NlpProblem indefinite_quartic(std::size_t n, std::uint64_t seed, double mu) {
  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(n);
  const Mat q = random_orthogonal(m, rng);
  const Vec eig = Vec::LinSpaced(m, -5.0, 5.0);
  const Mat a = q * eig.asDiagonal() * q.transpose();
  return quartic("indefinite_quartic_" + std::to_string(n), 0.5 * (a + a.transpose()), random_vector(m, rng), mu);
}

NlpProblem hard_case_quartic(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("hard_case_quartic: n must be at least 2");
  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(n);
  const Mat q = random_orthogonal(m, rng);
  Vec eig = Vec::LinSpaced(m, -1.0, 4.0);
  eig(0) = -2.0;
  const Mat a = q * eig.asDiagonal() * q.transpose();
  Vec b = random_vector(m, rng);
  b -= b.dot(q.col(0)) * q.col(0);
  b *= 0.05 / b.norm();
  return quartic("hard_case_quartic_" + std::to_string(n), 0.5 * (a + a.transpose()), b, 1.0);
}

NlpProblem ill_conditioned_quadratic(std::size_t n, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("ill_conditioned_quadratic: n must be at least 4");
  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(n);
  const Mat q = random_orthogonal(m, rng);
  Vec eig(m);
  const Eigen::Index small = 3 * m / 4;
  for (Eigen::Index i = 0; i < m; ++i) {
    eig(i) = i < small ? std::pow(10.0, -6.0 + static_cast<double>(i) / static_cast<double>(small))
                       : std::pow(10.0, -1.0 + static_cast<double>(i - small) / static_cast<double>(m - small));
  }
  const Mat a = q * eig.asDiagonal() * q.transpose();
  return quadratic("ill_conditioned_" + std::to_string(n), 0.5 * (a + a.transpose()), random_vector(m, rng));
}

std::vector<NlpProblem> suite(std::uint64_t seed) {
  std::vector<NlpProblem> out;
  out.push_back(rosenbrock());
  out.push_back(extended_rosenbrock(10));
  out.push_back(beale());
  out.push_back(powell_singular());
  out.push_back(convex_quadratic(30, seed));
  out.push_back(indefinite_quartic(30, seed + 1));
  out.push_back(hard_case_quartic(20, seed + 2));
  out.push_back(ill_conditioned_quadratic(40, seed + 3));
  out.push_back(control_problem(32, 1e-4, 1));
  out.push_back(control_problem(8, 1e-4, 2));
  for (const auto& p : out) validate(p);
  return out;
}

}  // namespace gltr::bench
