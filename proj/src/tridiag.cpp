#include "gltr/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gltr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double converged_width(double theta) { return 1e-14 * std::max(1.0, std::abs(theta)); }

// Pivot recurrence of T - theta*I with first and second derivatives.
// `strict` stops at the first nonpositive interior pivot (Sturm reading);
// otherwise the recurrence continues and only an exact zero stops it.
std::optional<PivotDerivatives> pivot_recurrence(const TriMatrix& t, double theta, bool strict) {
  const auto diag = t.diag();
  const auto off = t.offdiag();
  double d = diag[0] - theta;
  double d1 = -1.0;
  double d2 = 0.0;
  for (std::size_t j = 1; j < diag.size(); ++j) {
    if (strict ? d <= 0.0 : d == 0.0) return std::nullopt;
    const double g2 = off[j - 1] * off[j - 1];
    const double nd = (diag[j] - theta) - g2 / d;
    const double nd1 = -1.0 + g2 * d1 / (d * d);
    const double nd2 = g2 * (d2 * d - 2.0 * d1 * d1) / (d * d * d);
    d = nd;
    d1 = nd1;
    d2 = nd2;
  }
  return PivotDerivatives{d, d1, d2};
}

// Step from theta to the smaller root of -s^2 + f1*s + f, the model whose
// leading term matches the -theta^2 growth of the lifted function.
std::optional<double> asymptotic_model_step(const PivotDerivatives& f) {
  const double disc = f.first * f.first + 4.0 * f.value;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  if (f.first + root > 0.0) return -2.0 * f.value / (f.first + root);
  return 0.5 * (f.first - root);
}

// Root of f + f1*s + f2*s^2/2 nearest to s = 0, falling back to Newton.
std::optional<double> local_model_step(const PivotDerivatives& f) {
  const double disc = f.first * f.first - 2.0 * f.second * f.value;
  if (f.second != 0.0 && disc >= 0.0) {
    const double q = -0.5 * (f.first + std::copysign(std::sqrt(disc), f.first));
    if (q != 0.0) {
      const double s1 = q / (0.5 * f.second);
      const double s2 = f.value / q;
      return std::abs(s1) < std::abs(s2) ? s1 : s2;
    }
  }
  if (f.first == 0.0) return std::nullopt;
  return -f.value / f.first;
}

}  // namespace

TriMatrix::TriMatrix(std::vector<double> diag, std::vector<double> offdiag,
                     std::vector<std::size_t> block_starts)
    : diag_(std::move(diag)), offdiag_(std::move(offdiag)), starts_(std::move(block_starts)) {
  if (diag_.empty()) {
    if (!offdiag_.empty()) throw std::invalid_argument("TriMatrix: offdiag without diag");
    starts_.clear();
    return;
  }
  if (offdiag_.size() + 1 != diag_.size())
    throw std::invalid_argument("TriMatrix: offdiag must have size n-1");
  if (starts_.empty() || starts_.front() != 0)
    throw std::invalid_argument("TriMatrix: first block must start at 0");
  for (std::size_t k = 1; k < starts_.size(); ++k) {
    if (starts_[k] <= starts_[k - 1] || starts_[k] >= diag_.size())
      throw std::invalid_argument("TriMatrix: block starts must increase inside [0, n)");
  }
  std::size_t next = 1;
  for (std::size_t j = 1; j < diag_.size(); ++j) {
    const bool boundary = next < starts_.size() && starts_[next] == j;
    if (boundary) {
      ++next;
      if (offdiag_[j - 1] != 0.0)
        throw std::invalid_argument("TriMatrix: nonzero coupling across a block boundary");
    } else if (offdiag_[j - 1] == 0.0) {
      throw std::invalid_argument("TriMatrix: zero coupling inside a block at row " +
                                  std::to_string(j));
    }
  }
}

std::size_t TriMatrix::block_end(std::size_t k) const {
  return k + 1 < starts_.size() ? starts_.at(k + 1) : diag_.size();
}

TriMatrix TriMatrix::block(std::size_t k) const {
  const std::size_t b = block_begin(k);
  const std::size_t e = block_end(k);
  std::vector<double> d(diag_.begin() + b, diag_.begin() + e);
  std::vector<double> o(offdiag_.begin() + b, offdiag_.begin() + (e - 1));
  return TriMatrix(std::move(d), std::move(o));
}

void TriMatrix::push_back(double delta, double gamma) {
  if (diag_.empty()) {
    diag_.push_back(delta);
    starts_ = {0};
    return;
  }
  if (gamma == 0.0) throw std::invalid_argument("TriMatrix: zero coupling inside a block");
  offdiag_.push_back(gamma);
  diag_.push_back(delta);
}

void TriMatrix::start_block(double delta) {
  if (diag_.empty()) {
    push_back(delta, 0.0);
    return;
  }
  starts_.push_back(diag_.size());
  offdiag_.push_back(0.0);
  diag_.push_back(delta);
}

TriMatrix TriMatrix::plus_diagonal(std::span<const double> shift) const {
  if (shift.size() != diag_.size()) throw std::invalid_argument("plus_diagonal: size mismatch");
  TriMatrix out = *this;
  for (std::size_t j = 0; j < shift.size(); ++j) out.diag_[j] += shift[j];
  return out;
}

std::vector<double> TriMatrix::multiply(std::span<const double> x) const {
  const std::size_t n = diag_.size();
  if (x.size() != n) throw std::invalid_argument("TriMatrix::multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    double v = diag_[j] * x[j];
    if (j > 0) v += offdiag_[j - 1] * x[j - 1];
    if (j + 1 < n) v += offdiag_[j] * x[j + 1];
    y[j] = v;
  }
  return y;
}

double TriMatrix::norm_estimate() const {
  if (diag_.empty()) return 0.0;
  const auto [lo, hi] = gershgorin(*this);
  return std::max(std::abs(lo), std::abs(hi));
}

bool LdlFactor::positive_definite() const {
  return complete() && (pivots.empty() || pivots.back() > 0.0);
}

std::optional<std::size_t> LdlFactor::first_nonpositive() const {
  if (failed_at) return failed_at;
  if (!pivots.empty() && !(pivots.back() > 0.0)) return pivots.size() - 1;
  return std::nullopt;
}

IndefiniteError::IndefiniteError(std::size_t index)
    : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(index) +
                         " is not positive"),
      index_(index) {}

LdlFactor ldlt_shifted(const TriMatrix& t, double shift) {
  LdlFactor f;
  f.shift = shift;
  const auto diag = t.diag();
  const auto off = t.offdiag();
  if (diag.empty()) return f;
  f.pivots.reserve(diag.size());
  f.multipliers.reserve(diag.size() - 1);
  double d = diag[0] + shift;
  f.pivots.push_back(d);
  for (std::size_t j = 1; j < diag.size(); ++j) {
    if (!(d > 0.0)) {
      f.failed_at = j - 1;
      return f;
    }
    const double l = off[j - 1] / d;
    f.multipliers.push_back(l);
    d = diag[j] + shift - l * off[j - 1];
    f.pivots.push_back(d);
  }
  return f;
}

std::optional<LdlFactor> extend_factor(const LdlFactor& prev, const TriMatrix& t) {
  const std::size_t n = t.size();
  if (n == 0 || !prev.complete() || prev.pivots.size() + 1 != n) return std::nullopt;
  LdlFactor f = prev;
  if (n == 1) {
    f.pivots.push_back(t.diag()[0] + f.shift);
    return f;
  }
  const double dprev = f.pivots.back();
  if (!(dprev > 0.0)) {
    f.failed_at = n - 2;
    return f;
  }
  const double gamma = t.offdiag()[n - 2];
  const double l = gamma / dprev;
  f.multipliers.push_back(l);
  f.pivots.push_back(t.diag()[n - 1] + f.shift - l * gamma);
  return f;
}

std::optional<PivotDerivatives> last_pivot(const TriMatrix& t, double theta, int /*order*/) {
  if (t.empty()) throw std::invalid_argument("last_pivot: empty matrix");
  return pivot_recurrence(t, theta, true);
}

std::optional<PivotDerivatives> lifted_last_pivot(const TriMatrix& t, double theta, double pole,
                                                  int /*order*/) {
  if (t.empty()) throw std::invalid_argument("lifted_last_pivot: empty matrix");
  const auto d = pivot_recurrence(t, theta, false);
  if (!d) return std::nullopt;
  const double w = theta - pole;
  return PivotDerivatives{w * d->value, d->value + w * d->first, 2.0 * d->first + w * d->second};
}

std::pair<double, double> gershgorin(const TriMatrix& t) {
  const auto diag = t.diag();
  const auto off = t.offdiag();
  if (diag.empty()) throw std::invalid_argument("gershgorin: empty matrix");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t j = 0; j < diag.size(); ++j) {
    double r = 0.0;
    if (j > 0) r += std::abs(off[j - 1]);
    if (j + 1 < diag.size()) r += std::abs(off[j]);
    lo = std::min(lo, diag[j] - r);
    hi = std::max(hi, diag[j] + r);
  }
  return {lo, hi};
}

EigSearch smallest_eig_search(const TriMatrix& t, std::optional<double> pole) {
  const std::size_t n = t.size();
  if (n == 0) throw std::invalid_argument("smallest_eig: empty matrix");
  if (n == 1) return {t.diag()[0], 0};

  auto [lower, upper] = gershgorin(t);
  if (pole && *pole > lower && *pole < upper) {
    // The pole bounds the root from above unless the caller's value is stale.
    const auto at_pole = last_pivot(t, *pole);
    if (!at_pole || at_pole->value < 0.0) upper = *pole;
  }

  constexpr int kMaxIter = 300;
  double theta = lower;
  for (int it = 1; it <= kMaxIter; ++it) {
    const auto d = last_pivot(t, theta);
    if (d && d->value == 0.0) return {theta, it};
    if (!d || d->value < 0.0) {
      upper = std::min(upper, theta);
    } else {
      lower = std::max(lower, theta);
    }
    if (upper - lower <= converged_width(theta)) return {0.5 * (lower + upper), it};

    std::optional<double> step;
    if (pole) {
      if (const auto f = lifted_last_pivot(t, theta, *pole)) {
        step = (upper - lower >= 0.1 * std::max(1.0, std::abs(theta))) ? asymptotic_model_step(*f)
                                                                        : local_model_step(*f);
      }
    } else if (d && d->first != 0.0) {
      step = -d->value / d->first;
    }

    if (step && std::isfinite(*step)) {
      const double cand = theta + *step;
      if (cand > lower && cand < upper) {
        if (std::abs(*step) <= converged_width(theta)) return {cand, it};
        theta = cand;
        continue;
      }
    }
    const double mid = 0.5 * (lower + upper);
    if (mid <= lower || mid >= upper) return {mid, it};
    theta = mid;
  }
  throw std::runtime_error("smallest_eig: root finding did not converge");
}

double smallest_eig(const TriMatrix& t, std::optional<double> pole) {
  return smallest_eig_search(t, pole).theta;
}

std::vector<double> inverse_iteration(const TriMatrix& t, double theta) {
  const std::size_t n = t.size();
  if (n == 0) throw std::invalid_argument("inverse_iteration: empty matrix");
  if (n == 1) return {1.0};

  const double scale = std::max(t.norm_estimate(), std::numeric_limits<double>::min());
  const double floor = kEps * scale;
  const auto diag = t.diag();
  const auto off = t.offdiag();

  // LDL^T of T - theta*I without pivoting; tiny pivots are nudged away from 0.
  std::vector<double> piv(n), mult(n - 1);
  double d = diag[0] - theta;
  for (std::size_t j = 0;; ++j) {
    if (std::abs(d) < floor) d = d < 0.0 ? -floor : floor;
    piv[j] = d;
    if (j + 1 == n) break;
    mult[j] = off[j] / d;
    d = diag[j + 1] - theta - mult[j] * off[j];
  }

  auto apply_inverse = [&](std::vector<double>& x) {
    for (std::size_t j = 1; j < n; ++j) x[j] -= mult[j - 1] * x[j - 1];
    for (std::size_t j = 0; j < n; ++j) x[j] /= piv[j];
    for (std::size_t j = n - 1; j-- > 0;) x[j] -= mult[j] * x[j + 1];
  };
  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    s = std::sqrt(s);
    for (double& v : x) v /= s;
  };

  // The last unit vector is never orthogonal to an eigenvector of an
  // irreducible tridiagonal matrix.
  std::vector<double> v(n, 0.0);
  v[n - 1] = 1.0;
  for (int sweep = 0; sweep < 50; ++sweep) {
    apply_inverse(v);
    normalize(v);
    const auto tv = t.multiply(v);
    double res = 0.0;
    for (std::size_t j = 0; j < n; ++j) res += (tv[j] - theta * v[j]) * (tv[j] - theta * v[j]);
    if (std::sqrt(res) <= 1e-8 * scale) {
      const auto lead = std::find_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-12; });
      if (lead != v.end() && *lead < 0.0)
        for (double& x : v) x = -x;
      return v;
    }
  }
  throw std::runtime_error("inverse_iteration: no convergence");
}

std::vector<double> ldl_solve(const LdlFactor& f, std::span<const double> rhs) {
  const std::size_t n = f.pivots.size();
  if (f.failed_at) throw IndefiniteError(*f.failed_at);
  if (auto bad = f.first_nonpositive()) throw IndefiniteError(*bad);
  if (rhs.size() != n) throw std::invalid_argument("ldl_solve: size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t j = 1; j < n; ++j) x[j] -= f.multipliers[j - 1] * x[j - 1];
  for (std::size_t j = 0; j < n; ++j) x[j] /= f.pivots[j];
  for (std::size_t j = n - 1; n > 0 && j-- > 0;) x[j] -= f.multipliers[j] * x[j + 1];
  return x;
}

std::vector<double> solve_shifted(const TriMatrix& t, double lambda, std::span<const double> rhs) {
  return ldl_solve(ldlt_shifted(t, lambda), rhs);
}

double inverse_quadratic_form(const LdlFactor& f, std::span<const double> x) {
  const std::size_t n = f.pivots.size();
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t j = 1; j < n; ++j) y[j] -= f.multipliers[j - 1] * y[j - 1];
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += y[j] * y[j] / f.pivots[j];
  return s;
}

}  // namespace gltr
