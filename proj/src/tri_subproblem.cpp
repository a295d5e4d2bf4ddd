#include "gltr/tri_subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gltr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBoundaryTol = 1e-10;
constexpr int kNewtonMaxIter = 100;

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

std::vector<double> neg_gradient(std::size_t n, double gamma0) {
  std::vector<double> r(n, 0.0);
  if (n > 0) r[0] = -gamma0;
  return r;
}

struct Shifted {
  LdlFactor factor;
  std::vector<double> h;
  double norm = 0.0;
};

// Factor of T + lambda*I, reusing the cached one when it matches.
LdlFactor factor_at(const TriMatrix& t, double lambda, const WarmStart* warm) {
  if (warm && warm->factor_cache && warm->factor_cache->shift == lambda) {
    const LdlFactor& c = *warm->factor_cache;
    if (c.pivots.size() == t.size() && c.complete()) return c;
    if (auto grown = extend_factor(c, t)) return *grown;
  }
  return ldlt_shifted(t, lambda);
}

std::optional<Shifted> shifted_solution(const TriMatrix& t, double gamma0, double lambda,
                                        const WarmStart* warm = nullptr) {
  LdlFactor f = factor_at(t, lambda, warm);
  if (!f.positive_definite()) return std::nullopt;
  auto h = ldl_solve(f, neg_gradient(t.size(), gamma0));
  const double n = norm2(h);
  return Shifted{std::move(f), std::move(h), n};
}

// Smallest shift >= base at which T + shift*I factors as positive definite.
double first_definite_shift(const TriMatrix& t, double base) {
  const double step = kEps * std::max(1.0, t.norm_estimate());
  double lambda = base;
  for (int k = 0; k < 200; ++k) {
    if (ldlt_shifted(t, lambda).positive_definite()) return lambda;
    lambda = base + std::ldexp(step, k);
  }
  throw std::runtime_error("no positive definite shift found");
}

double smallest_over_blocks(const TriMatrix& t) {
  double theta = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.num_blocks(); ++k) theta = std::min(theta, smallest_eig(t.block(k)));
  return theta;
}

// Pick the sign of alpha in base + alpha*v with the smaller objective; ties go to +.
std::vector<double> fill_with_eigenvector(const TriMatrix& t, double gamma0,
                                          std::vector<double> base, std::span<const double> v,
                                          double alpha, double* obj) {
  auto plus = base;
  auto minus = std::move(base);
  for (std::size_t j = 0; j < v.size(); ++j) {
    plus[j] += alpha * v[j];
    minus[j] -= alpha * v[j];
  }
  const double qp = objective(t, gamma0, plus);
  const double qm = objective(t, gamma0, minus);
  if (qm < qp) {
    *obj = qm;
    return minus;
  }
  *obj = qp;
  return plus;
}

}  // namespace

const char* to_string(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::interior: return "interior";
    case SolutionStatus::boundary: return "boundary";
    case SolutionStatus::hard_case: return "hard_case";
    case SolutionStatus::near_hard_case: return "near_hard_case";
  }
  return "unknown";
}

double objective(const TriMatrix& t, double gamma0, std::span<const double> h) {
  if (h.empty()) return 0.0;
  const auto th = t.multiply(h);
  return 0.5 * dot(h, th) + gamma0 * h[0];
}

double stationarity_residual(const TriMatrix& t, double gamma0, std::span<const double> h,
                             double lambda) {
  auto r = t.multiply(h);
  for (std::size_t j = 0; j < r.size(); ++j) r[j] += lambda * h[j];
  if (!r.empty()) r[0] += gamma0;
  return norm2(r);
}

SubproblemSolution solve(const TriMatrix& t, double gamma0, double radius, const WarmStart* warm) {
  if (t.empty()) throw std::invalid_argument("solve: empty tridiagonal matrix");
  if (!(radius > 0.0)) throw std::invalid_argument("solve: radius must be positive");
  if (!(gamma0 >= 0.0)) throw std::invalid_argument("solve: gamma0 must be nonnegative");
  if (t.num_blocks() > 1) return solve_blocks(t, gamma0, radius);

  const std::size_t n = t.size();
  if (auto s0 = shifted_solution(t, gamma0, 0.0, warm); s0 && s0->norm <= radius) {
    SubproblemSolution out;
    out.objective = objective(t, gamma0, s0->h);
    out.h = std::move(s0->h);
    out.factor = std::move(s0->factor);
    out.status = SolutionStatus::interior;
    if (warm && warm->prev_dim == n) out.theta_min = warm->prev_theta_min;
    return out;
  }

  const WarmStart none;
  const NewtonStart start = newton_init(t, warm ? *warm : none, gamma0, radius);
  const auto s = shifted_solution(t, gamma0, start.lambda);
  if (s && s->norm < radius * (1.0 - kBoundaryTol) && start.theta_min) {
    return near_hard(t, gamma0, radius, *start.theta_min);
  }
  SubproblemSolution out = solve_easy(t, gamma0, radius, start.lambda);
  out.theta_min = start.theta_min;
  if (!out.theta_min && warm && warm->prev_dim == n) out.theta_min = warm->prev_theta_min;
  return out;
}

SubproblemSolution solve_easy(const TriMatrix& t, double gamma0, double radius, double lambda0,
                              std::vector<double>* lambda_trace) {
  // Newton on 1/||h|| - 1/radius, safeguarded by a bracket: ||h|| > radius
  // (or T + lambda I indefinite) at lo, ||h|| < radius at hi.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double lo = lambda0;
  double hi = kInf;
  double lambda = lambda0;
  int growth = 0;
  std::optional<Shifted> cur;
  std::optional<Shifted> at_hi;
  bool converged = false;
  int it = 0;
  auto widen = [&](double from, double step) {
    return from + std::max(std::abs(step), std::ldexp(kEps * std::max(1.0, std::abs(from)), growth++));
  };
  for (; it <= kNewtonMaxIter; ++it) {
    if (lambda_trace) lambda_trace->push_back(lambda);
    cur = shifted_solution(t, gamma0, lambda);
    if (!cur) {
      if (it == 0) throw std::invalid_argument("solve_easy: T + lambda0*I is not definite");
      lo = lambda;
      lambda = std::isfinite(hi) ? 0.5 * (lo + hi) : widen(lambda, 0.0);
      continue;
    }
    const double err = cur->norm - radius;
    const double q = inverse_quadratic_form(cur->factor, cur->h);
    const double step = err / radius * (cur->norm * cur->norm) / q;
    if (std::abs(err) <= kBoundaryTol * radius) {
      // One more step is nearly free and removes the dependence on lambda0.
      if (std::isfinite(step) && lambda + step != lambda) {
        if (auto polished = shifted_solution(t, gamma0, lambda + step);
            polished && std::abs(polished->norm - radius) <= std::abs(err)) {
          lambda += step;
          cur = std::move(polished);
        }
      }
      converged = true;
      break;
    }
    if (err > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
      at_hi = cur;
    }
    if (std::isfinite(hi) && hi - lo <= 4.0 * kEps * std::max(1.0, std::abs(hi))) break;
    const double cand = lambda + step;
    if (std::isfinite(cand) && cand > lo && cand < hi) {
      lambda = cand;
    } else if (std::isfinite(hi)) {
      lambda = 0.5 * (lo + hi);
    } else {
      lambda = widen(lambda, step);
    }
  }

  SubproblemSolution out;
  out.newton_iterations = it;
  if (!converged && at_hi) {
    // ||h(lambda)|| jumps over the radius between neighbouring doubles:
    // take the short side and fill up along the leftmost eigenvector.
    lambda = hi;
    cur = std::move(at_hi);
    const auto v = inverse_iteration(t, smallest_eig(t));
    const double hv = dot(cur->h, v);
    const double r2 = cur->norm * cur->norm - radius * radius;
    const double disc = std::sqrt(std::max(0.0, hv * hv - r2));
    // Both roots of ||h + alpha v|| = radius; keep the lower objective.
    auto plus = cur->h, minus = cur->h;
    for (std::size_t j = 0; j < v.size(); ++j) {
      plus[j] += (-hv + disc) * v[j];
      minus[j] += (-hv - disc) * v[j];
    }
    const double qp = objective(t, gamma0, plus);
    const double qm = objective(t, gamma0, minus);
    out.h = qm < qp ? std::move(minus) : std::move(plus);
    out.objective = std::min(qp, qm);
    out.lambda = lambda;
    out.factor = std::move(cur->factor);
    out.status = SolutionStatus::near_hard_case;
    return out;
  }
  out.lambda = lambda;
  out.objective = objective(t, gamma0, cur->h);
  out.h = std::move(cur->h);
  out.factor = std::move(cur->factor);
  out.status = SolutionStatus::boundary;
  return out;
}

NewtonStart newton_init(const TriMatrix& t, const WarmStart& warm, double gamma0, double radius) {
  const std::size_t n = t.size();
  std::vector<double> candidates;
  if (warm.prev_lambda > 0.0) candidates.push_back(warm.prev_lambda);
  candidates.push_back(0.0);
  for (double c : candidates) {
    const auto s = shifted_solution(t, gamma0, c, &warm);
    if (s && s->norm >= radius) return {c, std::nullopt};
  }

  double theta;
  if (warm.prev_dim == n && warm.prev_theta_min) {
    theta = *warm.prev_theta_min;
  } else {
    std::optional<double> pole;
    if (warm.prev_dim > 0 && warm.prev_dim + 1 == n) pole = warm.prev_theta_min;
    theta = smallest_eig(t, pole);
  }
  return {first_definite_shift(t, std::max(0.0, -theta)), theta};
}

SubproblemSolution solve_blocks(const TriMatrix& t, double gamma0, double radius) {
  const std::size_t nb = t.num_blocks();
  const double tie = 1e-12 * std::max(1.0, t.norm_estimate());
  std::size_t ell = 0;
  double theta_ell = smallest_eig(t.block(0));
  for (std::size_t k = 1; k < nb; ++k) {
    const double th = smallest_eig(t.block(k));
    if (th < theta_ell - tie) {
      theta_ell = th;
      ell = k;
    }
  }

  const TriMatrix first = t.block(0);
  const SubproblemSolution sub = solve(first, gamma0, radius);

  SubproblemSolution out;
  out.h.assign(t.size(), 0.0);
  out.theta_min = std::min(theta_ell, sub.theta_min.value_or(theta_ell));
  out.newton_iterations = sub.newton_iterations;

  const bool first_block_wins = ell == 0 || sub.lambda >= -theta_ell;
  std::optional<std::vector<double>> shifted;
  if (!first_block_wins) {
    try {
      shifted = solve_shifted(first, -theta_ell, neg_gradient(first.size(), gamma0));
    } catch (const IndefiniteError&) {
      // theta_ell is numerically tied with the first block.
    }
  }
  if (!shifted) {
    std::copy(sub.h.begin(), sub.h.end(), out.h.begin());
    out.lambda = sub.lambda;
    out.status = sub.status;
    // The gradient misses the leftmost eigenspace whenever it lies outside
    // the first block, even if the first block's multiplier covers it.
    if (ell != 0 && sub.status == SolutionStatus::boundary) out.status = SolutionStatus::hard_case;
    out.objective = objective(t, gamma0, out.h);
    return out;
  }

  std::copy(shifted->begin(), shifted->end(), out.h.begin());
  const auto v_block = inverse_iteration(t.block(ell), theta_ell);
  std::vector<double> v(t.size(), 0.0);
  std::copy(v_block.begin(), v_block.end(), v.begin() + static_cast<std::ptrdiff_t>(t.block_begin(ell)));
  const double rest = radius * radius - std::pow(norm2(*shifted), 2);
  const double alpha = std::sqrt(std::max(0.0, rest));
  out.h = fill_with_eigenvector(t, gamma0, std::move(out.h), v, alpha, &out.objective);
  out.lambda = -theta_ell;
  out.status = SolutionStatus::hard_case;
  return out;
}

SubproblemSolution near_hard(const TriMatrix& t, double gamma0, double radius, double theta_min) {
  const double base = std::max(0.0, -theta_min);
  const double shift = first_definite_shift(t, base + 1e-14 * t.norm_estimate());
  auto x = solve_shifted(t, shift, neg_gradient(t.size(), gamma0));
  const auto v = inverse_iteration(t, theta_min);
  const double c = dot(x, v);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] -= c * v[j];
  const double rest = radius * radius - std::pow(norm2(x), 2);
  const double alpha = std::sqrt(std::max(0.0, rest));

  SubproblemSolution out;
  out.h = fill_with_eigenvector(t, gamma0, std::move(x), v, alpha, &out.objective);
  out.lambda = base;
  out.status = SolutionStatus::near_hard_case;
  out.theta_min = theta_min;
  return out;
}

std::vector<double> convexify(const TriMatrix& t, double eps, double sigma) {
  const auto diag = t.diag();
  const auto off = t.offdiag();
  std::vector<double> d(diag.size(), 0.0);
  double pivot = 0.0;
  for (std::size_t j = 0; j < diag.size(); ++j) {
    const double coupling = j == 0 ? 0.0 : off[j - 1] * off[j - 1] / pivot;
    const double raw = diag[j] - coupling;
    if (raw < eps) d[j] = std::max(sigma * std::abs(raw), 2.0 * eps - raw);
    pivot = raw + d[j];
  }
  return d;
}

SubproblemSolution resolve_radius(const TriMatrix& t, double gamma0, double new_radius,
                                  const WarmStart& warm) {
  return solve(t, gamma0, new_radius, &warm);
}

WarmStart warm_start_from(const SubproblemSolution& s, std::size_t dim,
                          const std::optional<double>& prev_hat_theta_min) {
  WarmStart w;
  w.prev_lambda = s.lambda;
  w.prev_theta_min = s.theta_min;
  w.prev_hat_theta_min = prev_hat_theta_min;
  w.prev_dim = dim;
  w.factor_cache = s.factor;
  return w;
}

std::vector<double> trace_shifted_min(const TriMatrix& t, double gamma0, double lambda) {
  return solve_shifted(t, lambda, neg_gradient(t.size(), gamma0));
}

BandSolution trace_band(const TriMatrix& t, double gamma0, double lower, double upper) {
  if (!(lower > 0.0) || !(upper >= lower)) throw std::invalid_argument("trace_band: need 0 < lower <= upper");
  const double target = 0.5 * (lower + upper);
  const double lo = std::max(0.0, -smallest_over_blocks(t));
  double left = lo;
  double right = std::numeric_limits<double>::infinity();
  double lambda = lo + std::sqrt(target * std::max(gamma0, kEps));

  for (int it = 1; it <= 300; ++it) {
    const auto s = lambda > lo || lo == 0.0 ? shifted_solution(t, gamma0, lambda) : std::nullopt;
    if (!s) {
      left = std::max(left, lambda);
      lambda = std::isfinite(right) ? 0.5 * (left + right) : 2.0 * lambda + 1.0;
      continue;
    }
    const double ratio = lambda / s->norm;
    if (ratio >= lower && ratio <= upper) return {lambda, s->h, ratio, it};
    if (ratio < target) {
      left = lambda;
    } else {
      right = lambda;
    }
    const double q = inverse_quadratic_form(s->factor, s->h);
    const double slope = 1.0 / s->norm + lambda * q / std::pow(s->norm, 3);
    const double cand = lambda - (ratio - target) / slope;
    if (std::isfinite(cand) && cand > left && cand < right) {
      lambda = cand;
    } else if (std::isfinite(right)) {
      lambda = 0.5 * (left + right);
    } else {
      lambda = std::max(2.0 * lambda, lambda + 1.0);
    }
  }
  throw std::runtime_error("trace_band: band not reached");
}

}  // namespace gltr
