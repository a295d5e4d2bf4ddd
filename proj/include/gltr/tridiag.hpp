#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gltr {

/// Symmetric tridiagonal matrix grown one row at a time.
///
/// offdiag()[j-1] couples rows j-1 and j. A Krylov restart opens a new
/// irreducible block; the coupling across a block boundary is stored as 0.
class TriMatrix {
 public:
  TriMatrix() = default;
  /// Throws std::invalid_argument on inconsistent sizes, a nonzero coupling
  /// across a block boundary, or a zero coupling inside a block.
  TriMatrix(std::vector<double> diag, std::vector<double> offdiag,
            std::vector<std::size_t> block_starts = {0});

  std::size_t size() const { return diag_.size(); }
  bool empty() const { return diag_.empty(); }
  std::span<const double> diag() const { return diag_; }
  std::span<const double> offdiag() const { return offdiag_; }
  std::span<const std::size_t> block_starts() const { return starts_; }

  std::size_t num_blocks() const { return starts_.size(); }
  std::size_t block_begin(std::size_t k) const { return starts_.at(k); }
  std::size_t block_end(std::size_t k) const;
  TriMatrix block(std::size_t k) const;

  /// Append a row to the current block. gamma is ignored for the first row.
  void push_back(double delta, double gamma);
  /// Append a row that opens a new block.
  void start_block(double delta);

  /// Copy with diag + shift.
  TriMatrix plus_diagonal(std::span<const double> shift) const;

  std::vector<double> multiply(std::span<const double> x) const;

  /// max(|lo|, |hi|) of the Gershgorin interval; used as the scale of T.
  double norm_estimate() const;

 private:
  std::vector<double> diag_;
  std::vector<double> offdiag_;
  std::vector<std::size_t> starts_;
};

/// Pivots and multipliers of T + shift*I = L D L^T (no pivoting).
struct LdlFactor {
  double shift = 0.0;
  std::vector<double> pivots;
  std::vector<double> multipliers;  // multipliers[j-1] = L(j, j-1)
  /// First interior pivot that is <= 0, if any. Factorization stops there.
  std::optional<std::size_t> failed_at;

  bool complete() const { return !failed_at.has_value(); }
  bool positive_definite() const;
  /// Index of the first pivot <= 0 including the last one, if any.
  std::optional<std::size_t> first_nonpositive() const;
};

class IndefiniteError : public std::runtime_error {
 public:
  explicit IndefiniteError(std::size_t index);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct PivotDerivatives {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

LdlFactor ldlt_shifted(const TriMatrix& t, double shift);

/// Grow a factor of the leading (n-1)x(n-1) part of t to all of t.
/// Returns nullopt when the old factor does not fit.
std::optional<LdlFactor> extend_factor(const LdlFactor& prev, const TriMatrix& t);

/// Last pivot d(theta) of T - theta*I with up to `order` derivatives.
/// nullopt stands for -infinity: some interior pivot is <= 0.
std::optional<PivotDerivatives> last_pivot(const TriMatrix& t, double theta, int order = 2);

/// (theta - pole) * d(theta) where d continues the pivot recurrence through
/// negative interior pivots. With pole at the smallest eigenvalue of the
/// leading (n-1)x(n-1) block this removes the pole of d. nullopt only when
/// an interior pivot is exactly zero.
std::optional<PivotDerivatives> lifted_last_pivot(const TriMatrix& t, double theta, double pole,
                                                  int order = 2);

std::pair<double, double> gershgorin(const TriMatrix& t);

struct EigSearch {
  double theta = 0.0;
  int iterations = 0;
};

/// Smallest eigenvalue of an irreducible T by safeguarded root finding on
/// the last pivot. With `pole` (smallest eigenvalue of T minus its last row
/// and column) the lifted function drives the model steps instead.
EigSearch smallest_eig_search(const TriMatrix& t, std::optional<double> pole = std::nullopt);
double smallest_eig(const TriMatrix& t, std::optional<double> pole = std::nullopt);

/// Unit eigenvector for an (approximate) eigenvalue theta; first clearly
/// nonzero component is positive. Throws std::runtime_error when the
/// residual does not drop below 1e-8 ||T|| within 50 sweeps.
std::vector<double> inverse_iteration(const TriMatrix& t, double theta);

/// Solve (T + lambda*I) x = rhs. Throws IndefiniteError when T + lambda*I
/// is not positive definite.
std::vector<double> solve_shifted(const TriMatrix& t, double lambda, std::span<const double> rhs);

/// Solve with an existing positive definite factor.
std::vector<double> ldl_solve(const LdlFactor& f, std::span<const double> rhs);

/// x^T (T + shift)^{-1} x via ||L^{-1} x||^2_{D^{-1}}.
double inverse_quadratic_form(const LdlFactor& f, std::span<const double> x);

}  // namespace gltr
