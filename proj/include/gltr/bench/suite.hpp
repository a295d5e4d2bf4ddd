#pragma once

#include <cstdint>
#include <vector>

#include "gltr/bench/problem.hpp"

namespace gltr::bench {

NlpProblem rosenbrock();                   // 2-d, from (-1.2, 1)
NlpProblem extended_rosenbrock(std::size_t n);  // n even
NlpProblem beale();
NlpProblem powell_singular();
/// 1/2 x'Ax + b'x with eigenvalues of A spread over [1e-2, 1e2].
NlpProblem convex_quadratic(std::size_t n, std::uint64_t seed);
/// 1/2 x'Ax + b'x + mu/4 ||x||^4 with A indefinite.
NlpProblem indefinite_quartic(std::size_t n, std::uint64_t seed, double mu = 1.0);
/// Same form with a simple most negative eigenvalue of A and b orthogonal to
/// its eigenvector, started at x0 = 0 so the first subproblem is a hard case.
NlpProblem hard_case_quartic(std::size_t n, std::uint64_t seed);
/// SPD quadratic where most eigenvalues are tiny but positive.
NlpProblem ill_conditioned_quadratic(std::size_t n, std::uint64_t seed);

/// Every problem above plus 1-d and 2-d control problems; all pass validate().
std::vector<NlpProblem> suite(std::uint64_t seed = 1);

}  // namespace gltr::bench
