#pragma once

#include <cstddef>
#include <memory>

#include "gltr/bench/problem.hpp"

namespace gltr::bench {

/// Reduced linear-quadratic control problem on the unit interval (dims = 1)
/// or unit square (dims = 2):
///   min 1/2 ||y - y_d||_M^2 + beta/2 ||u - u_d||_M^2   with  A y = M u,
/// A = K + M, K the Neumann stiffness matrix and M the lumped mass matrix
/// on a uniform mesh with mesh_n cells per direction. The state is
/// eliminated, y = A^{-1} M u.
///
/// The trust region uses the norm of W = M + M A^{-1} M A^{-1} M, the
/// graph norm of (y, u) in the mass inner product. Linear solves use sparse
/// Cholesky factorizations of A and of A M^{-1} A + M, computed once.
///
/// Throws std::invalid_argument for mesh_n < 8, beta <= 0 or dims not 1 or 2.
NlpProblem control_problem(std::size_t mesh_n, double beta, int dims = 1);

}  // namespace gltr::bench
