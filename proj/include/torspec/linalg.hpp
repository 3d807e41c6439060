// linalg.hpp — thin deterministic wrappers over LAPACK dense routines.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace torspec::linalg {

// All matrices are dense n x n, stored contiguously (row- vs column-major is
// immaterial for the symmetric routines; both triangles are always filled).

// Eigenvalues of a symmetric matrix, ascending. Input is copied.
std::vector<double> sym_eigenvalues(std::vector<double> a, int n);

struct Inertia {
  std::int64_t neg{0}, zero{0}, pos{0};
};

// Inertia of a symmetric matrix via Bunch–Kaufman factorization (in place;
// destroys a).  1x1 pivots with |d| <= zero_tol count as zero.
Inertia inertia(std::vector<double>& a, int n, double zero_tol = 0.0);

// Eigenvalues of a general (non-symmetric) matrix. Input is copied; a must be
// column-major (irrelevant for callers that only use the eigenvalue multiset
// of A and A^T alike, as here).
std::vector<std::complex<double>> gen_eigenvalues(std::vector<double> a, int n);

// Attempt a Cholesky factorization in place; true iff a is positive definite.
// Used as a cheap certificate that a shifted matrix has no eigenvalue past the
// shift (success proves the count is zero without a full inertia computation).
bool cholesky_spd(std::vector<double>& a, int n);

}  // namespace torspec::linalg
