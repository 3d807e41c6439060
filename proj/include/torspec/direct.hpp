// direct.hpp — brute-force finite section of the full block operator.
// Independent oracle for counts and eigenvalues at small grid sizes: no
// determinant sandwich, no compression — just the operator matrix itself
// (dense for tiny grids, Schur-complement counting up to moderate ones).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torspec/birman_schwinger.hpp"
#include "torspec/friedrichs.hpp"

namespace torspec {

// One- plus two-particle sector matrix in an orthonormal basis.  The
// two-particle sector keeps only the upper triangle of the symmetric pair
// functions; off-diagonal pair basis vectors carry a sqrt(2) so the embedding
// is an isometry and every block is a plain matrix.
struct DirectMatrix {
  int n{0};
  std::int64_t dim1{0};  // n^3
  std::int64_t dim2{0};  // n^3 (n^3 + 1) / 2
  double band_fuzz{0.0};  // finite-section blur of the band edges: 5 * (2pi/n)
  bool normalized_measure{false};
  std::vector<double> mat;  // (dim1+dim2)^2, row-major, symmetric

  std::int64_t dim() const { return dim1 + dim2; }
};

// Largest total dimension the dense oracle is willing to allocate and solve.
inline constexpr std::int64_t kDirectDenseMaxDim = 6000;

// Assemble the full matrix.  mu = 0 is legal (block-diagonal case).
// Throws CapacityError when dim1+dim2 exceeds kDirectDenseMaxDim.
DirectMatrix build_direct_matrix(const ModelParams& p, int n,
                                 bool normalized_measure = false);

// All eigenvalues, ascending.
std::vector<double> direct_spectrum(const DirectMatrix& m);

// Number of eigenvalues strictly beyond z on the requested side, for z outside
// the blurred band cluster [0 - fuzz, 18 + fuzz].  Throws AmbiguityError when
// z falls inside the fuzz (a finite section cannot attribute such eigenvalues
// to band or discrete spectrum).
std::int64_t direct_count(const DirectMatrix& m, double z, Side side);
// Same, reusing a precomputed ascending spectrum.
std::int64_t direct_count(const std::vector<double>& spectrum, int n, double z,
                          Side side);

// Eigenvalue count of the same finite section computed through the Schur
// complement of the (diagonal) two-particle block: the one-particle-sector
// matrix w1 - z - coupling * resolvent, whose inertia plus the trivial
// diagonal counts gives the full count without materializing the big matrix.
// Reaches grids the dense route cannot (n up to 12).  Same fuzz refusal.
std::int64_t schur_count(const ModelParams& p, int n, double z, Side side,
                         bool normalized_measure = false);

// Finite-section band fuzz at grid size n.
double band_fuzz(int n);

// Binary dump: 16-byte header (rows, cols as little-endian 64-bit unsigned),
// then the matrix row-major as IEEE doubles.
void dump_matrix(const DirectMatrix& m, const std::string& path);
// Reads a dump back (header + payload; throws DomainError on malformed files).
std::vector<double> load_matrix(const std::string& path, std::uint64_t& rows,
                                std::uint64_t& cols);

}  // namespace torspec
