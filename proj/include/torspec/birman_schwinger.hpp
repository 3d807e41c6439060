// birman_schwinger.hpp — Nyström discretization of the eigenvalue-counting
// operator, dense and symmetry-reduced counting paths, eigenvalue localization.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "torspec/friedrichs.hpp"
#include "torspec/quadrature.hpp"
#include "torspec/torus.hpp"

namespace torspec {

// How the fiber determinant entering the sandwiched kernel is evaluated:
//   matched    — same-grid midpoint sum (pairs exactly with the direct oracle;
//                the finite-dimensional counting identity is then exact),
//   integrated — Richardson-extrapolated fiber integral (higher accuracy,
//                default for physical counts).
enum class DeltaMode { matched, integrated };

struct BSOptions {
  int n{16};                          // nodes per axis (even)
  DeltaMode delta_mode{DeltaMode::integrated};
  QuadratureSpec quad{{16, 32, 64}};  // integrated-mode fiber quadrature
  bool normalized_measure{false};
  int threads{1};                     // row-parallel assembly; output identical
};

// ---- node indexing shared by the dense and reduced paths ------------------

// Flat enumeration of the n^3 product grid together with the orbit structure
// of the full cubic symmetry group acting on node triples.
class GridIndex {
 public:
  explicit GridIndex(int n);

  int n() const { return n_; }
  std::int64_t size() const { return static_cast<std::int64_t>(n_) * n_ * n_; }
  int orbits() const { return orbits_; }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<std::int32_t>& orbit_of() const { return orbit_of_; }
  const std::vector<std::int64_t>& orbit_size() const { return orbit_size_; }
  const std::vector<std::int64_t>& rep_flat() const { return rep_flat_; }

  Vec3 point(std::int64_t flat) const;
  // midpoint-cosine table between node i and node j (one axis, shared by all)
  const std::vector<double>& midcos() const { return midcos_; }

 private:
  int n_;
  int orbits_;
  std::vector<double> nodes_;
  std::vector<std::int32_t> orbit_of_;    // flat index -> orbit id
  std::vector<std::int64_t> orbit_size_;  // orbit id -> cardinality
  std::vector<std::int64_t> rep_flat_;    // orbit id -> representative flat index
  std::vector<double> midcos_;            // n x n, row-major
};

// ---- dense operator (full product grid) -----------------------------------

struct CountResult {
  std::int64_t count{0};
  double z{0.0};
  Side side{Side::below};
  int n{0};
  double min_abs_delta{0.0};  // smallest |Delta| over nodes (diagnostic)
};

// Dense symmetric Nyström matrix of the sandwiched counting operator at
// spectral parameter z outside the band.  Entry (i,j):
//   (mu^2/2) sqrt(w_i w_j) [s Delta_i]^{-1/2} [s Delta_j]^{-1/2} / (w2_ij - z),
// s = +1 below the band, -1 above.  Throws SignConditionError when any node
// violates the required sign of Delta (z inside or too close to the essential
// spectrum at this resolution).
class NystromOperator {
 public:
  NystromOperator(const ModelParams& p, double z, Side side, const BSOptions& opt);

  std::int64_t dim() const { return N_; }
  const std::vector<double>& matrix() const { return mat_; }
  double z() const { return z_; }
  Side side() const { return side_; }
  // Smallest |Delta| over nodes: how close z sits to the essential spectrum
  // at this resolution.
  double min_abs_delta() const { return min_abs_delta_; }

  // Number of eigenvalues strictly greater than lambda (exact inertia count).
  std::int64_t count_above(double lambda) const;
  // Full ascending spectrum (small grids; for tests and verification).
  std::vector<double> eigenvalues() const;
  // max_ij |K_ij - K_ji| (identically 0 by construction; kept for reporting)
  double symmetry_defect() const;

 private:
  std::int64_t N_;
  double z_;
  Side side_;
  double min_abs_delta_{0.0};
  double defect_{0.0};
  std::vector<double> mat_;
};

// Counting path dispatch:
//   n <= kDenseMaxN  — dense matrix + inertia (counts the full operator),
//   larger n        — CapacityError; use the symmetric-channel counter.
inline constexpr int kDenseMaxN = 24;

CountResult count_discrete(const ModelParams& p, double z, const BSOptions& opt);

// ---- symmetric-channel reduced counter ------------------------------------

// Exact compression of the counting operator to the subspace of functions
// invariant under the full cubic symmetry group (the channel that carries the
// near-threshold spectrum at the couplings studied here).  Feasible to n = 96
// on a small machine; counts in this channel are exact eigenvalue counts of
// the compressed operator.
class ChannelCounter {
 public:
  ChannelCounter(const ModelParams& p, const BSOptions& opt);

  // Counts of channel eigenvalues > 1 at each z (all on one side).
  std::vector<CountResult> counts(const std::vector<double>& zs, Side side);

  int reduced_dim() const { return grid_.orbits(); }

 private:
  std::vector<double> assemble(double z, Side side,
                               const std::vector<double>& sq_orbit);
  std::vector<double> delta_orbits(const std::vector<double>& zs, Side side) const;

  ModelParams p_;
  BSOptions opt_;
  GridIndex grid_;
};

// ---- localization and residual verification -------------------------------

struct LocateOptions {
  BSOptions bs{};
  double tol{1e-8};
  std::int64_t max_count{64};
};

// Individual eigenvalues of the operator in a window disjoint from the
// essential band, found by bisection on the monotone counting function.
std::vector<double> locate_eigenvalues(const ModelParams& p, double a, double b,
                                       const LocateOptions& opt);

// Builds the non-symmetric transfer matrix at z (diagonal Delta^{-1} times the
// smoothing kernel) and returns min_i |lambda_i - 1| over its eigenvalues:
// small exactly when z is an eigenvalue of the underlying operator at this
// resolution.
double verify_faddeev(const ModelParams& p, double z, const BSOptions& opt);

}  // namespace torspec
