// asymptotics.hpp — the model operator governing near-threshold eigenvalue
// accumulation: angular-sector reduction, linear-growth constant U, and the
// logarithmic fit of counting data against the distance to a band edge.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "torspec/errors.hpp"

namespace torspec {

// Rotation-invariant kernel S(t; y) = (25 / (8 pi^2 sqrt 6)) / (5 cosh y + t),
// t = inner product of two unit vectors (in [-1, 1]), y = radial log-distance.
// Strictly positive: 5 cosh y >= 5 > 1 >= |t|.
double sobolev_kernel(double t, double y);

// Angular reduction: s_l(y) = 2 pi * Integral_{-1}^{1} P_l(t) S(t; y) dt,
// entering with multiplicity 2l+1.  Gauss-Legendre evaluation, absolute
// accuracy 1e-12 over the ranges used here.
double sector_kernel(int l, double y);

// Closed forms for l = 0, 1 (log1p-based; the naive log-ratio form loses all
// precision once 5 cosh y approaches 1/eps).  DomainError for other l.
double sector_kernel_closed(int l, double y);

// One radial truncation of the model operator.
struct SectorSpec {
  double r{40.0};  // radial interval length (0, r)
  int n_x{320};    // nodes; resolution must scale with r (n_x >= 8 r)
  int l_max{16};   // highest angular sector evaluated (>= 8)
};

// Default spec at radius r: n_x = ceil(8 r), l_max = 16.
SectorSpec make_sector_spec(double r);

struct SectorCountDetail {
  std::int64_t total{0};
  std::vector<std::int64_t> per_sector;  // n(lambda, sector l), l = 0..l_max
  double lmax_norm{0.0};                 // spectral norm of the last sector
  double tail_bound{0.0};                // Frobenius bound on discarded sectors
};

// Number of eigenvalues > lambda of the radially truncated operator,
// summed over angular sectors with their multiplicities.  The truncation is
// certified, not assumed: throws TruncationError if the last sector still has
// norm >= lambda or if the decay-based tail bound is not below lambda / 2.
std::int64_t count_S(double lambda, const SectorSpec& spec);
SectorCountDetail count_S_detail(double lambda, const SectorSpec& spec);

struct UEstimate {
  double value{0.0};     // half the least-squares slope of count vs r
  double residual{0.0};  // root-mean-square fit residual (counts)
  std::vector<double> r_list;
  std::vector<std::int64_t> counts;
};

// Half the growth rate of the truncated counting function in the radius —
// the constant multiplying |log|z|| in the accumulation law.
UEstimate U_estimate(double lambda, const std::vector<double>& r_list);

// Least-squares fit of counting data N(z) against |log|z - threshold||.
struct LogFit {
  double threshold{0.0};
  std::vector<std::pair<double, std::int64_t>> samples;  // (z, N)
  double slope{0.0};
  double intercept{0.0};
  double residual{0.0};      // RMS residual of the fit
  double slope_stderr{0.0};  // standard error of the slope estimate
  std::pair<double, double> window{0.0, 0.0};  // min/max |z - threshold|
};

// Requires >= 4 samples (InsufficientData), all strictly on one side of the
// threshold with distinct distances, N nondecreasing toward the threshold.
LogFit fit_log_asymptotics(
    const std::vector<std::pair<double, std::int64_t>>& samples,
    double threshold);

}  // namespace torspec
