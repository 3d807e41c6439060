// friedrichs.hpp — fiber determinant, dispersion branch, essential spectrum,
// critical couplings.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torspec/quadrature.hpp"
#include "torspec/torus.hpp"

namespace torspec {

struct ModelParams {
  double mu{0.0};     // off-diagonal coupling strength, > 0
  double gamma{6.0};  // one-particle channel energy shift
};

enum class Side { below, above };

struct Interval {
  double lo{0.0}, hi{0.0};
};

// ---- fiber determinant ----------------------------------------------------

// Scalar determinant of the rank-one-perturbed fiber at momentum k:
//   Delta(k; z) = w1(k) - z - (mu^2/2) * I(k; z),
// strictly decreasing in z on each component of the band complement.
// Wraps a cached integrator so sweeps in z at fixed k are cheap.
class FiberDeterminant {
 public:
  FiberDeterminant(const Vec3& k, const ModelParams& p, const QuadratureSpec& spec = {});

  double operator()(double z) const;
  const BandEdges& band() const { return band_; }
  const Vec3& k() const { return integ_.k(); }

  // Unique zero on the requested side of this fiber's band, to abs tol,
  // or nullopt when the determinant does not change sign there.
  std::optional<double> root(Side side, double tol = 1e-10) const;

 private:
  FiberIntegrator integ_;
  ModelParams p_;
  BandEdges band_;
};

// One-shot evaluation.
double delta(const Vec3& k, double z, const ModelParams& p, const QuadratureSpec& spec = {});

// ---- dispersion branch over all fibers ------------------------------------

struct BranchResult {
  bool exists{false};
  Interval hull{};        // [min, max] over fibers of the side root
  Vec3 arg_lo{}, arg_hi{};  // fibers attaining the hull endpoints
  int fibers_with_root{0};
};

struct BranchOptions {
  int kgrid{16};           // fiber sweep nodes per axis (even)
  QuadratureSpec quad{{16, 32, 64}};
  double root_tol{1e-10};
  bool polish{true};       // refine hull endpoints over continuous k
};

// Sweep the symmetry-reduced fiber grid (plus the two extremal symmetry
// points), collect side roots of the fiber determinant, and return their hull.
BranchResult two_particle_branch(Side side, const ModelParams& p,
                                 const BranchOptions& opt = {});

// ---- essential spectrum ---------------------------------------------------

struct EssentialSpectrum {
  std::vector<Interval> intervals;  // disjoint, ascending, at most three
  Interval band{0.0, kBandTop};     // two-particle band component
  BranchResult below, above;        // branch components before merging
};

EssentialSpectrum essential_spectrum(const ModelParams& p, const BranchOptions& opt = {});

// ---- critical couplings ---------------------------------------------------

// Coupling at which the determinant develops a zero-energy threshold zero:
//   side below: mu_l0(gamma) = sqrt(2*gamma / J0), gamma > 0,
//   side above: mu_r0(gamma) = sqrt((24 - 2*gamma) / J0), gamma < 12,
// with J0 = I(0; 0).  They satisfy mu_r0(gamma) = mu_l0(12 - gamma).
double critical_mu(Side side, double gamma, const QuadratureSpec& spec = {});

struct CriticalConstants {
  double J0{0.0};      // fiber integral at the lower threshold
  double mu0{0.0};     // sqrt(12 / J0): both thresholds critical at gamma = 6
  double gamma0{0.0};  // below-branch classification threshold (at mu_r0)
  double gamma1{0.0};  // above-branch classification threshold (at mu_l0)
  Vec3 k0{}, k1{};     // extremal fibers defining gamma0, gamma1
  int iters0{0}, iters1{0};
};

// Fixed-point computation of gamma0 / gamma1 with the extremal fiber located
// by symmetry-reduced search; throws ConvergenceFailure if the iteration
// does not settle to 1e-8.
CriticalConstants critical_constants(const QuadratureSpec& spec = {}, int kgrid = 8);

// ---- regime classification ------------------------------------------------

struct Classification {
  std::vector<Interval> intervals;
  std::string label;      // "band-only" | "below-merged" | "below-split" |
                          // "above-merged" | "above-split" | "both-split" ...
  EssentialSpectrum ess;
};

// Describe the interval structure of the essential spectrum at (mu, gamma).
// merge_tol decides whether a branch hull touching the band is merged.
Classification classify_bands(const ModelParams& p, const BranchOptions& opt = {},
                              double merge_tol = 1e-9);

// Merge a set of closed intervals (helper shared with tests).
std::vector<Interval> merge_intervals(std::vector<Interval> v, double touch_tol = 0.0);

}  // namespace torspec
