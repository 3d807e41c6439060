// friedrichs.cpp — fiber determinant roots, branch sweeps, critical constants.
#include "torspec/friedrichs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace torspec {

FiberDeterminant::FiberDeterminant(const Vec3& k, const ModelParams& p,
                                   const QuadratureSpec& spec)
    : integ_(k, spec), p_(p), band_(band_edges(k)) {
  if (p.mu <= 0.0) throw DomainError("coupling mu must be positive");
}

double FiberDeterminant::operator()(double z) const {
  return w1(integ_.k(), p_.gamma) - z - 0.5 * p_.mu * p_.mu * integ_.value(z).value;
}

double delta(const Vec3& k, double z, const ModelParams& p, const QuadratureSpec& spec) {
  return FiberDeterminant(k, p, spec)(z);
}

std::optional<double> FiberDeterminant::root(Side side, double tol) const {
  const auto& f = *this;
  double edge = (side == Side::below) ? band_.lo : band_.hi;
  double at_edge = f(edge);
  // Delta is strictly decreasing in z away from the band; a side root exists
  // iff the edge value has the inner sign.  Edge values inside the snap window
  // are threshold-degenerate (root collides with the band edge, a resonance
  // rather than an isolated eigenvalue) and report as absent, so that exactly
  // critical couplings behave deterministically instead of turning on rounding.
  constexpr double kEdgeSnap = 1e-10;
  if (side == Side::below && at_edge >= -kEdgeSnap) return std::nullopt;
  if (side == Side::above && at_edge <= kEdgeSnap) return std::nullopt;
  double inner = edge, outer = edge;
  double step = 1.0;
  bool bracketed = false;
  for (int it = 0; it < 80; ++it) {
    outer = (side == Side::below) ? edge - step : edge + step;
    double v = f(outer);
    if ((side == Side::below && v > 0.0) || (side == Side::above && v < 0.0)) {
      bracketed = true;
      break;
    }
    step *= 2.0;
  }
  if (!bracketed)
    throw ConvergenceFailure("fiber root bracket expansion failed");
  // Bisection: maintain sign(f(outer)) = outer sign, sign(f(inner)) = inner sign.
  for (int it = 0; it < 200 && std::fabs(outer - inner) > tol; ++it) {
    double mid = 0.5 * (inner + outer);
    double v = f(mid);
    bool inner_sign = (side == Side::below) ? (v < 0.0) : (v > 0.0);
    if (inner_sign) inner = mid;
    else outer = mid;
  }
  return 0.5 * (inner + outer);
}

namespace {

// Symmetry-reduced fiber representatives: sorted triples of node magnitudes,
// plus the two extremal symmetry points of the cell.
std::vector<Vec3> fiber_wedge(int kgrid) {
  std::vector<double> nodes = shifted_nodes(kgrid);
  int m = kgrid / 2;
  std::vector<double> mag(m);
  for (int a = 0; a < m; ++a) mag[a] = nodes[m + a];  // positive nodes ascending
  std::vector<Vec3> reps;
  reps.reserve(m * (m + 1) * (m + 2) / 6 + 2);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b)
      for (int c = b; c < m; ++c) reps.push_back({mag[a], mag[b], mag[c]});
  reps.push_back(kZero);
  reps.push_back(kCorner);
  return reps;
}

double root_or_sentinel(const Vec3& k, Side side, const ModelParams& p,
                        const BranchOptions& opt, double sentinel) {
  FiberDeterminant fd(k, p, opt.quad);
  auto r = fd.root(side, opt.root_tol);
  return r ? *r : sentinel;
}

// Coordinatewise golden-section refinement of a hull endpoint over k.
Vec3 polish_arg(Vec3 k, bool maximize, Side side, const ModelParams& p,
                const BranchOptions& opt) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double sentinel = maximize ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
  auto obj = [&](const Vec3& q) { return root_or_sentinel(q, side, p, opt, sentinel); };
  double span = kTwoPi / opt.kgrid;
  for (int round = 0; round < 2; ++round) {
    for (int d = 0; d < 3; ++d) {
      double lo = k[d] - span, hi = k[d] + span;
      double c = hi - gr * (hi - lo), e = lo + gr * (hi - lo);
      Vec3 kc = k, ke = k;
      kc[d] = c; ke[d] = e;
      double fc = obj(kc), fe = obj(ke);
      for (int it = 0; it < 22; ++it) {
        bool pick_c = maximize ? (fc > fe) : (fc < fe);
        if (pick_c) {
          hi = e; e = c; fe = fc;
          c = hi - gr * (hi - lo);
          kc[d] = c; fc = obj(kc);
        } else {
          lo = c; c = e; fc = fe;
          e = lo + gr * (hi - lo);
          ke[d] = e; fe = obj(ke);
        }
      }
      k[d] = 0.5 * (lo + hi);
    }
    span *= 0.25;
  }
  return k;
}

}  // namespace

BranchResult two_particle_branch(Side side, const ModelParams& p,
                                 const BranchOptions& opt) {
  if (p.mu <= 0.0) throw DomainError("coupling mu must be positive");
  BranchResult res;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Vec3& k : fiber_wedge(opt.kgrid)) {
    FiberDeterminant fd(k, p, opt.quad);
    auto r = fd.root(side, opt.root_tol);
    if (!r) continue;
    ++res.fibers_with_root;
    if (*r < lo) { lo = *r; res.arg_lo = k; }
    if (*r > hi) { hi = *r; res.arg_hi = k; }
  }
  res.exists = res.fibers_with_root > 0;
  if (!res.exists) return res;
  if (opt.polish) {
    res.arg_lo = polish_arg(res.arg_lo, /*maximize=*/false, side, p, opt);
    res.arg_hi = polish_arg(res.arg_hi, /*maximize=*/true, side, p, opt);
    double plo = root_or_sentinel(res.arg_lo, side, p, opt, lo);
    double phi = root_or_sentinel(res.arg_hi, side, p, opt, hi);
    lo = std::min(lo, plo);
    hi = std::max(hi, phi);
  }
  res.hull = {lo, hi};
  return res;
}

std::vector<Interval> merge_intervals(std::vector<Interval> v, double touch_tol) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo;
  });
  std::vector<Interval> out;
  for (const Interval& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi + touch_tol)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

EssentialSpectrum essential_spectrum(const ModelParams& p, const BranchOptions& opt) {
  EssentialSpectrum es;
  es.below = two_particle_branch(Side::below, p, opt);
  es.above = two_particle_branch(Side::above, p, opt);
  std::vector<Interval> parts{es.band};
  if (es.below.exists) parts.push_back(es.below.hull);
  if (es.above.exists) parts.push_back(es.above.hull);
  es.intervals = merge_intervals(std::move(parts), 1e-12);
  return es;
}

double critical_mu(Side side, double gamma, const QuadratureSpec& spec) {
  double J0 = FiberIntegrator(kZero, spec).value(0.0).value;
  if (side == Side::below) {
    if (gamma <= 0.0)
      throw DomainError("below-side critical coupling requires gamma > 0");
    return std::sqrt(2.0 * gamma / J0);
  }
  if (gamma >= kMirrorGammaSum)
    throw DomainError("above-side critical coupling requires gamma < 12");
  return std::sqrt((2.0 * kMirrorGammaSum - 2.0 * gamma) / J0);
}

namespace {

// Extremal fiber of Delta(.; z_edge) over the symmetry wedge.  The binding
// fiber for branch detachment maximizes Delta at the bottom edge (largest
// below-root) and minimizes it at the top edge (smallest above-root).
Vec3 extremal_delta(double z_edge, const ModelParams& p, const QuadratureSpec& spec,
                    int kgrid, bool maximize) {
  Vec3 best{};
  double best_v = maximize ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
  for (const Vec3& k : fiber_wedge(kgrid)) {
    double v = delta(k, z_edge, p, spec);
    if (maximize ? (v > best_v) : (v < best_v)) { best_v = v; best = k; }
  }
  return best;
}

}  // namespace

CriticalConstants critical_constants(const QuadratureSpec& spec, int kgrid) {
  CriticalConstants cc;
  cc.J0 = FiberIntegrator(kZero, spec).value(0.0).value;
  cc.mu0 = std::sqrt(kMirrorGammaSum / cc.J0);  // both edges critical at gamma = 6
  // Below-branch threshold gamma0: the hull of the below branch touches the
  // band bottom when Delta(k0; 0) = 0 at mu = mu_r0(gamma), i.e.
  //   eps(k0) + gamma - (12 - gamma) * b = 0,  b = I(k0;0)/J0,
  // giving the fixed point gamma = (12*b - eps(k0)) / (1 + b),
  // where k0 maximizes Delta(.; 0).
  double gamma = 6.0;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    double mu = critical_mu(Side::above, gamma, spec);
    cc.k0 = extremal_delta(0.0, {mu, gamma}, spec, kgrid, /*maximize=*/true);
    double b = FiberIntegrator(cc.k0, spec).value(0.0).value / cc.J0;
    double next = (kMirrorGammaSum * b - eps(cc.k0)) / (1.0 + b);
    cc.iters0 = it + 1;
    if (std::fabs(next - gamma) <= 1e-8) { gamma = next; converged = true; break; }
    gamma = next;
  }
  if (!converged) throw ConvergenceFailure("gamma0 fixed point did not settle");
  cc.gamma0 = gamma;
  // Above-branch threshold gamma1: the hull of the above branch touches the
  // band top when Delta(k1; 18) = 0 at mu = mu_l0(gamma), giving
  //   gamma = (18 - eps(k1)) / (1 - I(k1;18)/J0),
  // where k1 minimizes Delta(.; 18) (the fiber with the lowest above-root).
  gamma = 6.0;
  converged = false;
  for (int it = 0; it < 50; ++it) {
    double mu = critical_mu(Side::below, gamma, spec);
    cc.k1 = extremal_delta(kBandTop, {mu, gamma}, spec, kgrid, /*maximize=*/false);
    double b = FiberIntegrator(cc.k1, spec).value(kBandTop).value / cc.J0;
    double next = (kBandTop - eps(cc.k1)) / (1.0 - b);
    cc.iters1 = it + 1;
    if (std::fabs(next - gamma) <= 1e-8) { gamma = next; converged = true; break; }
    gamma = next;
  }
  if (!converged) throw ConvergenceFailure("gamma1 fixed point did not settle");
  cc.gamma1 = gamma;
  return cc;
}

Classification classify_bands(const ModelParams& p, const BranchOptions& opt,
                              double merge_tol) {
  Classification c;
  c.ess = essential_spectrum(p, opt);
  std::string below_part, above_part;
  if (c.ess.below.exists && c.ess.below.hull.lo < -merge_tol)
    below_part = (c.ess.below.hull.hi >= -merge_tol) ? "below-merged" : "below-split";
  if (c.ess.above.exists && c.ess.above.hull.hi > kBandTop + merge_tol)
    above_part = (c.ess.above.hull.lo <= kBandTop + merge_tol) ? "above-merged"
                                                               : "above-split";
  if (below_part.empty() && above_part.empty()) c.label = "band-only";
  else if (above_part.empty()) c.label = below_part;
  else if (below_part.empty()) c.label = above_part;
  else c.label = below_part + "+" + above_part;
  c.intervals = c.ess.intervals;
  return c;
}

}  // namespace torspec
