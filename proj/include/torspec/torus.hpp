// torus.hpp — geometry and multiplication symbols on the 3-torus (-pi, pi]^3.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "torspec/errors.hpp"

namespace torspec {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Symbol range constants: eps in [0, 6], one-particle symbol eps+gamma,
// two-particle symbol in [0, 18].
inline constexpr double kBandTop = 18.0;
inline constexpr double kMirrorGammaSum = 12.0;  // gamma + gamma* = 12 pairs mirror-dual models

using Vec3 = std::array<double, 3>;

inline constexpr Vec3 kZero{0.0, 0.0, 0.0};
inline constexpr Vec3 kCorner{kPi, kPi, kPi};

// ---- canonical representatives -------------------------------------------

// Wrap a scalar into the canonical cell (-pi, pi].
inline double wrap_angle(double x) {
  x = std::fmod(x, kTwoPi);
  if (x <= -kPi) x += kTwoPi;
  else if (x > kPi) x -= kTwoPi;
  return x;
}

inline Vec3 canonical(const Vec3& k) {
  return {wrap_angle(k[0]), wrap_angle(k[1]), wrap_angle(k[2])};
}

inline Vec3 add(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec3 scale(const Vec3& a, double c) { return {c * a[0], c * a[1], c * a[2]}; }

// The involution exchanging the two band edges: each coordinate shifts by pi,
// staying in the canonical cell. Applied twice it is the identity.
inline Vec3 mirror(const Vec3& k) {
  Vec3 r;
  for (int i = 0; i < 3; ++i) r[i] = (k[i] > 0.0) ? k[i] - kPi : k[i] + kPi;
  return r;
}

// ---- dispersion and multiplication symbols -------------------------------

// Lattice kinetic energy, range [0, 6]; minimum at 0, maximum at (pi,pi,pi).
inline double eps(const Vec3& k) {
  return 3.0 - std::cos(k[0]) - std::cos(k[1]) - std::cos(k[2]);
}

// One-particle channel symbol.
inline double w1(const Vec3& k, double gamma) { return eps(k) + gamma; }

// Half the shortest angular displacement from k to p, per coordinate.
// Ties (antipodal coordinates) contribute the average of the two branch limits,
// which makes the midpoint cosine vanish there.
inline double midpoint_cos(double ki, double pi_) {
  double d = wrap_angle(pi_ - ki);
  if (std::fabs(std::fabs(d) - kPi) < 1e-12) return 0.0;
  return std::cos(ki + 0.5 * d);
}

// Two-particle channel symbol: eps(k) + eps(geodesic midpoint) + eps(p).
// Symmetric in (k, p); satisfies w2(mirror k, mirror p) = 18 - w2(k, p).
inline double w2(const Vec3& k, const Vec3& p) {
  double acc = eps(k) + eps(p) + 3.0;
  for (int i = 0; i < 3; ++i) acc -= midpoint_cos(k[i], p[i]);
  return acc;
}

// Smooth chart for fiber integrals: t = k + s with s in the open cell.
// W(k, s) = w2(k, k + s) without ever touching the antipodal seam.
inline double w2_shifted(const Vec3& k, const Vec3& s) {
  double acc = eps(k) + 6.0;
  for (int i = 0; i < 3; ++i)
    acc -= std::cos(k[i] + 0.5 * s[i]) + std::cos(k[i] + s[i]);
  return acc;
}

// ---- cubic-symmetry orbit -------------------------------------------------

// All distinct images of k under coordinate permutations and sign flips
// (full cubic group, order 48), canonicalized and deduplicated.
std::vector<Vec3> symmetry_orbit(const Vec3& k, double tol = 1e-12);

// ---- per-fiber band edges -------------------------------------------------

struct BandEdges {
  double lo{0.0};  // min over t of w2(k, t)
  double hi{0.0};  // max over t of w2(k, t)
};

// Extrema of t -> w2(k, t). The symbol is separable per coordinate in the
// shifted chart, so this reduces to three 1-D optimizations solved to
// near machine precision (dense scan + Newton polish).
BandEdges band_edges(const Vec3& k);

// Extrema of w2 over both arguments; analytically (0, 18), computed here by
// symmetry-reduced 1-D search + refinement.
BandEdges global_band_edges();

}  // namespace torspec
