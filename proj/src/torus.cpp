// torus.cpp — symmetry orbits and band-edge searches.
#include "torspec/torus.hpp"

#include <algorithm>
#include <cmath>

namespace torspec {

std::vector<Vec3> symmetry_orbit(const Vec3& k, double tol) {
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<Vec3> out;
  out.reserve(48);
  for (const auto& pm : perms) {
    for (int smask = 0; smask < 8; ++smask) {
      Vec3 img;
      for (int i = 0; i < 3; ++i) {
        double v = k[pm[i]];
        if (smask & (1 << i)) v = -v;
        img[i] = wrap_angle(v);
      }
      bool dup = false;
      for (const auto& e : out) {
        if (std::fabs(e[0] - img[0]) < tol && std::fabs(e[1] - img[1]) < tol &&
            std::fabs(e[2] - img[2]) < tol) {
          dup = true;
          break;
        }
      }
      if (!dup) out.push_back(img);
    }
  }
  std::sort(out.begin(), out.end(), [](const Vec3& a, const Vec3& b) {
    if (a[0] != b[0]) return a[0] < b[0];
    if (a[1] != b[1]) return a[1] < b[1];
    return a[2] < b[2];
  });
  return out;
}

namespace {

// Per-coordinate contribution to the shifted-chart symbol:
//   g(s) = (1 - cos(a + s/2)) + (1 - cos(a + s)),  s in [-pi, pi].
// At |s| = pi the first term uses the branch value cos(a ± pi/2), which equals
// the tie-average of the seam, so the closed-interval extrema are the correct
// essential extrema of the coordinate factor.
struct Extrema1D {
  double lo, hi;
};

Extrema1D coord_extrema(double a) {
  auto g = [a](double s) {
    return 2.0 - std::cos(a + 0.5 * s) - std::cos(a + s);
  };
  auto dg = [a](double s) {
    return 0.5 * std::sin(a + 0.5 * s) + std::sin(a + s);
  };
  auto ddg = [a](double s) {
    return 0.25 * std::cos(a + 0.5 * s) + std::cos(a + s);
  };
  constexpr int kScan = 512;
  double lo = g(-kPi), hi = lo;
  double lo_s = -kPi, hi_s = -kPi;
  for (int i = 1; i <= kScan; ++i) {
    double s = -kPi + kTwoPi * i / kScan;
    double v = g(s);
    if (v < lo) { lo = v; lo_s = s; }
    if (v > hi) { hi = v; hi_s = s; }
  }
  // Newton polish of interior extrema (derivative root), clamped to the cell.
  for (double* sp : {&lo_s, &hi_s}) {
    double s = *sp;
    for (int it = 0; it < 40; ++it) {
      double d1 = dg(s), d2 = ddg(s);
      if (std::fabs(d2) < 1e-14) break;
      double step = d1 / d2;
      s -= step;
      if (s < -kPi) s = -kPi;
      if (s > kPi) s = kPi;
      if (std::fabs(step) < 1e-14) break;
    }
    *sp = s;
  }
  lo = std::min(lo, g(lo_s));
  hi = std::max(hi, g(hi_s));
  return {lo, hi};
}

}  // namespace

BandEdges band_edges(const Vec3& k) {
  double lo = eps(k), hi = eps(k);
  for (int i = 0; i < 3; ++i) {
    Extrema1D e = coord_extrema(k[i]);
    lo += e.lo;
    hi += e.hi;
  }
  return {lo, hi};
}

BandEdges global_band_edges() {
  // Edges as functions of k are again separable: per coordinate minimize /
  // maximize q(a) = (1 - cos a) + extremum_s g_a(s).  1-D scan + golden polish.
  auto q = [](double a, bool want_min) {
    Extrema1D e = coord_extrema(a);
    return (1.0 - std::cos(a)) + (want_min ? e.lo : e.hi);
  };
  auto optimize = [&](bool want_min) {
    constexpr int kScan = 1024;
    double best = q(-kPi, want_min), best_a = -kPi;
    for (int i = 1; i <= kScan; ++i) {
      double a = -kPi + kTwoPi * i / kScan;
      double v = q(a, want_min);
      bool better = want_min ? (v < best) : (v > best);
      if (better) { best = v; best_a = a; }
    }
    // Golden-section refinement around the scan winner.
    double span = kTwoPi / kScan;
    double a_lo = best_a - span, a_hi = best_a + span;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = a_hi - gr * (a_hi - a_lo), d = a_lo + gr * (a_hi - a_lo);
    double fc = q(c, want_min), fd = q(d, want_min);
    for (int it = 0; it < 80; ++it) {
      bool pick_c = want_min ? (fc < fd) : (fc > fd);
      if (pick_c) {
        a_hi = d; d = c; fd = fc;
        c = a_hi - gr * (a_hi - a_lo);
        fc = q(c, want_min);
      } else {
        a_lo = c; c = d; fc = fd;
        d = a_lo + gr * (a_hi - a_lo);
        fd = q(d, want_min);
      }
    }
    double mid = 0.5 * (a_lo + a_hi);
    double v = q(mid, want_min);
    return want_min ? std::min(best, v) : std::max(best, v);
  };
  double lo = 3.0 * optimize(true);
  double hi = 3.0 * optimize(false);
  return {lo, hi};
}

}  // namespace torspec
