// Fiber determinant, branch sweeps, critical constants, regime classification.
#include <cmath>
#include <random>

#include <doctest.h>

#include "torspec/friedrichs.hpp"

using namespace torspec;

namespace {
// Frozen reference values, all computed at the default quadrature ladder
// (32, 64, 128) by an independent implementation of the same integrals.
constexpr double kJ0 = 95.47006999944851;
constexpr double kMu0 = 0.3545332750360475;
constexpr double kGamma0 = -3.127352359755146;
constexpr double kGamma1 = 15.127352359755145;

BranchOptions probe_opts() {
  BranchOptions o;
  o.kgrid = 8;
  o.polish = false;  // raw sweep hull, matching the frozen probe values
  return o;
}
}  // namespace

TEST_CASE("critical coupling values and duality") {
  CHECK(critical_mu(Side::below, 6.0) == doctest::Approx(kMu0).epsilon(1e-12));
  CHECK(critical_mu(Side::above, 6.0) == doctest::Approx(kMu0).epsilon(1e-12));
  CHECK(critical_mu(Side::below, 3.0) ==
        doctest::Approx(0.2506928829342645).epsilon(1e-12));
  CHECK(critical_mu(Side::above, 2.0) ==
        doctest::Approx(0.4577004899636619).epsilon(1e-12));
  for (double g : {0.5, 2.0, 4.0, 6.0, 7.5, 10.0, 11.5}) {
    CHECK(critical_mu(Side::above, g) ==
          doctest::Approx(critical_mu(Side::below, kMirrorGammaSum - g))
              .epsilon(1e-13));
  }
  CHECK_THROWS_AS(critical_mu(Side::below, 0.0), DomainError);
  CHECK_THROWS_AS(critical_mu(Side::below, -1.0), DomainError);
  CHECK_THROWS_AS(critical_mu(Side::above, 12.0), DomainError);
  CHECK_THROWS_AS(critical_mu(Side::above, 13.0), DomainError);
}

TEST_CASE("critical constants settle on the extremal symmetry fibers") {
  const CriticalConstants cc = critical_constants();
  CHECK(cc.J0 == doctest::Approx(kJ0).epsilon(1e-9));
  CHECK(cc.mu0 == doctest::Approx(kMu0).epsilon(1e-12));
  CHECK(std::fabs(cc.gamma0 - kGamma0) <= 1e-9);
  CHECK(std::fabs(cc.gamma1 - kGamma1) <= 1e-9);
  // Exact mirror duality of the two classification thresholds.
  CHECK(std::fabs(cc.gamma0 + cc.gamma1 - kMirrorGammaSum) <= 1e-12);
  // Binding fibers: the far corner for the bottom edge, the origin for the top.
  CHECK(eps(cc.k0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(std::fabs(eps(cc.k1)) <= 1e-12);
  CHECK(cc.iters0 <= 5);
  CHECK(cc.iters1 <= 5);
}

TEST_CASE("determinant limits and the threshold zero") {
  // Vanishing coupling: the determinant degenerates to the free symbol.
  CHECK(delta(kZero, 0.0, {1e-9, 6.0}) == doctest::Approx(6.0).epsilon(1e-6));
  // At the critical coupling both edge determinants vanish by construction.
  const double mu0 = critical_mu(Side::below, 6.0);
  CHECK(std::fabs(delta(kZero, 0.0, {mu0, 6.0})) <= 1e-8);
  CHECK(std::fabs(delta(kCorner, kBandTop, {mu0, 6.0})) <= 1e-8);
}

TEST_CASE("determinant mirror identity on random samples") {
  std::mt19937_64 rng(777u);
  std::uniform_real_distribution<double> uk(-kPi, kPi), uz(-6.0, -0.1),
      um(0.1, 1.5), ug(0.0, 12.0);
  QuadratureSpec qs{{16, 32, 64}, false, 0.0};
  for (int t = 0; t < 20; ++t) {
    const Vec3 k{uk(rng), uk(rng), uk(rng)};
    const double z = uz(rng), mu = um(rng), g = ug(rng);
    const double lhs = delta(mirror(k), kBandTop - z, {mu, g}, qs);
    const double rhs = delta(k, z, {mu, kMirrorGammaSum - g}, qs);
    CHECK(std::fabs(lhs + rhs) <= 1e-9);
  }
}

TEST_CASE("fiber roots appear only beyond the critical coupling") {
  FiberDeterminant weak(kZero, {0.01, 6.0});
  CHECK_FALSE(weak.root(Side::below).has_value());
  // Exactly at threshold the root collides with the edge: reported as absent.
  FiberDeterminant crit(kZero, {critical_mu(Side::below, 6.0), 6.0});
  CHECK_FALSE(crit.root(Side::below).has_value());
  FiberDeterminant past(kZero, {0.4, 6.0});
  const auto r4 = past.root(Side::below);
  REQUIRE(r4.has_value());
  CHECK(*r4 < 0.0);
  CHECK(std::fabs(past(*r4)) <= 1e-6);
  // Roots deepen with coupling.
  FiberDeterminant stronger(kZero, {0.5, 6.0});
  const auto r5 = stronger.root(Side::below);
  REQUIRE(r5.has_value());
  CHECK(*r5 < *r4);
  // Strong coupling: a deep root with a tight residual.
  FiberDeterminant strong(kZero, {10.0, 6.0});
  const auto rs = strong.root(Side::below);
  REQUIRE(rs.has_value());
  CHECK(*rs < -100.0);
  CHECK(std::fabs(strong(*rs)) <= 1e-8);
  CHECK_THROWS_AS(FiberDeterminant(kZero, {0.0, 6.0}), DomainError);
  CHECK_THROWS_AS(two_particle_branch(Side::below, {-1.0, 6.0}), DomainError);
}

TEST_CASE("interval merging") {
  auto m = merge_intervals({{0.0, 18.0}, {-2.0, 1.0}, {20.0, 21.0}}, 1e-12);
  REQUIRE(m.size() == 2);
  CHECK(m[0].lo == doctest::Approx(-2.0));
  CHECK(m[0].hi == doctest::Approx(18.0));
  CHECK(m[1].lo == doctest::Approx(20.0));
  auto t = merge_intervals({{0.0, 1.0}, {1.0, 2.0}}, 1e-12);
  CHECK(t.size() == 1);
  auto d = merge_intervals({{0.0, 1.0}, {1.1, 2.0}}, 1e-12);
  CHECK(d.size() == 2);
}

// Frozen hulls below were produced by an independent sweep implementation at
// kgrid 8 (no polish), quad ladder (16,32,64), couplings on the critical lines.
TEST_CASE("regime: detached branch below the band") {
  const double mu = critical_mu(Side::above, -4.0);
  const Classification c = classify_bands({mu, -4.0}, probe_opts());
  CHECK(c.label == "below-split");
  CHECK(c.ess.below.fibers_with_root == 22);
  CHECK(c.ess.below.hull.lo == doctest::Approx(-7.629735789735337).epsilon(5e-6));
  CHECK(c.ess.below.hull.hi == doctest::Approx(-0.8565972559443056).epsilon(5e-6));
  CHECK(c.ess.above.fibers_with_root == 1);
  CHECK(c.ess.above.hull.lo == doctest::Approx(15.739844494959875).epsilon(5e-6));
  REQUIRE(c.intervals.size() == 2);
  CHECK(c.intervals[0].hi < 0.0);
  CHECK(c.intervals[1].lo == doctest::Approx(0.0));
  CHECK(c.intervals[1].hi == doctest::Approx(kBandTop));
}

TEST_CASE("regime: branch merged into the band bottom") {
  const double mu = critical_mu(Side::above, 2.0);
  const Classification c = classify_bands({mu, 2.0}, probe_opts());
  CHECK(c.label == "below-merged");
  CHECK(c.ess.below.fibers_with_root == 22);
  CHECK(c.ess.below.hull.lo == doctest::Approx(-2.374812265317626).epsilon(5e-6));
  CHECK(c.ess.below.hull.hi == doctest::Approx(4.968287322708118).epsilon(5e-6));
  CHECK(c.ess.above.fibers_with_root == 2);
  REQUIRE(c.intervals.size() == 1);
  CHECK(c.intervals[0].lo == doctest::Approx(-2.374812265317626).epsilon(5e-6));
  CHECK(c.intervals[0].hi == doctest::Approx(kBandTop));
}

TEST_CASE("regime: band only (right-critical family)") {
  const double mu = critical_mu(Side::above, 9.0);
  const Classification c = classify_bands({mu, 9.0}, probe_opts());
  CHECK(c.label == "band-only");
  CHECK(c.ess.below.fibers_with_root == 0);
  CHECK(c.ess.above.fibers_with_root == 20);
  REQUIRE(c.intervals.size() == 1);
  CHECK(c.intervals[0].lo == doctest::Approx(0.0));
  CHECK(c.intervals[0].hi == doctest::Approx(kBandTop));
}

TEST_CASE("regime: band only (left-critical family)") {
  const double mu = critical_mu(Side::below, 3.0);
  const Classification c = classify_bands({mu, 3.0}, probe_opts());
  CHECK(c.label == "band-only");
  CHECK(c.ess.below.fibers_with_root == 20);
  CHECK(c.ess.below.hull.lo == doctest::Approx(0.9338934627886457).epsilon(5e-6));
  CHECK(c.ess.below.hull.hi == doctest::Approx(7.630874600192694).epsilon(5e-6));
  CHECK(c.ess.above.fibers_with_root == 0);
  REQUIRE(c.intervals.size() == 1);
}

TEST_CASE("regime: branch merged into the band top") {
  const double mu = critical_mu(Side::below, 10.0);
  const Classification c = classify_bands({mu, 10.0}, probe_opts());
  CHECK(c.label == "above-merged");
  CHECK(c.ess.above.fibers_with_root == 22);
  CHECK(c.ess.above.hull.lo == doctest::Approx(13.031712677291882).epsilon(5e-6));
  CHECK(c.ess.above.hull.hi == doctest::Approx(20.37481226531763).epsilon(5e-6));
  REQUIRE(c.intervals.size() == 1);
  CHECK(c.intervals[0].lo == doctest::Approx(0.0));
  CHECK(c.intervals[0].hi == doctest::Approx(20.37481226531763).epsilon(5e-6));
}

TEST_CASE("regime: detached branch above the band") {
  const double mu = critical_mu(Side::below, 16.0);
  const Classification c = classify_bands({mu, 16.0}, probe_opts());
  CHECK(c.label == "above-split");
  CHECK(c.ess.above.fibers_with_root == 22);
  CHECK(c.ess.above.hull.lo == doctest::Approx(18.85659725594431).epsilon(5e-6));
  CHECK(c.ess.above.hull.hi == doctest::Approx(25.629735789735335).epsilon(5e-6));
  REQUIRE(c.intervals.size() == 2);
  CHECK(c.intervals[0].hi == doctest::Approx(kBandTop));
  CHECK(c.intervals[1].lo > kBandTop);
}

TEST_CASE("mirror duality swaps the split regimes exactly") {
  // gamma and 12 - gamma at the same coupling have mirrored branch hulls.
  const double mu = critical_mu(Side::above, -4.0);  // == mu_l0(16)
  const auto below = two_particle_branch(Side::below, {mu, -4.0}, probe_opts());
  const auto above = two_particle_branch(Side::above, {mu, 16.0}, probe_opts());
  REQUIRE(below.exists);
  REQUIRE(above.exists);
  CHECK(above.hull.lo == doctest::Approx(kBandTop - below.hull.hi).epsilon(1e-8));
  CHECK(above.hull.hi == doctest::Approx(kBandTop - below.hull.lo).epsilon(1e-8));
  CHECK(above.fibers_with_root == below.fibers_with_root);
}
