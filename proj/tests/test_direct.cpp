// Brute-force finite section: block structure, spectra, counts, dumps.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "torspec/birman_schwinger.hpp"
#include "torspec/direct.hpp"
#include "torspec/quadrature.hpp"

using namespace torspec;

namespace {
std::int64_t spectrum_count(const std::vector<double>& spec, double z, Side side) {
  if (side == Side::below)
    return std::count_if(spec.begin(), spec.end(), [&](double e) { return e < z; });
  return std::count_if(spec.begin(), spec.end(), [&](double e) { return e > z; });
}
}  // namespace

TEST_CASE("decoupled blocks give the diagonal multiset exactly") {
  const int n = 4;
  const DirectMatrix m = build_direct_matrix({0.0, 2.0}, n);
  const auto spec = direct_spectrum(m);
  TorusGrid g(n);
  std::vector<double> expect;
  for (std::int64_t i = 0; i < g.size(); ++i) expect.push_back(w1(g.node(i), 2.0));
  for (std::int64_t i = 0; i < g.size(); ++i)
    for (std::int64_t j = i; j < g.size(); ++j)
      expect.push_back(w2(g.node(i), g.node(j)));
  std::sort(expect.begin(), expect.end());
  REQUIRE(spec.size() == expect.size());
  for (std::size_t i = 0; i < spec.size(); ++i)
    CHECK(spec[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("assembled matrix is exactly symmetric") {
  const DirectMatrix m = build_direct_matrix({0.7, 5.0}, 4);
  const std::int64_t d = m.dim();
  double worst = 0.0;
  for (std::int64_t i = 0; i < d; ++i)
    for (std::int64_t j = i + 1; j < d; ++j)
      worst = std::max(worst, std::fabs(m.mat[i * d + j] - m.mat[j * d + i]));
  CHECK(worst <= 1e-13);
}

TEST_CASE("pair-sector embedding is an isometry") {
  const int n = 4;
  TorusGrid g(n);
  const std::int64_t N = g.size();
  std::mt19937_64 rng(99u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(static_cast<std::size_t>(N) * N);
  for (std::int64_t i = 0; i < N; ++i)
    for (std::int64_t j = i; j < N; ++j) f[i * N + j] = f[j * N + i] = u(rng);
  double full = 0.0, packed = 0.0;
  for (std::int64_t i = 0; i < N; ++i)
    for (std::int64_t j = 0; j < N; ++j)
      full += g.weight * g.weight * f[i * N + j] * f[i * N + j];
  for (std::int64_t i = 0; i < N; ++i)
    for (std::int64_t j = i; j < N; ++j) {
      const double s = (i == j) ? 1.0 : std::sqrt(2.0);
      const double v = s * g.weight * f[i * N + j];
      packed += v * v;
    }
  CHECK(full == doctest::Approx(packed).epsilon(1e-13));
}

TEST_CASE("self-dual coupling mirrors the whole spectrum about the midpoint") {
  const DirectMatrix m = build_direct_matrix({0.5, 6.0}, 4);
  const auto spec = direct_spectrum(m);
  const std::size_t d = spec.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    worst = std::max(worst, std::fabs(spec[i] + spec[d - 1 - i] - kBandTop));
  CHECK(worst <= 1e-10);
}

TEST_CASE("trace identity") {
  const DirectMatrix m = build_direct_matrix({0.9, 3.0}, 4);
  const auto spec = direct_spectrum(m);
  const std::int64_t d = m.dim();
  double tr = 0.0;
  for (std::int64_t i = 0; i < d; ++i) tr += m.mat[i * d + i];
  const double sum = std::accumulate(spec.begin(), spec.end(), 0.0);
  CHECK(sum == doctest::Approx(tr).epsilon(1e-8));
}

TEST_CASE("frozen edge eigenvalue and counts on the smallest grid") {
  const DirectMatrix m = build_direct_matrix({0.5, 6.0}, 4);
  const auto spec = direct_spectrum(m);
  CHECK(std::fabs(spec.front() - (-0.750237)) <= 2e-6);
  CHECK(spectrum_count(spec, -0.5, Side::below) == 1);
  CHECK(spectrum_count(spec, -1.0, Side::below) == 0);
  CHECK(spectrum_count(spec, -2.0, Side::below) == 0);
  CHECK(spectrum_count(spec, 18.5, Side::above) == 1);
  CHECK(spectrum_count(spec, 19.0, Side::above) == 0);
  CHECK(spectrum_count(spec, 20.5, Side::above) == 0);
  // The counting wrapper refuses z inside the finite-section fuzz.
  CHECK(m.band_fuzz == doctest::Approx(5.0 * kTwoPi / 4.0));
  CHECK_THROWS_AS(direct_count(m, -1.0, Side::below), AmbiguityError);
  CHECK(direct_count(m, -10.0, Side::below) == 0);
  CHECK(direct_count(m, kBandTop + 10.0, Side::above) == 0);
}

TEST_CASE("Schur-complement route equals the dense eigensolve route") {
  for (double mu : {0.5, 2.5}) {
    const ModelParams p{mu, 6.0};
    const DirectMatrix m = build_direct_matrix(p, 4);
    const auto spec = direct_spectrum(m);
    for (double z : {-10.0, -16.0, -24.0, -40.0}) {
      CHECK(schur_count(p, 4, z, Side::below) ==
            spectrum_count(spec, z, Side::below));
      CHECK(schur_count(p, 4, kBandTop - z, Side::above) ==
            spectrum_count(spec, kBandTop - z, Side::above));
    }
  }
}

TEST_CASE("finite-section bound state is stable across grid sizes") {
  // Strong coupling: one deep pair state.  Bisect the Schur counting function
  // for its position at n = 6, 8, 10 and require Cauchy-type convergence.
  const ModelParams p{2.5, 0.0};
  auto locate = [&](int n) {
    double lo = -60.0, hi = -20.0;  // brackets the deepest eigenvalue
    REQUIRE(schur_count(p, n, lo, Side::below) == 0);
    REQUIRE(schur_count(p, n, hi, Side::below) >= 1);
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      if (schur_count(p, n, mid, Side::below) == 0) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double e6 = locate(6), e8 = locate(8), e10 = locate(10);
  CHECK(std::fabs(e8 - e6) <= 0.1);
  CHECK(std::fabs(e10 - e8) <= 0.1);
  CHECK(std::fabs(e10 - e8) <= std::fabs(e8 - e6) + 1e-3);
}

TEST_CASE("capacity and validation") {
  CHECK_THROWS_AS(build_direct_matrix({0.5, 6.0}, 6), CapacityError);
  CHECK_THROWS_AS(build_direct_matrix({-0.5, 6.0}, 4), DomainError);
  CHECK_THROWS_AS(build_direct_matrix({0.5, 6.0}, 5), DomainError);
  CHECK_THROWS_AS(schur_count({0.5, 6.0}, 4, 1.0, Side::below), AmbiguityError);
  CHECK(band_fuzz(8) == doctest::Approx(5.0 * kTwoPi / 8.0));
}

TEST_CASE("measure convention is a pure coupling rescale") {
  // Normalizing the torus measure multiplies the off-diagonal block by
  // (2pi)^{-3/2}; the spectrum must match the Lebesgue build at the rescaled
  // coupling exactly.
  const double mu = 0.8;
  const double scale = std::pow(kTwoPi, 1.5);
  const auto a = direct_spectrum(build_direct_matrix({mu, 4.0}, 4, true));
  const auto b = direct_spectrum(build_direct_matrix({mu / scale, 4.0}, 4, false));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("binary dump round-trips") {
  const DirectMatrix m = build_direct_matrix({0.3, 6.0}, 4);
  const std::string path = "/tmp/torspec_dump_test.bin";
  dump_matrix(m, path);
  std::uint64_t rows = 0, cols = 0;
  const auto back = load_matrix(path, rows, cols);
  CHECK(rows == static_cast<std::uint64_t>(m.dim()));
  CHECK(cols == static_cast<std::uint64_t>(m.dim()));
  REQUIRE(back.size() == m.mat.size());
  CHECK(std::equal(back.begin(), back.end(), m.mat.begin()));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_matrix("/tmp/torspec_no_such_dump.bin", rows, cols),
                  DomainError);
}
