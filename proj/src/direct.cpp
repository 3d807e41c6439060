// direct.cpp — dense finite section and Schur-complement counting.
#include "torspec/direct.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "torspec/linalg.hpp"
#include "torspec/quadrature.hpp"

namespace torspec {

namespace {

// Upper-triangle pair index for i <= j over N points: row-major enumeration
// (0,0), (0,1), ..., (0,N-1), (1,1), ...
inline std::int64_t pair_index(std::int64_t i, std::int64_t j, std::int64_t N) {
  return i * N - i * (i + 1) / 2 + j;
}

void check_grid(int n) {
  if (n < 2 || n % 2 != 0)
    throw DomainError("grid size must be even and >= 2, got " + std::to_string(n));
}

void check_fuzz(double z, int n) {
  const double f = band_fuzz(n);
  if (z > -f && z < kBandTop + f)
    throw AmbiguityError(
        "z = " + std::to_string(z) + " lies inside the blurred band cluster [" +
        std::to_string(-f) + ", " + std::to_string(kBandTop + f) +
        "] at grid " + std::to_string(n) +
        "; a finite section cannot attribute eigenvalues there");
}

}  // namespace

double band_fuzz(int n) { return 5.0 * (kTwoPi / n); }

DirectMatrix build_direct_matrix(const ModelParams& p, int n,
                                 bool normalized_measure) {
  check_grid(n);
  if (p.mu < 0.0) throw DomainError("coupling mu must be nonnegative");
  DirectMatrix m;
  m.n = n;
  m.dim1 = static_cast<std::int64_t>(n) * n * n;
  m.dim2 = m.dim1 * (m.dim1 + 1) / 2;
  m.band_fuzz = band_fuzz(n);
  m.normalized_measure = normalized_measure;
  const std::int64_t dim = m.dim();
  if (dim > kDirectDenseMaxDim)
    throw CapacityError("direct matrix dimension " + std::to_string(dim) +
                        " exceeds the dense limit " +
                        std::to_string(kDirectDenseMaxDim) +
                        "; use schur_count for counting at this grid");

  const TorusGrid tg(n, normalized_measure);
  const std::int64_t N = m.dim1;
  const double sw = std::sqrt(tg.weight);
  m.mat.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  auto at = [&](std::int64_t r, std::int64_t c) -> double& {
    return m.mat[static_cast<std::size_t>(r) * dim + c];
  };

  // One-particle diagonal.
  for (std::int64_t i = 0; i < N; ++i) at(i, i) = w1(tg.node(i), p.gamma);
  // Two-particle diagonal over unordered pairs.
  for (std::int64_t i = 0; i < N; ++i) {
    const Vec3 ki = tg.node(i);
    for (std::int64_t j = i; j < N; ++j) {
      const std::int64_t t = m.dim1 + pair_index(i, j, N);
      at(t, t) = w2(ki, tg.node(j));
    }
  }
  // Coupling block: the partial-integral row against the isometric pair basis.
  // Row i meets pair {i,l}: weight mu*sqrt(w)/sqrt(2) for l != i (the sqrt(2)
  // of the basis vector cancels half of the two ordered contributions) and
  // mu*sqrt(w) on the diagonal pair {i,i}.
  for (std::int64_t i = 0; i < N; ++i) {
    for (std::int64_t l = 0; l < N; ++l) {
      const std::int64_t a = std::min(i, l), b = std::max(i, l);
      const std::int64_t t = m.dim1 + pair_index(a, b, N);
      const double v = (l == i) ? p.mu * sw : p.mu * sw / std::sqrt(2.0);
      at(i, t) = v;
      at(t, i) = v;
    }
  }
  return m;
}

std::vector<double> direct_spectrum(const DirectMatrix& m) {
  return linalg::sym_eigenvalues(m.mat, static_cast<int>(m.dim()));
}

std::int64_t direct_count(const std::vector<double>& spectrum, int n, double z,
                          Side side) {
  check_fuzz(z, n);
  const double f = band_fuzz(n);
  std::int64_t c = 0;
  for (double ev : spectrum) {
    const bool outside = ev < -f || ev > kBandTop + f;
    if (!outside) continue;
    if (side == Side::below ? ev < z : ev > z) ++c;
  }
  return c;
}

std::int64_t direct_count(const DirectMatrix& m, double z, Side side) {
  return direct_count(direct_spectrum(m), m.n, z, side);
}

std::int64_t schur_count(const ModelParams& p, int n, double z, Side side,
                         bool normalized_measure) {
  check_grid(n);
  if (p.mu < 0.0) throw DomainError("coupling mu must be nonnegative");
  constexpr int kSchurMaxN = 12;
  if (n > kSchurMaxN)
    throw CapacityError("Schur-complement counting is sized for grids up to " +
                        std::to_string(kSchurMaxN) + " nodes per axis");
  check_fuzz(z, n);

  const TorusGrid tg(n, normalized_measure);
  const std::int64_t N = tg.size();
  const double c = 0.5 * p.mu * p.mu * tg.weight;

  // Deliberately straightforward: every w2 value comes from the scalar symbol,
  // independent of the cascaded row fill used by the counting operator.
  std::vector<Vec3> pts(N);
  for (std::int64_t i = 0; i < N; ++i) pts[i] = tg.node(i);

  std::vector<double> S(static_cast<std::size_t>(N) * N);
  std::int64_t pair_beyond = 0;  // diagonal pairs already past z
  for (std::int64_t i = 0; i < N; ++i) {
    double* row = S.data() + static_cast<std::size_t>(i) * N;
    double rowsum = 0.0, diag_inv = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      const double v = w2(pts[i], pts[j]);
      const double inv = 1.0 / (v - z);
      rowsum += inv;
      if (j == i) diag_inv = inv;
      row[j] = -c * inv;
      // Unordered pairs i <= j, counted once.
      if (j >= i && (side == Side::below ? v < z : v > z)) ++pair_beyond;
    }
    row[i] = w1(pts[i], p.gamma) - z - c * (rowsum + diag_inv);
  }
  const auto inert = linalg::inertia(S, static_cast<int>(N));
  return pair_beyond + (side == Side::below ? inert.neg : inert.pos);
}

void dump_matrix(const DirectMatrix& m, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw DomainError("cannot open " + path + " for writing");
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.dim()),
                                 static_cast<std::uint64_t>(m.dim())};
  bool ok = std::fwrite(dims, sizeof(dims), 1, f) == 1;
  ok = ok && std::fwrite(m.mat.data(), sizeof(double), m.mat.size(), f) ==
                 m.mat.size();
  std::fclose(f);
  if (!ok) throw DomainError("short write to " + path);
}

std::vector<double> load_matrix(const std::string& path, std::uint64_t& rows,
                                std::uint64_t& cols) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw DomainError("cannot open " + path);
  std::uint64_t dims[2] = {0, 0};
  if (std::fread(dims, sizeof(dims), 1, f) != 1) {
    std::fclose(f);
    throw DomainError("malformed dump " + path + ": header truncated");
  }
  rows = dims[0];
  cols = dims[1];
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  const std::size_t got = std::fread(data.data(), sizeof(double), data.size(), f);
  std::fclose(f);
  if (got != data.size())
    throw DomainError("malformed dump " + path + ": payload truncated");
  return data;
}

}  // namespace torspec
