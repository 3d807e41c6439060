// birman_schwinger.cpp — Nyström counting operator: dense and channel paths.
#include "torspec/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <thread>

#include "torspec/linalg.hpp"

namespace torspec {

namespace {

// Tetrahedral index of a sorted magnitude triple a <= b <= c.
inline int triple_id(int a, int b, int c) {
  return a + b * (b + 1) / 2 + c * (c + 1) * (c + 2) / 6;
}

// Fills one row of the two-particle symbol matrix, w2(k_flat, p) over all p,
// using the per-coordinate separability of the symbol: three axis tables and
// a cascaded sum replace n^3 trigonometric evaluations by 3n of them.
class RowFiller {
 public:
  explicit RowFiller(const GridIndex& g)
      : g_(g), ax0_(g.n()), ax1_(g.n()), ax2_(g.n()) {}

  void fill(std::int64_t flat, double* row) {
    const int n = g_.n();
    const auto& nodes = g_.nodes();
    const auto& mc = g_.midcos();
    const int j0 = static_cast<int>(flat / (n * n));
    const int j1 = static_cast<int>((flat / n) % n);
    const int j2 = static_cast<int>(flat % n);
    const double base =
        9.0 - std::cos(nodes[j0]) - std::cos(nodes[j1]) - std::cos(nodes[j2]);
    for (int t = 0; t < n; ++t) {
      const double ct = std::cos(nodes[t]);
      ax0_[t] = -ct - mc[static_cast<std::size_t>(j0) * n + t];
      ax1_[t] = -ct - mc[static_cast<std::size_t>(j1) * n + t];
      ax2_[t] = -ct - mc[static_cast<std::size_t>(j2) * n + t];
    }
    std::int64_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0) {
      const double c0 = base + ax0_[i0];
      for (int i1 = 0; i1 < n; ++i1) {
        const double c01 = c0 + ax1_[i1];
        for (int i2 = 0; i2 < n; ++i2) row[idx++] = c01 + ax2_[i2];
      }
    }
  }

 private:
  const GridIndex& g_;
  std::vector<double> ax0_, ax1_, ax2_;
};

void check_even_grid(int n) {
  if (n < 2 || n % 2 != 0)
    throw DomainError("grid size must be even and >= 2, got " + std::to_string(n));
}

void check_outside_band(double z) {
  if (z > 0.0 && z < kBandTop)
    throw BandInteriorError(
        "z = " + std::to_string(z) +
        " lies inside the two-particle band [0, 18]; counting is defined only "
        "outside it");
}

double side_sign(Side s) { return s == Side::below ? 1.0 : -1.0; }

[[noreturn]] void throw_sign_condition(double z, Side side, int n,
                                       std::int64_t violations, double worst) {
  std::ostringstream os;
  os << "sign condition failed at z = " << z << " ("
     << (side == Side::below ? "below" : "above") << ", grid " << n << "): "
     << violations << " node(s) with the wrong determinant sign (worst " << worst
     << "); z is inside or too close to the essential spectrum at this resolution";
  throw SignConditionError(os.str());
}

// Per-orbit fiber determinants in integrated mode: one cached integrator per
// orbit representative, evaluated at every requested z.
std::vector<double> integrated_delta_orbits(const GridIndex& g,
                                            const ModelParams& p,
                                            const QuadratureSpec& quad,
                                            const std::vector<double>& zs) {
  const int R = g.orbits();
  const std::size_t nz = zs.size();
  std::vector<double> out(static_cast<std::size_t>(R) * nz);
  for (int r = 0; r < R; ++r) {
    const Vec3 k = g.point(g.rep_flat()[r]);
    FiberIntegrator integ(k, quad);
    const double base = w1(k, p.gamma);
    for (std::size_t iz = 0; iz < nz; ++iz) {
      out[static_cast<std::size_t>(r) * nz + iz] =
          base - zs[iz] - 0.5 * p.mu * p.mu * integ.value(zs[iz]).value;
    }
  }
  return out;
}

}  // namespace

// ---- GridIndex -------------------------------------------------------------

GridIndex::GridIndex(int n) : n_(n) {
  check_even_grid(n);
  const int m = n / 2;
  nodes_ = shifted_nodes(n);
  orbits_ = m * (m + 1) * (m + 2) / 6;
  const std::int64_t N = size();
  orbit_of_.resize(N);
  orbit_size_.assign(orbits_, 0);
  rep_flat_.assign(orbits_, -1);
  // Node magnitudes come in m distinct values; rank them once.
  std::vector<int> mag(n);
  for (int j = 0; j < n; ++j) mag[j] = (j >= m) ? j - m : m - 1 - j;
  std::int64_t flat = 0;
  for (int j0 = 0; j0 < n; ++j0) {
    for (int j1 = 0; j1 < n; ++j1) {
      for (int j2 = 0; j2 < n; ++j2, ++flat) {
        int a = mag[j0], b = mag[j1], c = mag[j2];
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const int id = triple_id(a, b, c);
        orbit_of_[flat] = id;
        ++orbit_size_[id];
        rep_flat_[id] = (static_cast<std::int64_t>(m + a) * n + (m + b)) * n + (m + c);
      }
    }
  }
  midcos_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      midcos_[static_cast<std::size_t>(i) * n + j] = midpoint_cos(nodes_[i], nodes_[j]);
}

Vec3 GridIndex::point(std::int64_t flat) const {
  return {nodes_[flat / (static_cast<std::int64_t>(n_) * n_)],
          nodes_[(flat / n_) % n_], nodes_[flat % n_]};
}

// ---- dense operator --------------------------------------------------------

NystromOperator::NystromOperator(const ModelParams& p, double z, Side side,
                                 const BSOptions& opt)
    : N_(0), z_(z), side_(side) {
  check_even_grid(opt.n);
  if (opt.n > kDenseMaxN)
    throw CapacityError("dense path is sized for grids up to " +
                        std::to_string(kDenseMaxN) +
                        " nodes per axis; use the channel counter beyond that");
  check_outside_band(z);
  if (p.mu < 0.0) throw DomainError("coupling mu must be nonnegative");

  GridIndex g(opt.n);
  TorusGrid tg(opt.n, opt.normalized_measure);
  N_ = g.size();
  const double w = tg.weight;
  const double s = side_sign(side);

  mat_.resize(static_cast<std::size_t>(N_) * N_);
  std::vector<double> rowsum(N_, 0.0);
  RowFiller filler(g);
  for (std::int64_t i = 0; i < N_; ++i) {
    double* row = mat_.data() + static_cast<std::size_t>(i) * N_;
    filler.fill(i, row);
    double acc = 0.0;
    for (std::int64_t j = 0; j < N_; ++j) acc += 1.0 / (row[j] - z);
    rowsum[i] = acc;
  }

  std::vector<double> delta(N_);
  if (opt.delta_mode == DeltaMode::matched) {
    for (std::int64_t i = 0; i < N_; ++i)
      delta[i] = w1(g.point(i), p.gamma) - z - 0.5 * p.mu * p.mu * w * rowsum[i];
  } else {
    QuadratureSpec quad = opt.quad;
    quad.normalized_measure = opt.normalized_measure;
    const std::vector<double> per_orbit =
        integrated_delta_orbits(g, p, quad, {z});
    for (std::int64_t i = 0; i < N_; ++i) delta[i] = per_orbit[g.orbit_of()[i]];
  }

  std::int64_t violations = 0;
  double worst = 0.0, min_abs = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < N_; ++i) {
    const double sd = s * delta[i];
    if (sd <= 0.0) {
      ++violations;
      worst = std::min(worst, sd);
    }
    min_abs = std::min(min_abs, std::fabs(delta[i]));
  }
  min_abs_delta_ = min_abs;
  if (violations > 0) throw_sign_condition(z, side, opt.n, violations, worst);

  std::vector<double> x(N_);
  for (std::int64_t i = 0; i < N_; ++i) x[i] = 1.0 / std::sqrt(s * delta[i]);
  const double cs = s * 0.5 * p.mu * p.mu * w;
  for (std::int64_t i = 0; i < N_; ++i) {
    double* row = mat_.data() + static_cast<std::size_t>(i) * N_;
    const double xi = cs * x[i];
    for (std::int64_t j = 0; j < N_; ++j) row[j] = xi * x[j] / (row[j] - z);
  }
  // Analytically symmetric; average out last-bit rounding asymmetry and
  // remember the defect for reporting.
  double defect = 0.0;
  for (std::int64_t i = 0; i < N_; ++i) {
    for (std::int64_t j = i + 1; j < N_; ++j) {
      double& a = mat_[static_cast<std::size_t>(i) * N_ + j];
      double& b = mat_[static_cast<std::size_t>(j) * N_ + i];
      defect = std::max(defect, std::fabs(a - b));
      const double avg = 0.5 * (a + b);
      a = avg;
      b = avg;
    }
  }
  defect_ = defect;
}

std::int64_t NystromOperator::count_above(double lambda) const {
  std::vector<double> a = mat_;
  const int n = static_cast<int>(N_);
  for (std::int64_t i = 0; i < N_; ++i)
    a[static_cast<std::size_t>(i) * N_ + i] -= lambda;
  return linalg::inertia(a, n).pos;
}

std::vector<double> NystromOperator::eigenvalues() const {
  return linalg::sym_eigenvalues(mat_, static_cast<int>(N_));
}

double NystromOperator::symmetry_defect() const { return defect_; }

CountResult count_discrete(const ModelParams& p, double z, const BSOptions& opt) {
  const Side side = (z <= 0.0) ? Side::below : Side::above;
  check_outside_band(z);
  NystromOperator op(p, z, side, opt);
  CountResult r;
  r.count = op.count_above(1.0);
  r.z = z;
  r.side = side;
  r.n = opt.n;
  r.min_abs_delta = op.min_abs_delta();
  return r;
}

// ---- symmetric-channel counter ---------------------------------------------

ChannelCounter::ChannelCounter(const ModelParams& p, const BSOptions& opt)
    : p_(p), opt_(opt), grid_(opt.n) {
  if (p.mu < 0.0) throw DomainError("coupling mu must be nonnegative");
  const std::int64_t R = grid_.orbits();
  // One R x R buffer must fit comfortably in memory next to the workspace.
  constexpr std::int64_t kMaxReduced = 20000;
  if (R > kMaxReduced)
    throw CapacityError("channel dimension " + std::to_string(R) +
                        " exceeds the configured limit " +
                        std::to_string(kMaxReduced) + " (grid too fine)");
  opt_.quad.normalized_measure = opt_.normalized_measure;
}

std::vector<double> ChannelCounter::delta_orbits(const std::vector<double>& zs,
                                                 Side /*side*/) const {
  return integrated_delta_orbits(grid_, p_, opt_.quad, zs);
}

// Raw channel compression at one z: bins[O'] accumulates sum over p in O' of
// 1/(w2(rep_O, p) - z); the matrix returned is that of the compressed kernel
// before determinant sandwiching.
std::vector<double> ChannelCounter::assemble(double z, Side side,
                                             const std::vector<double>& sq_orbit) {
  const int R = grid_.orbits();
  const std::int64_t N = grid_.size();
  const TorusGrid tg(opt_.n, opt_.normalized_measure);
  const double cs = side_sign(side) * 0.5 * p_.mu * p_.mu * tg.weight;

  std::vector<double> B(static_cast<std::size_t>(R) * R);
  std::vector<double> sq_size(R);
  for (int r = 0; r < R; ++r)
    sq_size[r] = std::sqrt(static_cast<double>(grid_.orbit_size()[r]));

  const int threads = std::max(1, opt_.threads);
  auto worker = [&](int tid) {
    RowFiller filler(grid_);
    std::vector<double> row(N);
    const auto& orbit_of = grid_.orbit_of();
    for (int r = tid; r < R; r += threads) {
      filler.fill(grid_.rep_flat()[r], row.data());
      double* out = B.data() + static_cast<std::size_t>(r) * R;
      std::fill(out, out + R, 0.0);
      for (std::int64_t j = 0; j < N; ++j)
        out[orbit_of[j]] += 1.0 / (row[j] - z);
      // Scale into the orthonormal channel basis with the determinant sandwich.
      const double fr = cs * sq_orbit[r] * sq_size[r];
      for (int c = 0; c < R; ++c) out[c] *= fr * sq_orbit[c] / sq_size[c];
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  // Exact symmetry up to rounding; enforce it.
  for (int i = 0; i < R; ++i) {
    for (int j = i + 1; j < R; ++j) {
      double& a = B[static_cast<std::size_t>(i) * R + j];
      double& b = B[static_cast<std::size_t>(j) * R + i];
      const double avg = 0.5 * (a + b);
      a = avg;
      b = avg;
    }
  }
  return B;
}

std::vector<CountResult> ChannelCounter::counts(const std::vector<double>& zs,
                                                Side side) {
  for (double z : zs) {
    check_outside_band(z);
    if ((side == Side::below && z > 0.0) || (side == Side::above && z < kBandTop))
      throw DomainError("z = " + std::to_string(z) +
                        " is on the wrong side of the band for this count");
  }
  const int R = grid_.orbits();
  const std::size_t nz = zs.size();
  const double s = side_sign(side);

  // Fiber determinants per orbit: either the quadrature route (one cached
  // integrator per representative) or the matched same-grid sum.
  std::vector<double> dmat;  // R x nz
  if (opt_.delta_mode == DeltaMode::integrated) {
    dmat = delta_orbits(zs, side);
  } else {
    dmat.resize(static_cast<std::size_t>(R) * nz);
    const TorusGrid tg(opt_.n, opt_.normalized_measure);
    RowFiller filler(grid_);
    std::vector<double> row(grid_.size());
    for (int r = 0; r < R; ++r) {
      filler.fill(grid_.rep_flat()[r], row.data());
      const double base = w1(grid_.point(grid_.rep_flat()[r]), p_.gamma);
      for (std::size_t iz = 0; iz < nz; ++iz) {
        double acc = 0.0;
        for (std::int64_t j = 0; j < grid_.size(); ++j)
          acc += 1.0 / (row[j] - zs[iz]);
        dmat[static_cast<std::size_t>(r) * nz + iz] =
            base - zs[iz] - 0.5 * p_.mu * p_.mu * tg.weight * acc;
      }
    }
  }

  std::vector<CountResult> results;
  results.reserve(nz);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    std::vector<double> sq(R);
    std::int64_t violations = 0;
    double worst = 0.0, min_abs = std::numeric_limits<double>::infinity();
    for (int r = 0; r < R; ++r) {
      const double d = dmat[static_cast<std::size_t>(r) * nz + iz];
      const double sd = s * d;
      min_abs = std::min(min_abs, std::fabs(d));
      if (sd <= 0.0) {
        ++violations;
        worst = std::min(worst, sd);
      } else {
        sq[r] = 1.0 / std::sqrt(sd);
      }
    }
    if (violations > 0)
      throw_sign_condition(zs[iz], side, opt_.n, violations, worst);

    // Cheap certificate first: if I - B is positive definite the count is 0.
    std::int64_t count;
    {
      std::vector<double> M = assemble(zs[iz], side, sq);
      for (std::size_t t = 0; t < M.size(); ++t) M[t] = -M[t];
      for (int i = 0; i < R; ++i) M[static_cast<std::size_t>(i) * R + i] += 1.0;
      const bool negdef = linalg::cholesky_spd(M, R);
      if (negdef) {
        count = 0;
      } else {
        // Certificate failed: rebuild (the attempt destroyed the buffer; free
        // it first so only one R x R matrix is ever alive) and take the exact
        // inertia of B - I.
        std::vector<double>().swap(M);
        std::vector<double> B2 = assemble(zs[iz], side, sq);
        for (int i = 0; i < R; ++i) B2[static_cast<std::size_t>(i) * R + i] -= 1.0;
        count = linalg::inertia(B2, R).pos;
      }
    }
    CountResult cr;
    cr.count = count;
    cr.z = zs[iz];
    cr.side = side;
    cr.n = opt_.n;
    cr.min_abs_delta = min_abs;
    results.push_back(cr);
  }
  return results;
}

// ---- localization ----------------------------------------------------------

std::vector<double> locate_eigenvalues(const ModelParams& p, double a, double b,
                                       const LocateOptions& opt) {
  if (!(a < b)) throw DomainError("localization window requires a < b");
  Side side;
  if (b <= 0.0) side = Side::below;
  else if (a >= kBandTop) side = Side::above;
  else
    throw BandInteriorError(
        "localization window must lie entirely on one side of the band [0, 18]");

  auto count_at = [&](double z) {
    return count_discrete(p, z, opt.bs).count;
  };
  // Number of operator eigenvalues in (lo, hi) from the one-sided counts.
  auto in_window = [&](std::int64_t clo, std::int64_t chi) {
    return side == Side::below ? chi - clo : clo - chi;
  };

  const std::int64_t ca = count_at(a), cb = count_at(b);
  const std::int64_t total = in_window(ca, cb);
  if (total == 0) return {};
  if (total > opt.max_count)
    throw CapacityError("window contains " + std::to_string(total) +
                        " eigenvalues, above the configured cap " +
                        std::to_string(opt.max_count));

  std::vector<double> found;
  struct Bracket {
    double lo, hi;
    std::int64_t clo, chi;
  };
  std::vector<Bracket> stack{{a, b, ca, cb}};
  while (!stack.empty()) {
    Bracket br = stack.back();
    stack.pop_back();
    const std::int64_t m = in_window(br.clo, br.chi);
    if (m == 0) continue;
    if (br.hi - br.lo <= opt.tol) {
      const double mid = 0.5 * (br.lo + br.hi);
      for (std::int64_t t = 0; t < m; ++t) found.push_back(mid);
      continue;
    }
    const double mid = 0.5 * (br.lo + br.hi);
    const std::int64_t cm = count_at(mid);
    stack.push_back({br.lo, mid, br.clo, cm});
    stack.push_back({mid, br.hi, cm, br.chi});
  }
  std::sort(found.begin(), found.end());
  return found;
}

// ---- residual verification -------------------------------------------------

double verify_faddeev(const ModelParams& p, double z, const BSOptions& opt) {
  check_even_grid(opt.n);
  constexpr int kFaddeevMaxN = 12;
  if (opt.n > kFaddeevMaxN)
    throw CapacityError("transfer-matrix verification is sized for grids up to " +
                        std::to_string(kFaddeevMaxN) + " nodes per axis");
  check_outside_band(z);

  GridIndex g(opt.n);
  TorusGrid tg(opt.n, opt.normalized_measure);
  const std::int64_t N = g.size();
  const double w = tg.weight;

  std::vector<double> T(static_cast<std::size_t>(N) * N);
  std::vector<double> rowsum(N, 0.0);
  RowFiller filler(g);
  for (std::int64_t i = 0; i < N; ++i) {
    double* row = T.data() + static_cast<std::size_t>(i) * N;
    filler.fill(i, row);
    double acc = 0.0;
    for (std::int64_t j = 0; j < N; ++j) acc += 1.0 / (row[j] - z);
    rowsum[i] = acc;
  }
  std::vector<double> delta(N);
  if (opt.delta_mode == DeltaMode::matched) {
    for (std::int64_t i = 0; i < N; ++i)
      delta[i] = w1(g.point(i), p.gamma) - z - 0.5 * p.mu * p.mu * w * rowsum[i];
  } else {
    QuadratureSpec quad = opt.quad;
    quad.normalized_measure = opt.normalized_measure;
    const std::vector<double> per_orbit = integrated_delta_orbits(g, p, quad, {z});
    for (std::int64_t i = 0; i < N; ++i) delta[i] = per_orbit[g.orbit_of()[i]];
  }
  for (std::int64_t i = 0; i < N; ++i) {
    if (std::fabs(delta[i]) < 1e-10)
      throw AmbiguityError(
          "fiber determinant vanishes to 1e-10 at a node; the transfer matrix "
          "is not defined there");
  }
  const double c = 0.5 * p.mu * p.mu * w;
  for (std::int64_t i = 0; i < N; ++i) {
    double* row = T.data() + static_cast<std::size_t>(i) * N;
    const double di = c / delta[i];
    for (std::int64_t j = 0; j < N; ++j) row[j] = di / (row[j] - z);
  }
  const auto ev = linalg::gen_eigenvalues(std::move(T), static_cast<int>(N));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& lam : ev) best = std::min(best, std::abs(lam - 1.0));
  return best;
}

}  // namespace torspec
