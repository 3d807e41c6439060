// asymptotics.cpp — sector operators, U estimate, log-law fit.
#include "torspec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "torspec/linalg.hpp"
#include "torspec/torus.hpp"

namespace torspec {

namespace {

// Front factor of the kernel and of its angular sectors.
const double kFront = 25.0 / (8.0 * kPi * kPi * std::sqrt(6.0));
const double kSectorFront = 25.0 / (4.0 * kPi * std::sqrt(6.0));  // 2 pi * kFront

// 64-point Gauss-Legendre rule on [-1, 1], computed once by Newton iteration
// on the Legendre recurrence (accurate to ~1e-15; plenty for the 1e-12 target).
struct GaussLegendre {
  static constexpr int kN = 64;
  double x[kN];
  double w[kN];
  GaussLegendre() {
    for (int i = 0; i < kN; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (kN + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int l = 2; l <= kN; ++l) {
          const double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
          p0 = p1;
          p1 = p2;
        }
        dp = kN * (t * p1 - p0) / (t * t - 1.0);
        const double step = p1 / dp;
        t -= step;
        if (std::fabs(step) < 1e-15) break;
      }
      x[i] = t;
      w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

const GaussLegendre& gl() {
  static const GaussLegendre rule;
  return rule;
}

double legendre(int l, double t) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int m = 2; m <= l; ++m) {
    const double p2 = ((2 * m - 1) * t * p1 - (m - 1) * p0) / m;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void validate(const SectorSpec& spec) {
  if (!(spec.r > 0.0)) throw DomainError("sector radius must be positive");
  if (spec.n_x < 8.0 * spec.r)
    throw DomainError("sector resolution too coarse: n_x = " +
                      std::to_string(spec.n_x) + " < 8 r = " +
                      std::to_string(8.0 * spec.r));
  if (spec.l_max < 8)
    throw DomainError("sector truncation l_max must be at least 8");
}

// Toeplitz profile of one sector matrix: values s_l(d h), d = 0..n_x-1.
// The kernel depends on the node difference only, so the midpoint offset
// cancels and a single profile describes the whole matrix.
std::vector<double> sector_profile(int l, double r, int n_x) {
  const double h = r / n_x;
  std::vector<double> sv(n_x);
  for (int d = 0; d < n_x; ++d)
    sv[d] = (l <= 1) ? sector_kernel_closed(l, d * h) : sector_kernel(l, d * h);
  return sv;
}

std::int64_t count_beyond(const std::vector<double>& sv, double h, int n_x,
                          double lambda) {
  std::vector<double> a(static_cast<std::size_t>(n_x) * n_x);
  for (int i = 0; i < n_x; ++i)
    for (int j = 0; j < n_x; ++j)
      a[static_cast<std::size_t>(i) * n_x + j] = h * sv[std::abs(i - j)];
  for (int i = 0; i < n_x; ++i) a[static_cast<std::size_t>(i) * n_x + i] -= lambda;
  return linalg::inertia(a, n_x).pos;
}

double frobenius(const std::vector<double>& sv, double h, int n_x) {
  double acc = n_x * sv[0] * sv[0];
  for (int d = 1; d < n_x; ++d) acc += 2.0 * (n_x - d) * sv[d] * sv[d];
  return h * std::sqrt(acc);
}

double spectral_norm(const std::vector<double>& sv, double h, int n_x) {
  std::vector<double> a(static_cast<std::size_t>(n_x) * n_x);
  for (int i = 0; i < n_x; ++i)
    for (int j = 0; j < n_x; ++j)
      a[static_cast<std::size_t>(i) * n_x + j] = h * sv[std::abs(i - j)];
  const auto ev = linalg::sym_eigenvalues(std::move(a), n_x);
  return std::max(std::fabs(ev.front()), std::fabs(ev.back()));
}

struct LsLine {
  double slope, intercept, rms, slope_stderr;
};

LsLine least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0) throw InsufficientData("degenerate abscissae in fit");
  LsLine out;
  out.slope = sxy / sxx;
  out.intercept = ym - out.slope * xm;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = y[i] - (out.slope * x[i] + out.intercept);
    ss += e * e;
  }
  out.rms = std::sqrt(ss / m);
  out.slope_stderr =
      (m > 2) ? std::sqrt(ss / (m - 2) / sxx) : out.rms / std::sqrt(sxx);
  return out;
}

}  // namespace

double sobolev_kernel(double t, double y) {
  return kFront / (5.0 * std::cosh(y) + t);
}

double sector_kernel(int l, double y) {
  if (l < 0) throw DomainError("sector index must be nonnegative");
  const auto& rule = gl();
  const double a = 5.0 * std::cosh(y);
  double acc = 0.0;
  for (int i = 0; i < GaussLegendre::kN; ++i)
    acc += rule.w[i] * legendre(l, rule.x[i]) / (a + rule.x[i]);
  return kSectorFront * acc;
}

double sector_kernel_closed(int l, double y) {
  const double a = 5.0 * std::cosh(y);
  // log((a+1)/(a-1)) written as log1p(2/(a-1)): immune to the catastrophic
  // cancellation that sets in once a is large (y beyond ~18).
  const double lr = std::log1p(2.0 / (a - 1.0));
  if (l == 0) return kSectorFront * lr;
  if (l == 1) return kSectorFront * (2.0 - a * lr);
  throw DomainError("closed form available only for sectors 0 and 1");
}

SectorSpec make_sector_spec(double r) {
  SectorSpec s;
  s.r = r;
  s.n_x = static_cast<int>(std::ceil(8.0 * r));
  s.l_max = 16;
  return s;
}

SectorCountDetail count_S_detail(double lambda, const SectorSpec& spec) {
  validate(spec);
  if (!(lambda > 0.0)) throw DomainError("counting level lambda must be positive");
  const double h = spec.r / spec.n_x;
  SectorCountDetail out;
  out.per_sector.resize(spec.l_max + 1);
  double frob_prev = 0.0, frob_last = 0.0;
  for (int l = 0; l <= spec.l_max; ++l) {
    const std::vector<double> sv = sector_profile(l, spec.r, spec.n_x);
    out.per_sector[l] = count_beyond(sv, h, spec.n_x, lambda);
    out.total += (2 * l + 1) * out.per_sector[l];
    const double fr = frobenius(sv, h, spec.n_x);
    if (l == spec.l_max - 1) frob_prev = fr;
    if (l == spec.l_max) {
      frob_last = fr;
      out.lmax_norm = spectral_norm(sv, h, spec.n_x);
    }
  }
  if (out.lmax_norm >= lambda)
    throw TruncationError(
        "last angular sector still reaches the counting level (norm " +
        std::to_string(out.lmax_norm) + " >= lambda); raise l_max");
  // Sectors decay monotonically within each parity, so the two final Frobenius
  // norms dominate everything discarded.
  out.tail_bound = std::max(frob_prev, frob_last);
  if (!(out.tail_bound < lambda / 2.0))
    throw TruncationError("discarded sectors are not certified below lambda/2 "
                          "(tail bound " + std::to_string(out.tail_bound) + ")");
  return out;
}

std::int64_t count_S(double lambda, const SectorSpec& spec) {
  return count_S_detail(lambda, spec).total;
}

UEstimate U_estimate(double lambda, const std::vector<double>& r_list) {
  if (r_list.size() < 3)
    throw InsufficientData("U estimate needs at least 3 radii");
  if (!std::is_sorted(r_list.begin(), r_list.end()))
    throw DomainError("radius list must be ascending");
  UEstimate out;
  out.r_list = r_list;
  std::vector<double> y;
  y.reserve(r_list.size());
  for (double r : r_list) {
    const std::int64_t c = count_S(lambda, make_sector_spec(r));
    out.counts.push_back(c);
    y.push_back(static_cast<double>(c));
  }
  const LsLine fit = least_squares(r_list, y);
  out.value = 0.5 * fit.slope;
  out.residual = fit.rms;
  return out;
}

LogFit fit_log_asymptotics(
    const std::vector<std::pair<double, std::int64_t>>& samples,
    double threshold) {
  if (samples.size() < 4)
    throw InsufficientData("log-law fit needs at least 4 samples, got " +
                           std::to_string(samples.size()));
  LogFit out;
  out.threshold = threshold;
  out.samples = samples;
  bool any_below = false, any_above = false;
  std::vector<double> x, y, dist;
  for (const auto& [z, N] : samples) {
    const double d = z - threshold;
    if (d == 0.0)
      throw DomainError("sample exactly at the threshold cannot enter the fit");
    (d < 0.0 ? any_below : any_above) = true;
    x.push_back(std::fabs(std::log(std::fabs(d))));
    y.push_back(static_cast<double>(N));
    dist.push_back(std::fabs(d));
  }
  if (any_below && any_above)
    throw DomainError("samples must all lie on one side of the threshold");
  // Closer to the threshold means larger |log distance|; the count must not
  // drop along that ordering.
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (x[order[i]] == x[order[i - 1]])
      throw DomainError("duplicate sample distances in log-law fit");
    if (y[order[i]] < y[order[i - 1]])
      throw DomainError("counts decrease toward the threshold; not a "
                        "log-accumulation data set");
  }
  const LsLine fit = least_squares(x, y);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.residual = fit.rms;
  out.slope_stderr = fit.slope_stderr;
  out.window = {*std::min_element(dist.begin(), dist.end()),
                *std::max_element(dist.begin(), dist.end())};
  return out;
}

}  // namespace torspec
