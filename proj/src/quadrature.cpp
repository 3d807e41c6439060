// quadrature.cpp — midpoint grids, fiber integrals, Richardson ladder.
#include "torspec/quadrature.hpp"

#include <cmath>
#include <string>

namespace torspec {

std::vector<double> shifted_nodes(int n) {
  if (n < 2 || (n % 2) != 0) throw DomainError("grid size must be even and >= 2, got " + std::to_string(n));
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) v[j] = (2.0 * j + 1.0) * kPi / n - kPi;
  return v;
}

TorusGrid::TorusGrid(int n_, bool normalized_measure)
    : n(n_), nodes(shifted_nodes(n_)), normalized(normalized_measure) {
  double h = kTwoPi / n;
  weight = h * h * h;
  if (normalized) weight /= (kTwoPi * kTwoPi * kTwoPi);
}

Vec3 TorusGrid::node(std::int64_t flat) const {
  int i2 = static_cast<int>(flat % n);
  int i1 = static_cast<int>((flat / n) % n);
  int i0 = static_cast<int>(flat / (static_cast<std::int64_t>(n) * n));
  return {nodes[i0], nodes[i1], nodes[i2]};
}

double integrate_torus(const std::function<double(const Vec3&)>& f, int n,
                       bool normalized_measure) {
  TorusGrid g(n, normalized_measure);
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) acc += f({g.nodes[i], g.nodes[j], g.nodes[l]});
  return acc * g.weight;
}

FiberIntegrator::FiberIntegrator(const Vec3& k, const QuadratureSpec& spec)
    : k_(k), spec_(spec) {
  for (int li = 0; li < 3; ++li) {
    int n = spec_.levels[li];
    if (li > 0 && n != 2 * spec_.levels[li - 1])
      throw DomainError("quadrature levels must double: " +
                        std::to_string(spec_.levels[0]) + "," +
                        std::to_string(spec_.levels[1]) + "," +
                        std::to_string(spec_.levels[2]));
    std::vector<double> nodes = shifted_nodes(n);
    auto& chart = chart_[li];
    chart.resize(static_cast<std::size_t>(n) * n * n);
    // Precompute the separable cosine pieces: w2(k, k+s) = eps(k) + 6
    //   - sum_i [cos(k_i + s_i/2) + cos(k_i + s_i)].
    std::array<std::vector<double>, 3> axis;
    for (int d = 0; d < 3; ++d) {
      axis[d].resize(n);
      for (int j = 0; j < n; ++j)
        axis[d][j] = std::cos(k_[d] + 0.5 * nodes[j]) + std::cos(k_[d] + nodes[j]);
    }
    double base = eps(k_) + 6.0;
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
      double pa = base - axis[0][a];
      for (int b = 0; b < n; ++b) {
        double pb = pa - axis[1][b];
        for (int c = 0; c < n; ++c) chart[idx++] = pb - axis[2][c];
      }
    }
    double h = kTwoPi / n;
    w_[li] = h * h * h;
    if (spec_.normalized_measure) w_[li] /= (kTwoPi * kTwoPi * kTwoPi);
  }
}

double FiberIntegrator::level_sum(int level_index, double z) const {
  const auto& chart = chart_[level_index];
  double acc = 0.0;
  for (double wv : chart) acc += 1.0 / (wv - z);
  return acc * w_[level_index];
}

IntegralResult FiberIntegrator::value(double z) const {
  IntegralResult r;
  for (int li = 0; li < 3; ++li) r.raw[li] = level_sum(li, z);
  double r1a = 2.0 * r.raw[1] - r.raw[0];
  double r1b = 2.0 * r.raw[2] - r.raw[1];
  r.value = (4.0 * r1b - r1a) / 3.0;
  r.error_est = std::fabs(r.value - r1b);
  if (spec_.tol > 0.0 && r.error_est > spec_.tol)
    throw ConvergenceFailure("fiber integral error estimate " +
                             std::to_string(r.error_est) + " exceeds tol " +
                             std::to_string(spec_.tol));
  return r;
}

IntegralResult I_integral(const Vec3& k, double z, const QuadratureSpec& spec) {
  return FiberIntegrator(k, spec).value(z);
}

}  // namespace torspec
