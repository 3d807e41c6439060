// quadrature.hpp — midpoint grids on the torus and fiber integrals with
// Richardson extrapolation.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "torspec/errors.hpp"
#include "torspec/torus.hpp"

namespace torspec {

// Shifted midpoint nodes (2j+1)pi/n - pi, j = 0..n-1.  They avoid all
// high-symmetry points, are closed under negation, and are closed under the
// half-period shift x -> x + pi (mod 2pi) when n is even — the property that
// makes mirror identities hold exactly node-for-node.
std::vector<double> shifted_nodes(int n);

struct TorusGrid {
  explicit TorusGrid(int n_, bool normalized_measure = false);
  int n;                       // nodes per axis (even)
  std::vector<double> nodes;   // shifted midpoint nodes, length n
  double weight;               // per-node cubature weight (h^3, or h^3/(2pi)^3)
  bool normalized;             // Lebesgue (false) vs probability (true) measure

  std::int64_t size() const { return static_cast<std::int64_t>(n) * n * n; }
  Vec3 node(std::int64_t flat) const;  // flat row-major index -> point
};

// Integrate a smooth function over the torus with the product midpoint rule.
double integrate_torus(const std::function<double(const Vec3&)>& f, int n,
                       bool normalized_measure = false);

struct QuadratureSpec {
  // Doubling ladder of grid sizes for the two-level Richardson scheme.
  std::array<int, 3> levels{32, 64, 128};
  bool normalized_measure{false};
  double tol{0.0};  // >0: throw ConvergenceFailure if error estimate exceeds it
};

struct IntegralResult {
  double value{0.0};       // extrapolated value
  double error_est{0.0};   // |second-order minus first-order extrapolant|
  std::array<double, 3> raw{};  // plain sums at the three levels
};

// Fiber integral I(k; z) = ∫ dt / (w2(k,t) - z) over the torus, evaluated in
// the shifted chart t = k + s so the integrand is smooth in s.  The plain
// midpoint sums converge at first order near band edges (the integrand loses
// smoothness there); the two-stage Richardson ladder restores ~3rd order.
// Caches the chart values per level so repeated z-evaluations at fixed k are
// cheap (used heavily by root finding in z).
class FiberIntegrator {
 public:
  FiberIntegrator(const Vec3& k, const QuadratureSpec& spec = {});

  // Extrapolated integral at spectral parameter z (z outside [lo, hi] of the
  // fiber band for a sign-definite integrand; not enforced here).
  IntegralResult value(double z) const;

  // Plain midpoint sum at one cached level (index 0..2).
  double level_sum(int level_index, double z) const;

  const Vec3& k() const { return k_; }
  const QuadratureSpec& spec() const { return spec_; }

 private:
  Vec3 k_;
  QuadratureSpec spec_;
  std::array<std::vector<double>, 3> chart_;   // w2 values per level
  std::array<double, 3> w_{};                  // cubature weights per level
};

// One-shot convenience wrapper.
IntegralResult I_integral(const Vec3& k, double z, const QuadratureSpec& spec = {});

}  // namespace torspec
