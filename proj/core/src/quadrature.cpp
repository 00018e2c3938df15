#include "maxdd/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maxdd {

std::vector<QuadraturePoint1D> gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  std::vector<QuadraturePoint1D> rule(points);
  for (int i = 0; i < points; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule[i] = {0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)};
  }
  return rule;
}

std::vector<TetQuadraturePoint> tet_quadrature(int degree) {
  if (degree < 0) throw std::invalid_argument("tet_quadrature: negative degree");
  // The collapsed map adds up to degree 2 in the first variable.
  const int q = (degree + 2) / 2 + 1;
  const auto g = gauss_legendre(q);
  std::vector<TetQuadraturePoint> rule;
  rule.reserve(static_cast<std::size_t>(q) * q * q);
  for (const auto& a : g)
    for (const auto& b : g)
      for (const auto& c : g) {
        // (u, v, w) in the unit cube -> reference tet x = u, y = (1-u) v,
        // z = (1-u)(1-v) w with Jacobian (1-u)^2 (1-v).
        const double x = a.x;
        const double y = (1.0 - a.x) * b.x;
        const double z = (1.0 - a.x) * (1.0 - b.x) * c.x;
        const double jac = (1.0 - a.x) * (1.0 - a.x) * (1.0 - b.x);
        // Reference volume is 1/6; normalize weights to sum to one.
        rule.push_back({{1.0 - x - y - z, x, y, z}, 6.0 * a.w * b.w * c.w * jac});
      }
  return rule;
}

}  // namespace maxdd
