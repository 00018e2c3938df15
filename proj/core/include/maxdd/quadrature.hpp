#pragma once

#include <array>
#include <vector>

namespace maxdd {

struct QuadraturePoint1D {
  double x;  // on [0, 1]
  double w;
};

/// Gauss-Legendre rule with `points` nodes mapped to [0, 1].
std::vector<QuadraturePoint1D> gauss_legendre(int points);

struct TetQuadraturePoint {
  std::array<double, 4> barycentric;
  double w;  // weights sum to 1 (multiply by the tet volume)
};

/// Collapsed (Duffy) tensor-product rule on the reference tetrahedron that
/// integrates polynomials of total degree <= `degree` exactly.
std::vector<TetQuadraturePoint> tet_quadrature(int degree);

}  // namespace maxdd
