#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "maxdd/mesh.hpp"
#include "maxdd/types.hpp"

namespace maxdd {

/// Source term J.
///  - GaussianBump: J = (f, f, f), f = -exp(-400 |x - (0.5, 0.5, 0.5)|^2).
///  - Manufactured: J = curl curl E* + E* = (2 pi^2 + 1) E* for
///    E* = (sin(pi y) sin(pi z), sin(pi z) sin(pi x), sin(pi x) sin(pi y)),
///    the source of the coercive problem curl curl E + E = J.
///  - Zero: J = 0.
enum class SourceKind { GaussianBump, Manufactured, Zero };

/// Physical problem on the unit cube:
///   curl curl E - (k^2 + i kappa) E = J, with PEC or impedance boundary.
/// For a conducting medium kappa = k sigma Z; only kappa itself is modelled.
struct ProblemConfig {
  double k = 1.0;
  double kappa = 0.0;
  BoundaryCondition bc = BoundaryCondition::PEC;
  SourceKind rhs = SourceKind::GaussianBump;
};

void validate(const ProblemConfig& config);

/// Active edges (degrees of freedom) of a mesh. PEC eliminates the boundary
/// edges; the impedance problem keeps every edge.
struct DofMap {
  std::vector<int> edges;        // dof -> edge, ascending
  std::vector<int> dof_of_edge;  // edge -> dof or -1

  int size() const { return static_cast<int>(edges.size()); }
};

DofMap make_dof_map(const TetMesh& mesh, BoundaryCondition bc);

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector3 = Eigen::Vector3d;

struct ElementMatrices {
  Matrix6 curl_curl;  // int curl w_i . curl w_j
  Matrix6 mass;       // int w_i . w_j
};

/// Gradients of the barycentric coordinates of a tetrahedron (constant).
std::array<Vector3, 4> barycentric_gradients(const std::array<Point, 4>& x);

double signed_volume(const std::array<Point, 4>& x);

/// Lowest-order Nedelec element matrices in local edge order, signs applied.
/// Throws InvalidArgument for a degenerate or negatively oriented tet.
ElementMatrices element_matrices(const std::array<Point, 4>& x, const std::array<int, 6>& signs);

/// Tangential boundary mass int_F (w_i x n).(w_j x n) over local face
/// `local_face` of the tet. Only the three edges of the face contribute.
Matrix6 face_tangential_mass(const std::array<Point, 4>& x, const std::array<int, 6>& signs,
                             int local_face);

/// Value of the signed local basis function of edge `e` at barycentric point `lambda`.
Vector3 edge_basis(const std::array<Vector3, 4>& grads, const std::array<double, 4>& lambda,
                   int e, int sign);

/// The three real operators behind every Maxwell matrix on a set of DOFs,
/// sharing one sparsity pattern: A = S - (k^2 + i kappa) M - i k G.
struct FemOperators {
  SparseRealMatrix curl_curl;      // S
  SparseRealMatrix mass;           // M
  SparseRealMatrix boundary_mass;  // G, impedance surface term (may be all zero)
};

/// S, M, G over the whole mesh. G collects the cube boundary faces when
/// bc == Impedance and is zero for PEC.
FemOperators assemble_operators(const TetMesh& mesh, const DofMap& dofs, BoundaryCondition bc);

/// S - (k^2 + i kappa) M - i k G, computed entrywise on the shared pattern.
SparseComplexMatrix combine(const FemOperators& ops, double k, double kappa);

struct GlobalSystem {
  SparseComplexMatrix matrix;
  DofMap dofs;
};

GlobalSystem assemble_global(const TetMesh& mesh, const ProblemConfig& config);

/// k-weighted H(curl) Gram matrix C_k = S + k^2 M (real SPD).
SparseRealMatrix assemble_ck(const TetMesh& mesh, double k, const DofMap& dofs);

inline constexpr int kDefaultRhsDegree = 4;

/// F_i = int J . w_{e_i}, using a tet rule exact to polynomial degree `degree`.
ComplexVector assemble_rhs(const TetMesh& mesh, const ProblemConfig& config, const DofMap& dofs,
                           int degree = kDefaultRhsDegree);

Vector3 source_value(SourceKind kind, const Point& x);
Vector3 manufactured_field(const Point& x);
Vector3 manufactured_curl(const Point& x);

/// Principal submatrix of `matrix` on the ascending index set `subset`.
SparseComplexMatrix local_matrix_pec(const SparseComplexMatrix& matrix, std::span<const int> subset);

struct LocalSystem {
  SparseComplexMatrix matrix;
  std::vector<int> dofs;  // global dof indices, ascending
};

/// Maxwell matrix on the union of `elements` with homogeneous impedance
/// conditions on the subdomain faces interior to the cube. Faces on the cube
/// boundary follow the global condition in `config.bc`: eliminated edges for
/// PEC, the same -ik surface term for impedance.
LocalSystem local_matrix_impedance(const TetMesh& mesh, std::span<const int> elements,
                                   const ProblemConfig& config, const DofMap& global_dofs);

/// MatrixMarket coordinate complex general.
void write_matrix_market(std::ostream& os, const SparseComplexMatrix& matrix);

/// max |A_ij - A_ji| / max |A_ij|.
double symmetry_defect(const SparseComplexMatrix& matrix);

}  // namespace maxdd
