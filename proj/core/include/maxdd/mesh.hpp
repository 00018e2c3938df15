#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

namespace maxdd {

using Point = std::array<double, 3>;
using Lattice = std::array<int, 3>;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Local edge table of a tetrahedron: edge i joins local vertices
/// kLocalEdges[i][0] -> kLocalEdges[i][1].
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Local face i is opposite local vertex i.
inline constexpr std::array<std::array<int, 3>, 4> kLocalFaces{
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

enum class CubeFace : std::uint8_t { XLow, XHigh, YLow, YHigh, ZLow, ZHigh };

struct TetEdge {
  int edge = -1;
  int sign = 1;  // +1 when local direction agrees with the global one
};

struct BoundaryFace {
  std::array<int, 3> vertices;
  CubeFace tag;
  int tet;         // owning tetrahedron
  int local_face;  // index into kLocalFaces
};

/// Structured tetrahedral mesh of the unit cube. Each of the n^3 subcubes is
/// split into the 6 Kuhn (Freudenthal) tetrahedra sharing its main diagonal;
/// every subcube uses the same split, so meshes with n_coarse | n_fine nest.
///
/// Edges are globally oriented from the lower to the higher vertex index and
/// sorted lexicographically by (low, high).
struct TetMesh {
  int n_per_dir = 0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<TetEdge, 6>> tet_edges;
  std::vector<BoundaryFace> boundary_faces;
  std::vector<int> boundary_edges;          // ascending
  std::vector<std::uint8_t> is_boundary_edge;  // per edge

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_tets() const { return static_cast<int>(tets.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  int vertex_id(int i, int j, int k) const {
    const int m = n_per_dir + 1;
    return i + m * (j + m * k);
  }
  Lattice lattice(int vertex) const {
    const int m = n_per_dir + 1;
    return {vertex % m, (vertex / m) % m, vertex / (m * m)};
  }
  int subcube_id(int i, int j, int k) const {
    return i + n_per_dir * (j + n_per_dir * k);
  }
  /// Subcube containing tet t (tets are stored 6 per subcube).
  int subcube_of_tet(int t) const { return t / 6; }

  std::array<Point, 4> tet_coordinates(int t) const;
  double tet_volume(int t) const;

  /// Tet containing the point numer/denom (coordinates given as integer
  /// fractions of the unit cube so the lookup is exact). Points on shared
  /// faces resolve to one of the adjacent tets.
  int locate(const Lattice& numer, int denom) const;
  int locate(const Point& p) const;
};

TetMesh build_cube_mesh(int n);

struct NestedMeshPair {
  std::shared_ptr<const TetMesh> fine;
  std::shared_ptr<const TetMesh> coarse;
  std::vector<int> containment;  // fine tet -> coarse tet
};

NestedMeshPair build_nested_pair(int n_fine, int n_coarse);
NestedMeshPair build_nested_pair(std::shared_ptr<const TetMesh> fine, int n_coarse);

/// Edges not on the cube boundary, ascending.
std::vector<int> interior_edge_set(const TetMesh& mesh);

/// Plain-text dump: a header line then `v x y z`, `t a b c d`, `e a b` lines.
void write_mesh(std::ostream& os, const TetMesh& mesh);

}  // namespace maxdd
