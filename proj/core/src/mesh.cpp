#include "maxdd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace maxdd {
namespace {

// Axis orderings of the six Kuhn simplices. Simplex p contains the points of
// the unit subcube with x[a0] >= x[a1] >= x[a2], where (a0, a1, a2) = kPerms[p].
constexpr std::array<std::array<int, 3>, 6> kPerms{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
constexpr std::array<bool, 6> kOdd{false, true, true, false, false, true};

int perm_index(int a0, int a1) {
  for (int p = 0; p < 6; ++p) {
    if (kPerms[p][0] == a0 && kPerms[p][1] == a1) return p;
  }
  return 0;
}

// Kuhn simplex containing local coordinates c (any totally ordered type).
template <class T>
int kuhn_simplex(const std::array<T, 3>& c) {
  std::array<int, 3> axes{0, 1, 2};
  std::stable_sort(axes.begin(), axes.end(),
                   [&](int a, int b) { return c[a] > c[b]; });
  return perm_index(axes[0], axes[1]);
}

double det3(const Point& a, const Point& b, const Point& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

std::array<Point, 4> TetMesh::tet_coordinates(int t) const {
  const auto& tv = tets[t];
  return {vertices[tv[0]], vertices[tv[1]], vertices[tv[2]], vertices[tv[3]]};
}

double TetMesh::tet_volume(int t) const {
  const auto x = tet_coordinates(t);
  Point a, b, c;
  for (int d = 0; d < 3; ++d) {
    a[d] = x[1][d] - x[0][d];
    b[d] = x[2][d] - x[0][d];
    c[d] = x[3][d] - x[0][d];
  }
  return det3(a, b, c) / 6.0;
}

int TetMesh::locate(const Lattice& numer, int denom) const {
  // Scale to subcube units: coordinate * n = numer * n / denom.
  std::array<long long, 3> cell{};
  std::array<long long, 3> rem{};
  for (int d = 0; d < 3; ++d) {
    const long long s = static_cast<long long>(numer[d]) * n_per_dir;
    long long c = s / denom;
    if (c >= n_per_dir) c = n_per_dir - 1;
    if (c < 0) c = 0;
    cell[d] = c;
    rem[d] = s - c * denom;
  }
  const int cube = subcube_id(static_cast<int>(cell[0]), static_cast<int>(cell[1]),
                              static_cast<int>(cell[2]));
  return 6 * cube + kuhn_simplex(rem);
}

int TetMesh::locate(const Point& p) const {
  std::array<int, 3> cell{};
  std::array<double, 3> local{};
  for (int d = 0; d < 3; ++d) {
    const double s = p[d] * n_per_dir;
    int c = static_cast<int>(std::floor(s));
    c = std::clamp(c, 0, n_per_dir - 1);
    cell[d] = c;
    local[d] = s - c;
  }
  return 6 * subcube_id(cell[0], cell[1], cell[2]) + kuhn_simplex(local);
}

TetMesh build_cube_mesh(int n) {
  if (n < 1) throw InvalidArgument("build_cube_mesh: n must be >= 1, got " + std::to_string(n));

  TetMesh mesh;
  mesh.n_per_dir = n;
  const int m = n + 1;
  mesh.vertices.resize(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        mesh.vertices[mesh.vertex_id(i, j, k)] = {static_cast<double>(i) / n,
                                                  static_cast<double>(j) / n,
                                                  static_cast<double>(k) / n};

  mesh.tets.reserve(static_cast<std::size_t>(6) * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        for (int p = 0; p < 6; ++p) {
          std::array<int, 4> tv{};
          Lattice c{i, j, k};
          tv[0] = mesh.vertex_id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[kPerms[p][s]];
            tv[s + 1] = mesh.vertex_id(c[0], c[1], c[2]);
          }
          // Odd permutations give negatively oriented simplices.
          if (kOdd[p]) std::swap(tv[2], tv[3]);
          mesh.tets.push_back(tv);
        }
      }

  std::vector<std::array<int, 2>> pairs;
  pairs.reserve(mesh.tets.size() * 6);
  for (const auto& tv : mesh.tets)
    for (const auto& le : kLocalEdges) {
      const int a = tv[le[0]], b = tv[le[1]];
      pairs.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  mesh.edges = std::move(pairs);

  mesh.tet_edges.resize(mesh.tets.size());
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto& tv = mesh.tets[t];
    for (int e = 0; e < 6; ++e) {
      const int a = tv[kLocalEdges[e][0]], b = tv[kLocalEdges[e][1]];
      const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      const auto it = std::lower_bound(mesh.edges.begin(), mesh.edges.end(), key);
      mesh.tet_edges[t][e] = {static_cast<int>(it - mesh.edges.begin()), a < b ? 1 : -1};
    }
  }

  mesh.is_boundary_edge.assign(mesh.edges.size(), 0);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto& tv = mesh.tets[t];
    for (int f = 0; f < 4; ++f) {
      std::array<Lattice, 3> lv;
      for (int q = 0; q < 3; ++q) lv[q] = mesh.lattice(tv[kLocalFaces[f][q]]);
      for (int d = 0; d < 3; ++d) {
        for (int side = 0; side < 2; ++side) {
          const int plane = side == 0 ? 0 : n;
          if (lv[0][d] == plane && lv[1][d] == plane && lv[2][d] == plane) {
            BoundaryFace bf{{tv[kLocalFaces[f][0]], tv[kLocalFaces[f][1]], tv[kLocalFaces[f][2]]},
                            static_cast<CubeFace>(2 * d + side), static_cast<int>(t), f};
            mesh.boundary_faces.push_back(bf);
            for (int e = 0; e < 6; ++e) {
              const int la = kLocalEdges[e][0], lb = kLocalEdges[e][1];
              if (la != f && lb != f) mesh.is_boundary_edge[mesh.tet_edges[t][e].edge] = 1;
            }
          }
        }
      }
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.is_boundary_edge[e]) mesh.boundary_edges.push_back(e);
  return mesh;
}

NestedMeshPair build_nested_pair(std::shared_ptr<const TetMesh> fine, int n_coarse) {
  if (!fine) throw InvalidArgument("build_nested_pair: null fine mesh");
  if (n_coarse < 1 || fine->n_per_dir % n_coarse != 0)
    throw InvalidArgument("build_nested_pair: n_coarse=" + std::to_string(n_coarse) +
                          " does not divide n_fine=" + std::to_string(fine->n_per_dir));
  NestedMeshPair pair;
  pair.fine = fine;
  pair.coarse = n_coarse == fine->n_per_dir
                    ? fine
                    : std::make_shared<const TetMesh>(build_cube_mesh(n_coarse));
  pair.containment.resize(fine->tets.size());
  // Barycenter = (sum of lattice vertices) / (4 n_fine).
  const int denom = 4 * fine->n_per_dir;
  for (int t = 0; t < fine->num_tets(); ++t) {
    Lattice sum{0, 0, 0};
    for (int v : fine->tets[t]) {
      const auto l = fine->lattice(v);
      for (int d = 0; d < 3; ++d) sum[d] += l[d];
    }
    pair.containment[t] = pair.coarse->locate(sum, denom);
  }
  return pair;
}

NestedMeshPair build_nested_pair(int n_fine, int n_coarse) {
  if (n_fine < 1) throw InvalidArgument("build_nested_pair: n_fine must be >= 1");
  if (n_coarse < 1 || n_fine % n_coarse != 0)
    throw InvalidArgument("build_nested_pair: n_coarse=" + std::to_string(n_coarse) +
                          " does not divide n_fine=" + std::to_string(n_fine));
  return build_nested_pair(std::make_shared<const TetMesh>(build_cube_mesh(n_fine)), n_coarse);
}

std::vector<int> interior_edge_set(const TetMesh& mesh) {
  std::vector<int> out;
  out.reserve(mesh.edges.size() - mesh.boundary_edges.size());
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.is_boundary_edge[e]) out.push_back(e);
  return out;
}

void write_mesh(std::ostream& os, const TetMesh& mesh) {
  os << "# maxdd-mesh n=" << mesh.n_per_dir << " vertices=" << mesh.num_vertices()
     << " tets=" << mesh.num_tets() << " edges=" << mesh.num_edges() << '\n';
  const auto old_precision = os.precision(17);
  for (const auto& v : mesh.vertices) os << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const auto& t : mesh.tets) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  for (const auto& e : mesh.edges) os << "e " << e[0] << ' ' << e[1] << '\n';
  os.precision(old_precision);
}

}  // namespace maxdd
