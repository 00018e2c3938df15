#include "maxdd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <Eigen/LU>

#include "maxdd/quadrature.hpp"

namespace maxdd {
namespace {

using std::numbers::pi;

Vector3 to_vec(const Point& p) { return {p[0], p[1], p[2]}; }

struct SurfaceFace {
  int tet;
  int local_face;
};

// Edges through the vertex opposite a face have zero tangential trace on it.
bool off_face(int local_edge, int local_face) {
  return kLocalEdges[local_edge][0] == local_face || kLocalEdges[local_edge][1] == local_face;
}

// Sparsity pattern + values for the three real operators on n local dofs.
FemOperators assemble_on(const TetMesh& mesh, std::span<const int> elements,
                         const std::vector<int>& local_of_edge, int n,
                         std::span<const SurfaceFace> faces) {
  std::vector<std::vector<int>> rows(n);
  for (int t : elements) {
    std::array<int, 6> d{};
    for (int e = 0; e < 6; ++e) d[e] = local_of_edge[mesh.tet_edges[t][e].edge];
    for (int a = 0; a < 6; ++a) {
      if (d[a] < 0) continue;
      for (int b = 0; b < 6; ++b)
        if (d[b] >= 0) rows[d[a]].push_back(d[b]);
    }
  }
  std::vector<int> outer(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    outer[i + 1] = outer[i] + static_cast<int>(r.size());
  }
  std::vector<int> inner;
  inner.reserve(outer[n]);
  for (auto& r : rows) {
    inner.insert(inner.end(), r.begin(), r.end());
    std::vector<int>().swap(r);
  }

  std::vector<double> s(inner.size(), 0.0), m(inner.size(), 0.0), g(inner.size(), 0.0);
  auto slot = [&](int i, int j) {
    const auto first = inner.begin() + outer[i];
    const auto last = inner.begin() + outer[i + 1];
    return static_cast<std::size_t>(std::lower_bound(first, last, j) - inner.begin());
  };

  for (int t : elements) {
    std::array<int, 6> d{}, signs{};
    for (int e = 0; e < 6; ++e) {
      d[e] = local_of_edge[mesh.tet_edges[t][e].edge];
      signs[e] = mesh.tet_edges[t][e].sign;
    }
    const auto em = element_matrices(mesh.tet_coordinates(t), signs);
    for (int a = 0; a < 6; ++a) {
      if (d[a] < 0) continue;
      for (int b = 0; b < 6; ++b) {
        if (d[b] < 0) continue;
        const auto p = slot(d[a], d[b]);
        s[p] += em.curl_curl(a, b);
        m[p] += em.mass(a, b);
      }
    }
  }
  for (const auto& f : faces) {
    const int t = f.tet;
    std::array<int, 6> d{}, signs{};
    for (int e = 0; e < 6; ++e) {
      d[e] = local_of_edge[mesh.tet_edges[t][e].edge];
      signs[e] = mesh.tet_edges[t][e].sign;
    }
    const auto fm = face_tangential_mass(mesh.tet_coordinates(t), signs, f.local_face);
    for (int a = 0; a < 6; ++a) {
      if (d[a] < 0 || off_face(a, f.local_face)) continue;
      for (int b = 0; b < 6; ++b) {
        if (d[b] < 0 || off_face(b, f.local_face)) continue;
        g[slot(d[a], d[b])] += fm(a, b);
      }
    }
  }

  auto make = [&](const std::vector<double>& values) {
    return SparseRealMatrix(Eigen::Map<const SparseRealMatrix>(
        n, n, static_cast<int>(inner.size()), outer.data(), inner.data(), values.data()));
  };
  return {make(s), make(m), make(g)};
}

std::vector<int> all_elements(const TetMesh& mesh) {
  std::vector<int> out(mesh.tets.size());
  for (int t = 0; t < mesh.num_tets(); ++t) out[t] = t;
  return out;
}

}  // namespace

void validate(const ProblemConfig& config) {
  if (!(config.k > 0.0) || !std::isfinite(config.k))
    throw InvalidArgument("wavenumber k must be positive, got " + std::to_string(config.k));
  if (!std::isfinite(config.kappa)) throw InvalidArgument("absorption kappa must be finite");
}

DofMap make_dof_map(const TetMesh& mesh, BoundaryCondition bc) {
  DofMap map;
  map.dof_of_edge.assign(mesh.edges.size(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (bc == BoundaryCondition::PEC && mesh.is_boundary_edge[e]) continue;
    map.dof_of_edge[e] = map.size();
    map.edges.push_back(e);
  }
  return map;
}

double signed_volume(const std::array<Point, 4>& x) {
  Eigen::Matrix3d j;
  for (int c = 0; c < 3; ++c) j.col(c) = to_vec(x[c + 1]) - to_vec(x[0]);
  return j.determinant() / 6.0;
}

std::array<Vector3, 4> barycentric_gradients(const std::array<Point, 4>& x) {
  Eigen::Matrix3d j;
  for (int c = 0; c < 3; ++c) j.col(c) = to_vec(x[c + 1]) - to_vec(x[0]);
  const Eigen::Matrix3d inv = j.inverse();
  std::array<Vector3, 4> g;
  for (int i = 0; i < 3; ++i) g[i + 1] = inv.row(i).transpose();
  g[0] = -(g[1] + g[2] + g[3]);
  return g;
}

Vector3 edge_basis(const std::array<Vector3, 4>& grads, const std::array<double, 4>& lambda, int e,
                   int sign) {
  const int a = kLocalEdges[e][0], b = kLocalEdges[e][1];
  return sign * (lambda[a] * grads[b] - lambda[b] * grads[a]);
}

ElementMatrices element_matrices(const std::array<Point, 4>& x, const std::array<int, 6>& signs) {
  const double vol = signed_volume(x);
  if (!(vol > 0.0))
    throw InvalidArgument("element_matrices: degenerate or inverted tetrahedron (volume " +
                          std::to_string(vol) + ")");
  const auto g = barycentric_gradients(x);

  std::array<Vector3, 6> curls;
  for (int e = 0; e < 6; ++e)
    curls[e] = 2.0 * signs[e] * g[kLocalEdges[e][0]].cross(g[kLocalEdges[e][1]]);

  // int lambda_p lambda_q = vol (1 + delta_pq) / 20
  auto lam = [vol](int p, int q) { return vol * (p == q ? 2.0 : 1.0) / 20.0; };

  ElementMatrices out;
  for (int i = 0; i < 6; ++i) {
    const int a = kLocalEdges[i][0], b = kLocalEdges[i][1];
    for (int j = i; j < 6; ++j) {
      const int c = kLocalEdges[j][0], d = kLocalEdges[j][1];
      out.curl_curl(i, j) = vol * curls[i].dot(curls[j]);
      const double mij = lam(a, c) * g[b].dot(g[d]) - lam(a, d) * g[b].dot(g[c]) -
                         lam(b, c) * g[a].dot(g[d]) + lam(b, d) * g[a].dot(g[c]);
      out.mass(i, j) = signs[i] * signs[j] * mij;
      out.curl_curl(j, i) = out.curl_curl(i, j);
      out.mass(j, i) = out.mass(i, j);
    }
  }
  return out;
}

Matrix6 face_tangential_mass(const std::array<Point, 4>& x, const std::array<int, 6>& signs,
                             int local_face) {
  const auto g = barycentric_gradients(x);
  const auto& fv = kLocalFaces[local_face];
  const Vector3 p0 = to_vec(x[fv[0]]), p1 = to_vec(x[fv[1]]), p2 = to_vec(x[fv[2]]);
  const Vector3 cr = (p1 - p0).cross(p2 - p0);
  const double area = 0.5 * cr.norm();
  const Vector3 n = cr.normalized();
  const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - n * n.transpose();

  Matrix6 out = Matrix6::Zero();
  // Edge-midpoint rule, exact for the quadratic integrand.
  for (int q = 0; q < 3; ++q) {
    std::array<double, 4> lambda{0.0, 0.0, 0.0, 0.0};
    lambda[fv[q]] = 0.5;
    lambda[fv[(q + 1) % 3]] = 0.5;
    std::array<Vector3, 6> wt;
    for (int e = 0; e < 6; ++e)
      wt[e] = off_face(e, local_face) ? Vector3::Zero()
                                      : Vector3(proj * edge_basis(g, lambda, e, signs[e]));
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) out(i, j) += area / 3.0 * wt[i].dot(wt[j]);
  }
  return out;
}

FemOperators assemble_operators(const TetMesh& mesh, const DofMap& dofs, BoundaryCondition bc) {
  std::vector<SurfaceFace> faces;
  if (bc == BoundaryCondition::Impedance) {
    faces.reserve(mesh.boundary_faces.size());
    for (const auto& bf : mesh.boundary_faces) faces.push_back({bf.tet, bf.local_face});
  }
  const auto elements = all_elements(mesh);
  return assemble_on(mesh, elements, dofs.dof_of_edge, dofs.size(), faces);
}

SparseComplexMatrix combine(const FemOperators& ops, double k, double kappa) {
  const Complex shift(k * k, kappa);
  const Complex surface(0.0, -k);
  SparseComplexMatrix a = ops.curl_curl.cast<Complex>();
  const auto nnz = static_cast<std::size_t>(a.nonZeros());
  Complex* av = a.valuePtr();
  const double* m = ops.mass.valuePtr();
  const double* g = ops.boundary_mass.valuePtr();
  for (std::size_t p = 0; p < nnz; ++p) av[p] += -shift * m[p] + surface * g[p];
  return a;
}

GlobalSystem assemble_global(const TetMesh& mesh, const ProblemConfig& config) {
  validate(config);
  GlobalSystem sys;
  sys.dofs = make_dof_map(mesh, config.bc);
  const auto ops = assemble_operators(mesh, sys.dofs, config.bc);
  sys.matrix = combine(ops, config.k, config.kappa);
  return sys;
}

SparseRealMatrix assemble_ck(const TetMesh& mesh, double k, const DofMap& dofs) {
  if (!(k > 0.0)) throw InvalidArgument("assemble_ck: k must be positive");
  const auto ops = assemble_operators(mesh, dofs, BoundaryCondition::PEC);
  SparseRealMatrix c = ops.curl_curl;
  const auto nnz = static_cast<std::size_t>(c.nonZeros());
  for (std::size_t p = 0; p < nnz; ++p) c.valuePtr()[p] += k * k * ops.mass.valuePtr()[p];
  return c;
}

Vector3 manufactured_field(const Point& x) {
  const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
  return {sy * sz, sz * sx, sx * sy};
}

Vector3 manufactured_curl(const Point& x) {
  const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
  const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]), cz = std::cos(pi * x[2]);
  return {pi * sx * (cy - cz), pi * sy * (cz - cx), pi * sz * (cx - cy)};
}

Vector3 source_value(SourceKind kind, const Point& x) {
  switch (kind) {
    case SourceKind::GaussianBump: {
      const double r2 = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5) +
                        (x[2] - 0.5) * (x[2] - 0.5);
      const double f = -std::exp(-400.0 * r2);
      return {f, f, f};
    }
    case SourceKind::Manufactured:
      return (2.0 * pi * pi + 1.0) * manufactured_field(x);
    case SourceKind::Zero:
      break;
  }
  return Vector3::Zero();
}

ComplexVector assemble_rhs(const TetMesh& mesh, const ProblemConfig& config, const DofMap& dofs,
                           int degree) {
  ComplexVector f = ComplexVector::Zero(dofs.size());
  if (config.rhs == SourceKind::Zero) return f;
  const auto rule = tet_quadrature(degree);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto x = mesh.tet_coordinates(t);
    const double vol = signed_volume(x);
    const auto g = barycentric_gradients(x);
    std::array<double, 6> local{};
    for (const auto& q : rule) {
      Point p{0.0, 0.0, 0.0};
      for (int v = 0; v < 4; ++v)
        for (int d = 0; d < 3; ++d) p[d] += q.barycentric[v] * x[v][d];
      const Vector3 j = source_value(config.rhs, p);
      for (int e = 0; e < 6; ++e)
        local[e] += q.w * j.dot(edge_basis(g, q.barycentric, e, mesh.tet_edges[t][e].sign));
    }
    for (int e = 0; e < 6; ++e) {
      const int d = dofs.dof_of_edge[mesh.tet_edges[t][e].edge];
      if (d >= 0) f[d] += vol * local[e];
    }
  }
  return f;
}

SparseComplexMatrix local_matrix_pec(const SparseComplexMatrix& matrix, std::span<const int> subset) {
  const int n = static_cast<int>(subset.size());
  for (int i : subset)
    if (i < 0 || i >= matrix.rows())
      throw InvalidArgument("local_matrix_pec: index " + std::to_string(i) + " out of range");
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int li = 0; li < n; ++li) {
    for (SparseComplexMatrix::InnerIterator it(matrix, subset[li]); it; ++it) {
      const auto pos = std::lower_bound(subset.begin(), subset.end(), it.col());
      if (pos != subset.end() && *pos == it.col())
        trips.emplace_back(li, static_cast<int>(pos - subset.begin()), it.value());
    }
  }
  SparseComplexMatrix out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

LocalSystem local_matrix_impedance(const TetMesh& mesh, std::span<const int> elements,
                                   const ProblemConfig& config, const DofMap& global_dofs) {
  validate(config);
  if (elements.empty()) throw InvalidArgument("local_matrix_impedance: empty element set");

  LocalSystem out;
  std::vector<int> edges;
  edges.reserve(elements.size() * 6);
  for (int t : elements)
    for (const auto& te : mesh.tet_edges[t])
      if (global_dofs.dof_of_edge[te.edge] >= 0) edges.push_back(te.edge);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<int> local_of_edge(mesh.edges.size(), -1);
  out.dofs.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    local_of_edge[edges[i]] = static_cast<int>(i);
    out.dofs.push_back(global_dofs.dof_of_edge[edges[i]]);
  }

  // Faces seen once inside the element set lie on the subdomain boundary.
  struct FaceKey {
    std::array<int, 3> v;
    int tet;
    int local_face;
  };
  std::vector<FaceKey> keys;
  keys.reserve(elements.size() * 4);
  for (int t : elements)
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> v{mesh.tets[t][kLocalFaces[f][0]], mesh.tets[t][kLocalFaces[f][1]],
                           mesh.tets[t][kLocalFaces[f][2]]};
      std::sort(v.begin(), v.end());
      keys.push_back({v, t, f});
    }
  std::sort(keys.begin(), keys.end(), [](const FaceKey& a, const FaceKey& b) {
    return a.v != b.v ? a.v < b.v : a.tet < b.tet;
  });
  std::vector<SurfaceFace> faces;
  const int n = mesh.n_per_dir;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i + 1;
    while (j < keys.size() && keys[j].v == keys[i].v) ++j;
    if (j - i == 1) {
      bool on_cube_boundary = false;
      std::array<Lattice, 3> lv;
      for (int q = 0; q < 3; ++q) lv[q] = mesh.lattice(keys[i].v[q]);
      for (int d = 0; d < 3 && !on_cube_boundary; ++d)
        for (int plane : {0, n})
          if (lv[0][d] == plane && lv[1][d] == plane && lv[2][d] == plane) on_cube_boundary = true;
      if (!on_cube_boundary || config.bc == BoundaryCondition::Impedance)
        faces.push_back({keys[i].tet, keys[i].local_face});
    }
    i = j;
  }

  const auto ops = assemble_on(mesh, elements, local_of_edge, static_cast<int>(edges.size()), faces);
  out.matrix = combine(ops, config.k, config.kappa);
  return out;
}

void write_matrix_market(std::ostream& os, const SparseComplexMatrix& matrix) {
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  const auto old_precision = os.precision(17);
  for (int r = 0; r < matrix.outerSize(); ++r)
    for (SparseComplexMatrix::InnerIterator it(matrix, r); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
         << it.value().imag() << '\n';
  os.precision(old_precision);
}

double symmetry_defect(const SparseComplexMatrix& matrix) {
  const SparseComplexMatrix t = matrix.transpose();
  const SparseComplexMatrix diff = matrix - t;
  double dmax = 0.0, amax = 0.0;
  for (int p = 0; p < diff.nonZeros(); ++p) dmax = std::max(dmax, std::abs(diff.valuePtr()[p]));
  for (int p = 0; p < matrix.nonZeros(); ++p) amax = std::max(amax, std::abs(matrix.valuePtr()[p]));
  return amax > 0.0 ? dmax / amax : dmax;
}

}  // namespace maxdd
