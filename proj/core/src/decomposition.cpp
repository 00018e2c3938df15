#include "maxdd/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "maxdd/log.hpp"

namespace maxdd {
namespace {

bool on_internal_boundary(const Lattice& a, const Lattice& b, const SubcubeBox& box, int n) {
  for (int d = 0; d < 3; ++d) {
    if (a[d] != b[d]) continue;
    if (a[d] == box.lo[d] && box.lo[d] > 0) return true;
    if (a[d] == box.hi[d] && box.hi[d] < n) return true;
  }
  return false;
}

// Owning subcube index along one axis for an edge with lattice ends a, b.
int owner_cell(int a, int b, int n) { return a == b ? std::min(a, n - 1) : std::min(a, b); }

}  // namespace

const char* to_string(PouKind kind) {
  return kind == PouKind::Owner ? "owner" : "multiplicity";
}

PouKind parse_pou(const std::string& name) {
  if (name == "multiplicity") return PouKind::Multiplicity;
  if (name == "owner") return PouKind::Owner;
  throw InvalidArgument("unknown partition of unity '" + name + "'");
}

int generous_overlap_layers(int n_fine, int n_sub_per_dir) {
  const double ratio = static_cast<double>(n_fine) / n_sub_per_dir;  // H / h
  return std::max(1, static_cast<int>(std::lround(0.25 * ratio)));
}

Cover build_cover(const TetMesh& mesh, const DofMap& dofs, int n_sub_per_dir, int overlap_layers,
                  BoundaryCondition bc, PouKind pou) {
  const int n = mesh.n_per_dir;
  if (n_sub_per_dir < 1 || n % n_sub_per_dir != 0)
    throw InvalidArgument("build_cover: n_sub_per_dir=" + std::to_string(n_sub_per_dir) +
                          " does not divide n=" + std::to_string(n));
  if (overlap_layers < 0) throw InvalidArgument("build_cover: negative overlap");

  Cover cover;
  cover.n_dofs = dofs.size();
  cover.overlap_layers = overlap_layers;
  cover.bc = bc;
  cover.pou = pou;
  const int width = n / n_sub_per_dir;

  std::vector<int> edge_mark(mesh.edges.size(), -1);
  int index = 0;
  bool swallowed = false;
  for (int sk = 0; sk < n_sub_per_dir; ++sk)
    for (int sj = 0; sj < n_sub_per_dir; ++sj)
      for (int si = 0; si < n_sub_per_dir; ++si, ++index) {
        Subdomain sub;
        const std::array<int, 3> s{si, sj, sk};
        for (int d = 0; d < 3; ++d) {
          sub.box.lo[d] = s[d] * width;
          sub.box.hi[d] = (s[d] + 1) * width;
          sub.extended.lo[d] = std::max(0, sub.box.lo[d] - overlap_layers);
          sub.extended.hi[d] = std::min(n, sub.box.hi[d] + overlap_layers);
        }
        const auto& ex = sub.extended;
        if (n_sub_per_dir > 1 && ex.lo == std::array<int, 3>{0, 0, 0} &&
            ex.hi == std::array<int, 3>{n, n, n})
          swallowed = true;

        for (int k = ex.lo[2]; k < ex.hi[2]; ++k)
          for (int j = ex.lo[1]; j < ex.hi[1]; ++j)
            for (int i = ex.lo[0]; i < ex.hi[0]; ++i) {
              const int c = mesh.subcube_id(i, j, k);
              for (int t = 0; t < 6; ++t) sub.elements.push_back(6 * c + t);
            }
        std::sort(sub.elements.begin(), sub.elements.end());

        for (int t : sub.elements)
          for (const auto& te : mesh.tet_edges[t]) {
            if (edge_mark[te.edge] == index) continue;
            edge_mark[te.edge] = index;
            const int dof = dofs.dof_of_edge[te.edge];
            if (dof < 0) continue;
            sub.closure_dofs.push_back(dof);
            const auto& e = mesh.edges[te.edge];
            if (!on_internal_boundary(mesh.lattice(e[0]), mesh.lattice(e[1]), ex, n))
              sub.interior_dofs.push_back(dof);
          }
        std::sort(sub.closure_dofs.begin(), sub.closure_dofs.end());
        std::sort(sub.interior_dofs.begin(), sub.interior_dofs.end());
        if (pou == PouKind::Owner) {
          sub.pou_weights.resize(sub.interior_dofs.size());
          for (std::size_t q = 0; q < sub.interior_dofs.size(); ++q) {
            const auto& e = mesh.edges[dofs.edges[sub.interior_dofs[q]]];
            const auto a = mesh.lattice(e[0]);
            const auto b = mesh.lattice(e[1]);
            bool own = true;
            for (int d = 0; d < 3; ++d) {
              const int c = owner_cell(a[d], b[d], n);
              own = own && c >= sub.box.lo[d] && c < sub.box.hi[d];
            }
            sub.pou_weights[q] = own ? 1.0 : 0.0;
          }
        }
        cover.subdomains.push_back(std::move(sub));
      }
  if (swallowed)
    log_warning("build_cover: overlap of " + std::to_string(overlap_layers) +
                " layers makes a subdomain cover the whole cube");
  if (pou == PouKind::Multiplicity) {
    build_partition_of_unity(cover);
  } else {
    std::vector<int> owners(cover.n_dofs, 0);
    for (const auto& sub : cover.subdomains)
      for (std::size_t q = 0; q < sub.interior_dofs.size(); ++q)
        owners[sub.interior_dofs[q]] += sub.pou_weights[q] > 0.0;
    for (int d = 0; d < cover.n_dofs; ++d)
      if (owners[d] != 1)
        throw std::logic_error("build_cover: dof " + std::to_string(d) +
                               " is not owned by exactly one subdomain interior (overlap too small?)");
  }
  return cover;
}

void build_partition_of_unity(Cover& cover) {
  std::vector<int> multiplicity(cover.n_dofs, 0);
  for (const auto& sub : cover.subdomains)
    for (int d : sub.interior_dofs) ++multiplicity[d];
  for (int d = 0; d < cover.n_dofs; ++d)
    if (multiplicity[d] == 0)
      throw std::logic_error("build_partition_of_unity: dof " + std::to_string(d) +
                             " lies in no subdomain interior (overlap too small?)");
  for (auto& sub : cover.subdomains) {
    sub.pou_weights.resize(sub.interior_dofs.size());
    for (std::size_t i = 0; i < sub.interior_dofs.size(); ++i)
      sub.pou_weights[i] = 1.0 / multiplicity[sub.interior_dofs[i]];
  }
}

SparseRealMatrix partition_of_unity_sum(const Cover& cover) {
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& sub : cover.subdomains)
    for (std::size_t i = 0; i < sub.interior_dofs.size(); ++i)
      trips.emplace_back(sub.interior_dofs[i], sub.interior_dofs[i], sub.pou_weights.at(i));
  SparseRealMatrix out(cover.n_dofs, cover.n_dofs);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

void write_cover_csv(std::ostream& os, const Cover& cover) {
  os << "subdomain,lo_x,lo_y,lo_z,hi_x,hi_y,hi_z,elements,interior_dofs,closure_dofs\n";
  for (std::size_t s = 0; s < cover.subdomains.size(); ++s) {
    const auto& sub = cover.subdomains[s];
    os << s;
    for (int d = 0; d < 3; ++d) os << ',' << sub.extended.lo[d];
    for (int d = 0; d < 3; ++d) os << ',' << sub.extended.hi[d];
    os << ',' << sub.elements.size() << ',' << sub.interior_dofs.size() << ','
       << sub.closure_dofs.size() << '\n';
  }
}

CoarseSpace build_coarse_restriction(const NestedMeshPair& pair, const DofMap& fine_dofs,
                                     BoundaryCondition bc) {
  if (!pair.fine || !pair.coarse || pair.fine->n_per_dir % pair.coarse->n_per_dir != 0)
    throw InvalidArgument("build_coarse_restriction: meshes are not nested");
  const TetMesh& fine = *pair.fine;
  const TetMesh& coarse = *pair.coarse;

  CoarseSpace space;
  space.pair = pair;
  space.coarse_dofs = make_dof_map(coarse, bc);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(fine_dofs.size()) * 6);
  const int denom = 2 * fine.n_per_dir;
  for (int j = 0; j < fine_dofs.size(); ++j) {
    const auto& e = fine.edges[fine_dofs.edges[j]];
    const auto la = fine.lattice(e[0]), lb = fine.lattice(e[1]);
    const Lattice mid{la[0] + lb[0], la[1] + lb[1], la[2] + lb[2]};
    const int t = coarse.locate(mid, denom);

    const auto x = coarse.tet_coordinates(t);
    const auto g = barycentric_gradients(x);
    Point pm;
    Vector3 tangent;
    for (int d = 0; d < 3; ++d) {
      pm[d] = static_cast<double>(mid[d]) / denom;
      tangent[d] = fine.vertices[e[1]][d] - fine.vertices[e[0]][d];
    }
    std::array<double, 4> lambda{};
    double rest = 1.0;
    for (int v = 1; v < 4; ++v) {
      lambda[v] = 0.0;
      for (int d = 0; d < 3; ++d) lambda[v] += g[v][d] * (pm[d] - x[0][d]);
      rest -= lambda[v];
    }
    lambda[0] = rest;

    for (int le = 0; le < 6; ++le) {
      const auto& te = coarse.tet_edges[t][le];
      const int p = space.coarse_dofs.dof_of_edge[te.edge];
      if (p < 0) continue;
      const double v = edge_basis(g, lambda, le, te.sign).dot(tangent);
      if (std::abs(v) > 1e-13) trips.emplace_back(p, j, v);
    }
  }
  space.restriction.resize(space.coarse_dofs.size(), fine_dofs.size());
  space.restriction.setFromTriplets(trips.begin(), trips.end());
  return space;
}

SparseComplexMatrix galerkin_coarse_matrix(const SparseRealMatrix& restriction,
                                           const SparseComplexMatrix& matrix) {
  if (restriction.cols() != matrix.rows() || matrix.rows() != matrix.cols())
    throw InvalidArgument("galerkin_coarse_matrix: dimension mismatch");
  const SparseComplexMatrix r = restriction.cast<Complex>();
  const SparseComplexMatrix rt = r.transpose();
  const SparseComplexMatrix ar = matrix * rt;
  SparseComplexMatrix out = r * ar;
  out.prune(Complex(0.0), 0.0);
  return out;
}

}  // namespace maxdd
