#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "maxdd/assembly.hpp"
#include "maxdd/mesh.hpp"
#include "maxdd/types.hpp"

namespace maxdd {

/// Half-open range of subcubes [lo, hi) along each axis.
struct SubcubeBox {
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};
};

struct Subdomain {
  SubcubeBox box;       // owned subcubes
  SubcubeBox extended;  // after overlap extension, clipped to the cube
  std::vector<int> elements;
  /// Active global dofs whose edge avoids the internal boundary of the
  /// extended box (the PEC local space), ascending.
  std::vector<int> interior_dofs;
  /// All active global dofs on edges of `elements`, ascending.
  std::vector<int> closure_dofs;
  /// Partition-of-unity weight per entry of interior_dofs.
  std::vector<double> pou_weights;
};

/// How the partition-of-unity weights D_l are chosen.
///  - Multiplicity: 1/m(j) on every subdomain whose interior holds dof j.
///  - Owner: weight 1 in the one subdomain whose owned (non-extended) box
///    holds the edge midpoint, 0 elsewhere. Midpoints on a box plane go to
///    the upper box. This is the non-overlapping choice under which the
///    restricted impedance kinds behave like optimized Schwarz.
enum class PouKind { Multiplicity, Owner };

const char* to_string(PouKind kind);
PouKind parse_pou(const std::string& name);

struct Cover {
  std::vector<Subdomain> subdomains;
  PouKind pou = PouKind::Multiplicity;
  int n_dofs = 0;
  int overlap_layers = 0;
  BoundaryCondition bc = BoundaryCondition::PEC;
};

/// Regular n_sub^3 box decomposition, each box grown by `overlap_layers`
/// rings of fine subcubes (one layer gives an overlap of width 2h between
/// neighbours). Throws if the counts do not divide or if some dof ends up in
/// no subdomain interior. Partition-of-unity weights are filled in.
Cover build_cover(const TetMesh& mesh, const DofMap& dofs, int n_sub_per_dir, int overlap_layers,
                  BoundaryCondition bc, PouKind pou = PouKind::Multiplicity);

/// Multiplicity weights 1/m(j) over interior dofs (overwrites pou_weights).
void build_partition_of_unity(Cover& cover);

/// sum_l R_l^T D_l R_l as an explicit sparse matrix.
SparseRealMatrix partition_of_unity_sum(const Cover& cover);

/// Overlap width in fine layers for a "generous" overlap delta ~ H.
int generous_overlap_layers(int n_fine, int n_sub_per_dir);

/// Per-subdomain CSV summary: index, box, element count, dof counts.
void write_cover_csv(std::ostream& os, const Cover& cover);

struct CoarseSpace {
  NestedMeshPair pair;
  DofMap coarse_dofs;
  /// Rows: coarse active edges, columns: fine active edges.
  SparseRealMatrix restriction;
};

/// Coarse restriction with (R0)_pj = int_{e_j} w^H_p . t, evaluated exactly
/// by the edge-midpoint rule since w^H_p is linear on the coarse tet holding
/// the fine edge. Active sets on both levels follow `bc`.
CoarseSpace build_coarse_restriction(const NestedMeshPair& pair, const DofMap& fine_dofs,
                                     BoundaryCondition bc);

/// R0 A R0^T.
SparseComplexMatrix galerkin_coarse_matrix(const SparseRealMatrix& restriction,
                                           const SparseComplexMatrix& matrix);

}  // namespace maxdd
