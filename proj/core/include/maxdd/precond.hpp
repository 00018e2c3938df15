#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxdd/assembly.hpp"
#include "maxdd/decomposition.hpp"
#include "maxdd/sparse_ldlt.hpp"
#include "maxdd/types.hpp"

namespace maxdd {

enum class SchwarzKind { AS, RAS, HRAS, HAS, ImpRAS, ImpHRAS };
enum class Levels { One, Two };

std::string_view to_string(SchwarzKind kind);
std::optional<SchwarzKind> parse_schwarz_kind(std::string_view text);

/// Local solves use impedance conditions on internal subdomain boundaries.
constexpr bool uses_impedance_blocks(SchwarzKind k) {
  return k == SchwarzKind::ImpRAS || k == SchwarzKind::ImpHRAS;
}
/// Local corrections are weighted by the partition of unity.
constexpr bool is_restricted(SchwarzKind k) { return k != SchwarzKind::AS && k != SchwarzKind::HAS; }
/// Coarse correction applied multiplicatively (balancing form).
constexpr bool is_hybrid(SchwarzKind k) {
  return k == SchwarzKind::HRAS || k == SchwarzKind::HAS || k == SchwarzKind::ImpHRAS;
}

/// Factorized subdomain problems of one family, each with its restriction
/// (a sorted list of global dofs) and its partition-of-unity weights.
class LocalSolvers {
 public:
  enum class Family { PEC, Impedance };

  struct Block {
    std::vector<int> dofs;
    std::vector<double> weights;  // D_l on dofs; zero off the interior set
    SparseLdlt factor;
  };

  /// Minors of the absorptive global matrix on each subdomain's interior dofs.
  static LocalSolvers pec(const Cover& cover, const SparseComplexMatrix& a_prec, double kappa_prec);
  /// Subdomain problems with impedance conditions on internal boundaries,
  /// solved over closure dofs.
  static LocalSolvers impedance(const TetMesh& mesh, const Cover& cover, const DofMap& dofs,
                                const ProblemConfig& prec_config);

  Family family() const { return family_; }
  int size() const { return static_cast<int>(blocks_.size()); }
  int n_dofs() const { return n_dofs_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t memory_bytes() const;

  /// z += sum_l R_l^T [D_l] A_l^{-1} R_l r. Contributions are summed in
  /// subdomain order whatever the worker count.
  void accumulate(const ComplexVector& r, ComplexVector& z, bool weighted) const;

 private:
  Family family_ = Family::PEC;
  int n_dofs_ = 0;
  std::vector<Block> blocks_;
};

/// Xi = R0^T A0^{-1} R0 with A0 = R0 A_prec R0^T.
class CoarseSolver {
 public:
  CoarseSolver(const SparseRealMatrix& restriction, const SparseComplexMatrix& a_prec,
               double kappa_prec);

  ComplexVector apply(const ComplexVector& r) const;
  int size() const { return static_cast<int>(coarse_matrix_.rows()); }
  const SparseComplexMatrix& coarse_matrix() const { return coarse_matrix_; }
  const SparseRealMatrix& restriction() const { return restriction_; }

 private:
  SparseRealMatrix restriction_;
  SparseComplexMatrix restriction_c_;
  SparseComplexMatrix prolongation_c_;
  SparseComplexMatrix coarse_matrix_;
  SparseLdlt factor_;
};

/// One- or two-level Schwarz preconditioner. Components are shared so the
/// same factorizations can serve several kinds.
///
///   AS      sum_{l>=1} R_l^T A_l^{-1} R_l            [+ Xi]
///   RAS     sum_{l>=1} R_l^T D_l A_l^{-1} R_l        [+ Xi]
///   ImpRAS  as RAS with impedance local blocks       [+ Xi]
///   HAS / HRAS / ImpHRAS (two-level)
///           (I - Xi A) S (I - A Xi) + Xi,  S the matching one-level sum
///
/// Without a coarse level the hybrid kinds reduce to their one-level sum.
class Preconditioner {
 public:
  Preconditioner(SchwarzKind kind, Levels levels, std::shared_ptr<const LocalSolvers> locals,
                 std::shared_ptr<const CoarseSolver> coarse,
                 std::shared_ptr<const SparseComplexMatrix> a_prec);

  ComplexVector apply(const ComplexVector& r) const;

  SchwarzKind kind() const { return kind_; }
  Levels levels() const { return levels_; }
  int rows() const { return locals_->n_dofs(); }
  const LocalSolvers& locals() const { return *locals_; }
  const CoarseSolver* coarse() const { return coarse_.get(); }

 private:
  SchwarzKind kind_;
  Levels levels_;
  std::shared_ptr<const LocalSolvers> locals_;
  std::shared_ptr<const CoarseSolver> coarse_;
  std::shared_ptr<const SparseComplexMatrix> a_prec_;
};

/// Everything needed to build any member of the family for one problem.
/// Local and coarse components are built on first use and then reused.
class SchwarzBuilder {
 public:
  SchwarzBuilder(std::shared_ptr<const TetMesh> mesh, std::shared_ptr<const Cover> cover,
                 std::shared_ptr<const CoarseSpace> coarse_space, ProblemConfig prec_config,
                 std::shared_ptr<const DofMap> dofs, std::shared_ptr<const SparseComplexMatrix> a_prec);

  Preconditioner build(SchwarzKind kind, Levels levels);

  /// Wall seconds spent building the components `build(kind, levels)` uses.
  double setup_seconds(SchwarzKind kind, Levels levels) const;

 private:
  std::shared_ptr<const TetMesh> mesh_;
  std::shared_ptr<const Cover> cover_;
  std::shared_ptr<const CoarseSpace> coarse_space_;
  ProblemConfig prec_config_;
  std::shared_ptr<const DofMap> dofs_;
  std::shared_ptr<const SparseComplexMatrix> a_prec_;

  std::shared_ptr<const LocalSolvers> pec_;
  std::shared_ptr<const LocalSolvers> imp_;
  std::shared_ptr<const CoarseSolver> coarse_;
  double pec_seconds_ = 0.0, imp_seconds_ = 0.0, coarse_seconds_ = 0.0;
};

}  // namespace maxdd
