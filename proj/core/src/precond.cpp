#include "maxdd/precond.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <string>

#include "maxdd/parallel.hpp"

namespace maxdd {
namespace {

void require_absorption(double kappa, const char* where) {
  if (kappa == 0.0)
    throw InvalidArgument(std::string(where) +
                          ": preconditioner absorption kappa_prec must be nonzero");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view to_string(SchwarzKind kind) {
  switch (kind) {
    case SchwarzKind::AS: return "AS";
    case SchwarzKind::RAS: return "RAS";
    case SchwarzKind::HRAS: return "HRAS";
    case SchwarzKind::HAS: return "HAS";
    case SchwarzKind::ImpRAS: return "ImpRAS";
    case SchwarzKind::ImpHRAS: return "ImpHRAS";
  }
  return "?";
}

std::optional<SchwarzKind> parse_schwarz_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "as") return SchwarzKind::AS;
  if (s == "ras") return SchwarzKind::RAS;
  if (s == "hras") return SchwarzKind::HRAS;
  if (s == "has") return SchwarzKind::HAS;
  if (s == "impras") return SchwarzKind::ImpRAS;
  if (s == "imphras") return SchwarzKind::ImpHRAS;
  return std::nullopt;
}

LocalSolvers LocalSolvers::pec(const Cover& cover, const SparseComplexMatrix& a_prec,
                               double kappa_prec) {
  require_absorption(kappa_prec, "LocalSolvers::pec");
  if (a_prec.rows() != cover.n_dofs) throw InvalidArgument("LocalSolvers::pec: dimension mismatch");
  LocalSolvers out;
  out.family_ = Family::PEC;
  out.n_dofs_ = cover.n_dofs;
  out.blocks_.resize(cover.subdomains.size());
  parallel_for(static_cast<int>(cover.subdomains.size()), [&](int s) {
    const auto& sub = cover.subdomains[s];
    auto& block = out.blocks_[s];
    block.dofs = sub.interior_dofs;
    block.weights = sub.pou_weights;
    block.factor.factorize(local_matrix_pec(a_prec, block.dofs));
  });
  return out;
}

LocalSolvers LocalSolvers::impedance(const TetMesh& mesh, const Cover& cover, const DofMap& dofs,
                                     const ProblemConfig& prec_config) {
  require_absorption(prec_config.kappa, "LocalSolvers::impedance");
  if (prec_config.bc != cover.bc)
    throw InvalidArgument("LocalSolvers::impedance: boundary condition differs from the cover's");
  LocalSolvers out;
  out.family_ = Family::Impedance;
  out.n_dofs_ = cover.n_dofs;
  out.blocks_.resize(cover.subdomains.size());
  parallel_for(static_cast<int>(cover.subdomains.size()), [&](int s) {
    const auto& sub = cover.subdomains[s];
    auto& block = out.blocks_[s];
    auto local = local_matrix_impedance(mesh, sub.elements, prec_config, dofs);
    block.dofs = std::move(local.dofs);
    block.weights.assign(block.dofs.size(), 0.0);
    // interior_dofs is a sorted subset of the closure dofs.
    std::size_t q = 0;
    for (std::size_t i = 0; i < sub.interior_dofs.size(); ++i) {
      while (block.dofs[q] != sub.interior_dofs[i]) ++q;
      block.weights[q] = sub.pou_weights[i];
    }
    block.factor.factorize(local.matrix);
  });
  return out;
}

std::size_t LocalSolvers::memory_bytes() const {
  std::size_t bytes = 0;
  for (const auto& b : blocks_)
    bytes += b.factor.memory_bytes() + b.dofs.size() * (sizeof(int) + sizeof(double));
  return bytes;
}

void LocalSolvers::accumulate(const ComplexVector& r, ComplexVector& z, bool weighted) const {
  const int nb = size();
  auto solve_block = [&](int s, Complex* x, Complex* work) {
    const auto& b = blocks_[s];
    const auto m = b.dofs.size();
    for (std::size_t i = 0; i < m; ++i) x[i] = r[b.dofs[i]];
    b.factor.solve_in_place(x, work);
  };
  auto add_block = [&](int s, const Complex* x) {
    const auto& b = blocks_[s];
    const auto m = b.dofs.size();
    if (weighted) {
      for (std::size_t i = 0; i < m; ++i)
        if (b.weights[i] != 0.0) z[b.dofs[i]] += b.weights[i] * x[i];
    } else {
      for (std::size_t i = 0; i < m; ++i) z[b.dofs[i]] += x[i];
    }
  };

  if (worker_count() <= 1 || nb <= 1) {
    std::vector<Complex> x, work;
    for (int s = 0; s < nb; ++s) {
      const auto m = blocks_[s].dofs.size();
      x.resize(m);
      work.resize(m);
      solve_block(s, x.data(), work.data());
      add_block(s, x.data());
    }
    return;
  }
  std::vector<std::vector<Complex>> results(nb);
  parallel_for(nb, [&](int s) {
    const auto m = blocks_[s].dofs.size();
    results[s].resize(m);
    std::vector<Complex> work(m);
    solve_block(s, results[s].data(), work.data());
  });
  for (int s = 0; s < nb; ++s) add_block(s, results[s].data());
}

CoarseSolver::CoarseSolver(const SparseRealMatrix& restriction, const SparseComplexMatrix& a_prec,
                           double kappa_prec)
    : restriction_(restriction),
      restriction_c_(restriction.cast<Complex>()),
      prolongation_c_(restriction_c_.transpose()) {
  require_absorption(kappa_prec, "CoarseSolver");
  coarse_matrix_ = galerkin_coarse_matrix(restriction_, a_prec);
  factor_.factorize(coarse_matrix_);
}

ComplexVector CoarseSolver::apply(const ComplexVector& r) const {
  ComplexVector rc = restriction_c_ * r;
  std::vector<Complex> work(rc.size());
  factor_.solve_in_place(rc.data(), work.data());
  return prolongation_c_ * rc;
}

Preconditioner::Preconditioner(SchwarzKind kind, Levels levels,
                               std::shared_ptr<const LocalSolvers> locals,
                               std::shared_ptr<const CoarseSolver> coarse,
                               std::shared_ptr<const SparseComplexMatrix> a_prec)
    : kind_(kind),
      levels_(levels),
      locals_(std::move(locals)),
      coarse_(std::move(coarse)),
      a_prec_(std::move(a_prec)) {
  if (!locals_) throw InvalidArgument("Preconditioner: missing local solvers");
  const bool want_imp = uses_impedance_blocks(kind_);
  if (want_imp != (locals_->family() == LocalSolvers::Family::Impedance))
    throw InvalidArgument(std::string("Preconditioner: ") + std::string(to_string(kind_)) +
                          (want_imp ? " needs impedance" : " needs PEC") + " local blocks");
  if (levels_ == Levels::Two && !coarse_)
    throw InvalidArgument("Preconditioner: two-level form requires a coarse space");
  if (levels_ == Levels::One) coarse_.reset();
  if (is_hybrid(kind_) && levels_ == Levels::Two && !a_prec_)
    throw InvalidArgument("Preconditioner: hybrid form requires the global matrix");
  if (a_prec_ && a_prec_->rows() != locals_->n_dofs())
    throw InvalidArgument("Preconditioner: dimension mismatch");
}

ComplexVector Preconditioner::apply(const ComplexVector& r) const {
  if (r.size() != rows()) throw InvalidArgument("Preconditioner::apply: dimension mismatch");
  const bool weighted = is_restricted(kind_);
  ComplexVector z = ComplexVector::Zero(r.size());

  if (levels_ == Levels::One) {
    locals_->accumulate(r, z, weighted);
    return z;
  }
  const ComplexVector xr = coarse_->apply(r);
  if (!is_hybrid(kind_)) {
    locals_->accumulate(r, z, weighted);
    return z + xr;
  }
  const ComplexVector t = r - (*a_prec_) * xr;
  locals_->accumulate(t, z, weighted);
  const ComplexVector az = (*a_prec_) * z;
  return z - coarse_->apply(az) + xr;
}

SchwarzBuilder::SchwarzBuilder(std::shared_ptr<const TetMesh> mesh, std::shared_ptr<const Cover> cover,
                               std::shared_ptr<const CoarseSpace> coarse_space,
                               ProblemConfig prec_config, std::shared_ptr<const DofMap> dofs,
                               std::shared_ptr<const SparseComplexMatrix> a_prec)
    : mesh_(std::move(mesh)),
      cover_(std::move(cover)),
      coarse_space_(std::move(coarse_space)),
      prec_config_(prec_config),
      dofs_(std::move(dofs)),
      a_prec_(std::move(a_prec)) {
  require_absorption(prec_config_.kappa, "SchwarzBuilder");
  if (!mesh_ || !cover_ || !dofs_ || !a_prec_)
    throw InvalidArgument("SchwarzBuilder: missing mesh, cover, dofs or matrix");
}

Preconditioner SchwarzBuilder::build(SchwarzKind kind, Levels levels) {
  std::shared_ptr<const LocalSolvers> locals;
  if (uses_impedance_blocks(kind)) {
    if (!imp_) {
      const auto start = std::chrono::steady_clock::now();
      imp_ = std::make_shared<const LocalSolvers>(
          LocalSolvers::impedance(*mesh_, *cover_, *dofs_, prec_config_));
      imp_seconds_ = seconds_since(start);
    }
    locals = imp_;
  } else {
    if (!pec_) {
      const auto start = std::chrono::steady_clock::now();
      pec_ = std::make_shared<const LocalSolvers>(
          LocalSolvers::pec(*cover_, *a_prec_, prec_config_.kappa));
      pec_seconds_ = seconds_since(start);
    }
    locals = pec_;
  }
  std::shared_ptr<const CoarseSolver> coarse;
  if (levels == Levels::Two) {
    if (!coarse_space_) throw InvalidArgument("SchwarzBuilder: two-level form requires a coarse space");
    if (!coarse_) {
      const auto start = std::chrono::steady_clock::now();
      coarse_ = std::make_shared<const CoarseSolver>(coarse_space_->restriction, *a_prec_,
                                                     prec_config_.kappa);
      coarse_seconds_ = seconds_since(start);
    }
    coarse = coarse_;
  }
  return Preconditioner(kind, levels, std::move(locals), std::move(coarse), a_prec_);
}

double SchwarzBuilder::setup_seconds(SchwarzKind kind, Levels levels) const {
  double s = uses_impedance_blocks(kind) ? imp_seconds_ : pec_seconds_;
  if (levels == Levels::Two) s += coarse_seconds_;
  return s;
}

}  // namespace maxdd
