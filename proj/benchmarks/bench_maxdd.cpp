#include <benchmark/benchmark.h>

#include <memory>

#include "maxdd/assembly.hpp"
#include "maxdd/decomposition.hpp"
#include "maxdd/krylov.hpp"
#include "maxdd/mesh.hpp"
#include "maxdd/precond.hpp"
#include "maxdd/sparse_ldlt.hpp"

using namespace maxdd;

namespace {

void BM_ElementMatrices(benchmark::State& state) {
  const std::array<Point, 4> x{Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}, Point{1, 1, 1}};
  const std::array<int, 6> signs{1, 1, 1, 1, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(element_matrices(x, signs));
}
BENCHMARK(BM_ElementMatrices);

void BM_AssembleGlobal(benchmark::State& state) {
  const auto mesh = build_cube_mesh(static_cast<int>(state.range(0)));
  const ProblemConfig cfg{5.0, 25.0, BoundaryCondition::Impedance, SourceKind::GaussianBump};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_global(mesh, cfg));
}
BENCHMARK(BM_AssembleGlobal)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

// Factorization of a subdomain-sized impedance block.
void BM_LocalFactorize(benchmark::State& state) {
  const auto mesh = build_cube_mesh(static_cast<int>(state.range(0)));
  const ProblemConfig cfg{10.0, 10.0, BoundaryCondition::Impedance, SourceKind::GaussianBump};
  const auto a = assemble_global(mesh, cfg).matrix;
  for (auto _ : state) benchmark::DoNotOptimize(SparseLdlt(a));
  state.counters["dofs"] = static_cast<double>(a.rows());
}
BENCHMARK(BM_LocalFactorize)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

struct Problem {
  std::shared_ptr<const TetMesh> mesh;
  std::shared_ptr<const DofMap> dofs;
  std::shared_ptr<const SparseComplexMatrix> a;
  std::shared_ptr<const Cover> cover;
  std::shared_ptr<const CoarseSpace> coarse;
  ProblemConfig cfg{5.0, 25.0, BoundaryCondition::PEC, SourceKind::GaussianBump};

  Problem() {
    mesh = std::make_shared<const TetMesh>(build_cube_mesh(16));
    dofs = std::make_shared<const DofMap>(make_dof_map(*mesh, cfg.bc));
    a = std::make_shared<const SparseComplexMatrix>(assemble_global(*mesh, cfg).matrix);
    cover = std::make_shared<const Cover>(build_cover(*mesh, *dofs, 4, 1, cfg.bc, PouKind::Owner));
    coarse = std::make_shared<const CoarseSpace>(build_coarse_restriction(build_nested_pair(mesh, 4), *dofs, cfg.bc));
  }
};

void BM_PreconditionerApply(benchmark::State& state) {
  static const Problem p;
  SchwarzBuilder b(p.mesh, p.cover, p.coarse, p.cfg, p.dofs, p.a);
  const auto kind = static_cast<SchwarzKind>(state.range(0));
  const auto precond = b.build(kind, Levels::Two);
  const ComplexVector r = random_initial_guess(p.dofs->size(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(precond.apply(r));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_PreconditionerApply)
    ->Arg(static_cast<int>(SchwarzKind::RAS))
    ->Arg(static_cast<int>(SchwarzKind::HRAS))
    ->Arg(static_cast<int>(SchwarzKind::ImpHRAS))
    ->Unit(benchmark::kMillisecond);

void BM_GmresHras(benchmark::State& state) {
  static const Problem p;
  SchwarzBuilder b(p.mesh, p.cover, p.coarse, p.cfg, p.dofs, p.a);
  const auto precond = b.build(SchwarzKind::HRAS, Levels::Two);
  const auto rhs = assemble_rhs(*p.mesh, p.cfg, *p.dofs);
  for (auto _ : state) {
    const auto res = gmres(matrix_operator(*p.a), preconditioner_operator(precond), rhs, nullptr, {});
    state.counters["iterations"] = res.iterations;
  }
}
BENCHMARK(BM_GmresHras)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
