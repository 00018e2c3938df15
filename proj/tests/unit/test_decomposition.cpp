#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "maxdd/decomposition.hpp"
#include "oracles.hpp"

using namespace maxdd;

namespace {

// Sum of R^T D R with explicit dense restriction and weight matrices.
oracle::DenseR dense_pou_sum(const Cover& cover) {
  oracle::DenseR s = oracle::DenseR::Zero(cover.n_dofs, cover.n_dofs);
  for (const auto& sub : cover.subdomains) {
    const int m = static_cast<int>(sub.interior_dofs.size());
    oracle::DenseR r = oracle::DenseR::Zero(m, cover.n_dofs);
    for (int i = 0; i < m; ++i) r(i, sub.interior_dofs[i]) = 1.0;
    oracle::DenseR d = oracle::DenseR::Zero(m, m);
    for (int i = 0; i < m; ++i) d(i, i) = sub.pou_weights[i];
    s += r.transpose() * d * r;
  }
  return s;
}

// R0 by 5-point Gauss integration of the coarse Whitney functions along each
// fine edge.
oracle::DenseR oracle_restriction(const NestedMeshPair& pair, const DofMap& fine_dofs,
                                  const DofMap& coarse_dofs) {
  const auto& fine = *pair.fine;
  const auto& coarse = *pair.coarse;
  oracle::DenseR r = oracle::DenseR::Zero(coarse_dofs.size(), fine_dofs.size());
  const auto g = oracle::gauss(5);
  for (int j = 0; j < fine_dofs.size(); ++j) {
    const auto& e = fine.edges[fine_dofs.edges[j]];
    const auto& a = fine.vertices[e[0]];
    const auto& b = fine.vertices[e[1]];
    const Point mid{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2};
    const int ct = coarse.locate(mid);
    const auto x = coarse.tet_coordinates(ct);
    const auto bmap = oracle::barycentric_map(x);
    const oracle::Vec3 t(b[0] - a[0], b[1] - a[1], b[2] - a[2]);
    for (int le = 0; le < 6; ++le) {
      const int p = coarse_dofs.dof_of_edge[coarse.tet_edges[ct][le].edge];
      if (p < 0) continue;
      double s = 0.0;
      for (const auto& q : g) {
        const oracle::Vec3 pt = oracle::Vec3(a[0], a[1], a[2]) + q.x * t;
        s += q.w * oracle::whitney(bmap, kLocalEdges[le][0], kLocalEdges[le][1], pt).dot(t);
      }
      r(p, j) = coarse.tet_edges[ct][le].sign * s;
    }
  }
  return r;
}

}  // namespace

TEST_SUITE("decomposition") {
  TEST_CASE("single subdomain covers everything with unit weights") {
    const auto m = build_cube_mesh(3);
    for (auto bc : {BoundaryCondition::PEC, BoundaryCondition::Impedance}) {
      const auto dofs = make_dof_map(m, bc);
      const auto cover = build_cover(m, dofs, 1, 1, bc);
      REQUIRE(cover.subdomains.size() == 1);
      const auto& sub = cover.subdomains[0];
      CHECK(sub.interior_dofs.size() == static_cast<std::size_t>(dofs.size()));
      CHECK(sub.closure_dofs == sub.interior_dofs);
      for (double w : sub.pou_weights) CHECK(w == 1.0);
      CHECK(sub.elements.size() == static_cast<std::size_t>(m.num_tets()));
    }
  }

  TEST_CASE("n=4, two boxes per axis, one layer: boxes span three subcubes") {
    const auto m = build_cube_mesh(4);
    const auto dofs = make_dof_map(m, BoundaryCondition::PEC);
    const auto cover = build_cover(m, dofs, 2, 1, BoundaryCondition::PEC);
    REQUIRE(cover.subdomains.size() == 8);
    for (const auto& sub : cover.subdomains) {
      for (int d = 0; d < 3; ++d) {
        CHECK(sub.box.hi[d] - sub.box.lo[d] == 2);
        CHECK(sub.extended.hi[d] - sub.extended.lo[d] == 3);
      }
      CHECK(sub.elements.size() == 6u * 27u);
    }
    // Neighbours along x share a slab two subcubes thick.
    const auto& a = cover.subdomains[0];
    const auto& b = cover.subdomains[1];
    CHECK(std::min(a.extended.hi[0], b.extended.hi[0]) - std::max(a.extended.lo[0], b.extended.lo[0]) == 2);
  }

  TEST_CASE("partition of unity identity over the cover matrix") {
    for (int n : {4, 8, 12})
      for (int ns : {2, 4})
        for (int layers : {1, 2})
          for (auto bc : {BoundaryCondition::PEC, BoundaryCondition::Impedance}) {
            if (n % ns) continue;
            CAPTURE(n);
            CAPTURE(ns);
            CAPTURE(layers);
            const auto m = build_cube_mesh(n);
            const auto dofs = make_dof_map(m, bc);
            const auto cover = build_cover(m, dofs, ns, layers, bc);
            const SparseRealMatrix s = partition_of_unity_sum(cover);
            double err = 0.0;
            for (int r = 0; r < s.outerSize(); ++r)
              for (SparseRealMatrix::InnerIterator it(s, r); it; ++it)
                err = std::max(err, std::abs(it.value() - (it.row() == it.col() ? 1.0 : 0.0)));
            for (int i = 0; i < cover.n_dofs; ++i) CHECK(s.coeff(i, i) != 0.0);
            CHECK(err <= 1e-15);
          }
  }

  TEST_CASE("random covers: explicit dense product is the identity") {
    std::mt19937_64 rng(11);
    const auto m = build_cube_mesh(4);
    for (int trial = 0; trial < 4; ++trial) {
      const int ns = std::array{1, 2, 4}[rng() % 3];
      const int layers = static_cast<int>(rng() % 3);
      const auto bc = rng() % 2 ? BoundaryCondition::PEC : BoundaryCondition::Impedance;
      const auto dofs = make_dof_map(m, bc);
      if (layers == 0 && ns > 1) {
        CHECK_THROWS(build_cover(m, dofs, ns, layers, bc));
        continue;
      }
      const auto cover = build_cover(m, dofs, ns, layers, bc);
      const auto s = dense_pou_sum(cover);
      CHECK((s - oracle::DenseR::Identity(cover.n_dofs, cover.n_dofs)).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }

  TEST_CASE("weights follow multiplicity; coverage and nesting of dof sets") {
    const auto m = build_cube_mesh(6);
    const auto dofs = make_dof_map(m, BoundaryCondition::Impedance);
    const auto cover = build_cover(m, dofs, 3, 1, BoundaryCondition::Impedance);
    std::vector<int> mult(cover.n_dofs, 0);
    for (const auto& sub : cover.subdomains) {
      CHECK(std::is_sorted(sub.interior_dofs.begin(), sub.interior_dofs.end()));
      CHECK(std::includes(sub.closure_dofs.begin(), sub.closure_dofs.end(), sub.interior_dofs.begin(),
                          sub.interior_dofs.end()));
      for (int d : sub.interior_dofs) ++mult[d];
    }
    bool saw_one = false, saw_two = false;
    for (const auto& sub : cover.subdomains)
      for (std::size_t i = 0; i < sub.interior_dofs.size(); ++i) {
        const int mm = mult[sub.interior_dofs[i]];
        CHECK(sub.pou_weights[i] == doctest::Approx(1.0 / mm));
        CHECK(sub.pou_weights[i] > 0.0);
        CHECK(sub.pou_weights[i] <= 1.0);
        saw_one |= mm == 1;
        saw_two |= mm == 2;
      }
    CHECK(saw_one);
    CHECK(saw_two);
    for (int c : mult) CHECK(c >= 1);
  }

  TEST_CASE("interior dofs avoid the internal boundary of the extended box") {
    const auto m = build_cube_mesh(4);
    const auto dofs = make_dof_map(m, BoundaryCondition::Impedance);
    const auto cover = build_cover(m, dofs, 2, 1, BoundaryCondition::Impedance);
    const double h = 0.25;
    for (const auto& sub : cover.subdomains) {
      auto on_internal_face = [&](const Point& p) {
        for (int d = 0; d < 3; ++d) {
          if (sub.extended.lo[d] > 0 && p[d] == sub.extended.lo[d] * h) return true;
          if (sub.extended.hi[d] < 4 && p[d] == sub.extended.hi[d] * h) return true;
        }
        return false;
      };
      std::set<int> interior(sub.interior_dofs.begin(), sub.interior_dofs.end());
      for (int d : sub.closure_dofs) {
        const auto& e = m.edges[dofs.edges[d]];
        const bool internal = on_internal_face(m.vertices[e[0]]) && on_internal_face(m.vertices[e[1]]);
        // Both endpoints on the same internal face plane means the edge lies in it.
        bool same_plane = false;
        for (int q = 0; q < 3; ++q)
          for (int bound : {sub.extended.lo[q], sub.extended.hi[q]})
            if ((bound > 0 && bound < 4) && m.vertices[e[0]][q] == bound * h && m.vertices[e[1]][q] == bound * h)
              same_plane = true;
        CHECK(interior.count(d) == static_cast<std::size_t>(!(internal && same_plane)));
      }
    }
  }

  TEST_CASE("cover errors") {
    const auto m = build_cube_mesh(4);
    const auto dofs = make_dof_map(m, BoundaryCondition::PEC);
    CHECK_THROWS_AS(build_cover(m, dofs, 3, 1, BoundaryCondition::PEC), InvalidArgument);
    CHECK_THROWS_AS(build_cover(m, dofs, 0, 1, BoundaryCondition::PEC), InvalidArgument);
    CHECK_THROWS_AS(build_cover(m, dofs, 2, -1, BoundaryCondition::PEC), InvalidArgument);
    // Swallowing the cube is allowed.
    const auto big = build_cover(m, dofs, 2, 4, BoundaryCondition::PEC);
    for (const auto& sub : big.subdomains) CHECK(sub.elements.size() == static_cast<std::size_t>(m.num_tets()));
  }

  TEST_CASE("generous overlap layers") {
    CHECK(generous_overlap_layers(40, 10) == 1);
    CHECK(generous_overlap_layers(60, 5) == 3);
    CHECK(generous_overlap_layers(4, 4) == 1);
    CHECK(generous_overlap_layers(15, 5) == 1);
  }

  TEST_CASE("cover CSV summary") {
    const auto m = build_cube_mesh(4);
    const auto dofs = make_dof_map(m, BoundaryCondition::PEC);
    const auto cover = build_cover(m, dofs, 2, 1, BoundaryCondition::PEC);
    std::ostringstream os;
    write_cover_csv(os, cover);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 9);
  }

  TEST_CASE("coarse restriction equals fine identity when the meshes coincide") {
    for (auto bc : {BoundaryCondition::PEC, BoundaryCondition::Impedance}) {
      const auto pair = build_nested_pair(3, 3);
      const auto dofs = make_dof_map(*pair.fine, bc);
      const auto cs = build_coarse_restriction(pair, dofs, bc);
      const auto r = oracle::dense(cs.restriction);
      CHECK((r - oracle::DenseR::Identity(dofs.size(), dofs.size())).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }

  TEST_CASE("coarse restriction against line quadrature of coarse basis functions") {
    for (auto [nf, nc] : {std::pair{2, 1}, std::pair{4, 2}, std::pair{6, 2}})
      for (auto bc : {BoundaryCondition::PEC, BoundaryCondition::Impedance}) {
        const auto pair = build_nested_pair(nf, nc);
        const auto dofs = make_dof_map(*pair.fine, bc);
        const auto cs = build_coarse_restriction(pair, dofs, bc);
        const auto ref = oracle_restriction(pair, dofs, cs.coarse_dofs);
        CHECK((oracle::dense(cs.restriction) - ref).cwiseAbs().maxCoeff() <= 1e-13);
      }
  }

  TEST_CASE("(2,1): the fine half of the main diagonal carries weight 1/2") {
    const auto pair = build_nested_pair(2, 1);
    const auto dofs = make_dof_map(*pair.fine, BoundaryCondition::PEC);
    const auto cs = build_coarse_restriction(pair, dofs, BoundaryCondition::PEC);
    REQUIRE(cs.coarse_dofs.size() == 1);
    const int v0 = pair.fine->vertex_id(0, 0, 0), vc = pair.fine->vertex_id(1, 1, 1);
    int fine_edge = -1;
    for (int e = 0; e < pair.fine->num_edges(); ++e)
      if (pair.fine->edges[e] == std::array<int, 2>{v0, vc}) fine_edge = e;
    REQUIRE(fine_edge >= 0);
    const int j = dofs.dof_of_edge[fine_edge];
    REQUIRE(j >= 0);
    const auto ref = oracle_restriction(pair, dofs, cs.coarse_dofs);
    CHECK(cs.restriction.coeff(0, j) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ref(0, j) == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("R0 sparsity is bounded per row") {
    const auto pair = build_nested_pair(8, 2);
    const auto dofs = make_dof_map(*pair.fine, BoundaryCondition::Impedance);
    const auto cs = build_coarse_restriction(pair, dofs, BoundaryCondition::Impedance);
    int max_row = 0;
    for (int r = 0; r < cs.restriction.rows(); ++r)
      max_row = std::max<int>(max_row, cs.restriction.outerIndexPtr()[r + 1] - cs.restriction.outerIndexPtr()[r]);
    // Support of one coarse function: at most the fine edges of the coarse tets around it.
    const auto fine_edges_per_coarse_tet = 6 * 4 * 4 * 4;  // generous upper bound
    CHECK(max_row > 0);
    CHECK(max_row <= fine_edges_per_coarse_tet * 14);
  }

  TEST_CASE("Galerkin coarse matrix: identity restriction, direct assembly, absorption") {
    std::mt19937_64 rng(2);
    for (auto [nf, nc] : {std::pair{4, 2}, std::pair{6, 3}})
      for (auto bc : {BoundaryCondition::PEC, BoundaryCondition::Impedance}) {
        const double k = 5.0;
        for (double kappa : {k, k * k}) {
          const auto pair = build_nested_pair(nf, nc);
          const auto dofs = make_dof_map(*pair.fine, bc);
          const auto a = combine(assemble_operators(*pair.fine, dofs, bc), k, kappa);
          const auto cs = build_coarse_restriction(pair, dofs, bc);
          const auto a0 = galerkin_coarse_matrix(cs.restriction, a);
          const auto cops = assemble_operators(*pair.coarse, cs.coarse_dofs, bc);
          const auto direct = combine(cops, k, kappa);
          CHECK(oracle::rel_diff(oracle::dense(a0), oracle::dense(direct)) <= 1e-10);
          CHECK(symmetry_defect(a0) <= 1e-12);
          if (bc == BoundaryCondition::PEC) {
            const SparseComplexMatrix mh = cops.mass.cast<Complex>();
            for (int t = 0; t < 5; ++t) {
              const auto v = oracle::random_vector(a0.rows(), rng);
              const double lhs = v.dot(a0 * v).imag();
              CHECK(std::abs(lhs + kappa * v.dot(mh * v).real()) <= 1e-10 * std::abs(lhs));
            }
          }
        }
      }
    const auto m = build_cube_mesh(2);
    const auto dofs = make_dof_map(m, BoundaryCondition::PEC);
    const auto a = combine(assemble_operators(m, dofs, BoundaryCondition::PEC), 1.0, 1.0);
    SparseRealMatrix id(a.rows(), a.cols());
    id.setIdentity();
    CHECK(oracle::rel_diff(oracle::dense(galerkin_coarse_matrix(id, a)), oracle::dense(a)) == 0.0);
    SparseRealMatrix wrong(3, a.cols() + 1);
    CHECK_THROWS_AS(galerkin_coarse_matrix(wrong, a), InvalidArgument);
  }

  TEST_CASE("non-nested coarse restriction is rejected") {
    CHECK_THROWS_AS(build_nested_pair(5, 2), InvalidArgument);
  }

  TEST_CASE("owner weights are Boolean and follow the owned boxes") {
    for (auto bc : {BoundaryCondition::PEC, BoundaryCondition::Impedance})
      for (int layers : {1, 2}) {
        const auto m = build_cube_mesh(8);
        const auto dofs = make_dof_map(m, bc);
        const auto cover = build_cover(m, dofs, 2, layers, bc, PouKind::Owner);
        CHECK(cover.pou == PouKind::Owner);
        const auto s = dense_pou_sum(cover);
        CHECK((s - oracle::DenseR::Identity(cover.n_dofs, cover.n_dofs)).cwiseAbs().maxCoeff() == 0.0);
        for (const auto& sub : cover.subdomains)
          for (std::size_t i = 0; i < sub.interior_dofs.size(); ++i) {
            const double w = sub.pou_weights[i];
            CHECK((w == 0.0 || w == 1.0));
            // Owner test by coordinates: the edge midpoint lies in the owned box,
            // with a midpoint on a box face going to the upper box.
            const auto& e = m.edges[dofs.edges[sub.interior_dofs[i]]];
            const auto& a = m.vertices[e[0]];
            const auto& b = m.vertices[e[1]];
            bool inside = true;
            for (int d = 0; d < 3; ++d) {
              const double mid = 8.0 * (a[d] + b[d]) / 2;
              const double lo = sub.box.lo[d], hi = sub.box.hi[d];
              inside = inside && mid >= lo && (mid < hi || (hi == 8 && mid == 8.0));
            }
            CHECK((w == 1.0) == inside);
          }
      }
  }

  TEST_CASE("owner weights need a positive overlap between boxes") {
    const auto m = build_cube_mesh(4);
    const auto dofs = make_dof_map(m, BoundaryCondition::PEC);
    CHECK_THROWS(build_cover(m, dofs, 2, 0, BoundaryCondition::PEC, PouKind::Owner));
    const auto one = build_cover(m, dofs, 1, 0, BoundaryCondition::PEC, PouKind::Owner);
    for (double w : one.subdomains[0].pou_weights) CHECK(w == 1.0);
  }

  TEST_CASE("partition-of-unity names") {
    CHECK(parse_pou("owner") == PouKind::Owner);
    CHECK(parse_pou("multiplicity") == PouKind::Multiplicity);
    CHECK(std::string(to_string(PouKind::Owner)) == "owner");
    CHECK_THROWS_AS(parse_pou("smooth"), InvalidArgument);
  }
}
