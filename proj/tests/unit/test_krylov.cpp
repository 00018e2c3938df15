#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "maxdd/krylov.hpp"
#include "oracles.hpp"

using namespace maxdd;

namespace {

SparseComplexMatrix sparse_from(const oracle::DenseC& a) {
  SparseComplexMatrix s = a.sparseView();
  s.makeCompressed();
  return s;
}

oracle::DenseC random_matrix(int n, std::mt19937_64& rng) {
  oracle::DenseC a(n, n);
  for (int j = 0; j < n; ++j) a.col(j) = oracle::random_vector(n, rng);
  return a + 4.0 * oracle::DenseC::Identity(n, n);
}

LinearOperator dense_operator(const oracle::DenseC& m) {
  return [m](const ComplexVector& x, ComplexVector& y) { y = m * x; };
}

}  // namespace

TEST_SUITE("krylov") {
  TEST_CASE("unpreconditioned history matches the dense oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 3; ++trial) {
      const auto a = random_matrix(30, rng);
      const auto b = oracle::random_vector(30, rng);
      GmresConfig cfg;
      cfg.tol = 1e-14;
      cfg.max_iter = 20;
      cfg.seed = 7 + trial;
      const auto res = gmres(matrix_operator(sparse_from(a)), {}, b, nullptr, cfg);
      const auto ref = oracle::gmres_history(a, oracle::DenseC::Identity(30, 30), b,
                                             random_initial_guess(30, cfg.seed), 20);
      REQUIRE(res.residual_history.size() <= ref.size());
      for (std::size_t m = 0; m < res.residual_history.size(); ++m)
        CHECK(std::abs(res.residual_history[m] - ref[m]) <= 1e-8);
      CHECK(res.residual_history.front() == doctest::Approx(1.0));
    }
  }

  TEST_CASE("right-preconditioned history matches the dense oracle") {
    std::mt19937_64 rng(32);
    const auto a = random_matrix(30, rng);
    const oracle::DenseC p = random_matrix(30, rng).inverse();
    const auto b = oracle::random_vector(30, rng);
    GmresConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iter = 15;
    const auto res = gmres(matrix_operator(sparse_from(a)), dense_operator(p), b, nullptr, cfg);
    const auto ref = oracle::gmres_history(a, p, b, random_initial_guess(30, cfg.seed), 15);
    for (std::size_t m = 0; m < res.residual_history.size(); ++m)
      CHECK(std::abs(res.residual_history[m] - ref[m]) <= 1e-8);
    // The returned iterate carries the recorded residual.
    const double true_res = (b - a * res.solution).norm() /
                            (b - a * random_initial_guess(30, cfg.seed)).norm();
    CHECK(true_res == doctest::Approx(res.final_relative_residual()).epsilon(1e-6));
  }

  TEST_CASE("m distinct eigenvalues converge in at most m steps") {
    std::mt19937_64 rng(33);
    const int n = 30;
    const oracle::DenseC q = random_matrix(n, rng);
    oracle::DenseC d = oracle::DenseC::Zero(n, n);
    const Complex eig[] = {Complex(1.0, 0.5), Complex(-2.0, 1.0), Complex(3.0, -0.25)};
    for (int i = 0; i < n; ++i) d(i, i) = eig[i % 3];
    const oracle::DenseC a = q * d * q.inverse();
    GmresConfig cfg;
    cfg.tol = 1e-10;
    const auto res = gmres(matrix_operator(sparse_from(a)), {}, oracle::random_vector(n, rng),
                           nullptr, cfg);
    CHECK(res.converged);
    CHECK(res.iterations <= 3);
  }

  TEST_CASE("weighted variant with C = I reproduces the standard history") {
    std::mt19937_64 rng(34);
    const auto a = random_matrix(30, rng);
    const auto b = oracle::random_vector(30, rng);
    SparseRealMatrix id(30, 30);
    id.setIdentity();
    GmresConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iter = 20;
    const auto standard = gmres(matrix_operator(sparse_from(a)), {}, b, nullptr, cfg);
    cfg.side = GmresSide::LeftWeighted;
    const auto weighted = gmres(matrix_operator(sparse_from(a)), {}, b, &id, cfg);
    REQUIRE(standard.residual_history.size() == weighted.residual_history.size());
    for (std::size_t m = 0; m < standard.residual_history.size(); ++m)
      CHECK(std::abs(standard.residual_history[m] - weighted.residual_history[m]) <= 1e-12);
  }

  TEST_CASE("left weighted with a preconditioner is GMRES on M^{-1} A") {
    std::mt19937_64 rng(35);
    const auto a = random_matrix(30, rng);
    const oracle::DenseC p = random_matrix(30, rng).inverse();
    const auto b = oracle::random_vector(30, rng);
    SparseRealMatrix id(30, 30);
    id.setIdentity();
    GmresConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iter = 12;
    cfg.side = GmresSide::LeftWeighted;
    const auto res = gmres(matrix_operator(sparse_from(a)), dense_operator(p), b, &id, cfg);
    const auto ref = oracle::gmres_history(p * a, oracle::DenseC::Identity(30, 30), p * b,
                                           random_initial_guess(30, cfg.seed), 12);
    for (std::size_t m = 0; m < res.residual_history.size(); ++m)
      CHECK(std::abs(res.residual_history[m] - ref[m]) <= 1e-8);
  }

  TEST_CASE("seeded initial guess, monotone history, zero guess") {
    const auto g1 = random_initial_guess(50, 1);
    CHECK((g1 - random_initial_guess(50, 1)).norm() == 0.0);
    CHECK((g1 - random_initial_guess(50, 2)).norm() > 0.0);
    CHECK(g1.real().cwiseAbs().maxCoeff() <= 1.0);
    CHECK(g1.imag().cwiseAbs().maxCoeff() <= 1.0);

    std::mt19937_64 rng(36);
    const auto a = random_matrix(40, rng);
    const auto b = oracle::random_vector(40, rng);
    GmresConfig cfg;
    const auto r1 = gmres(matrix_operator(sparse_from(a)), {}, b, nullptr, cfg);
    const auto r2 = gmres(matrix_operator(sparse_from(a)), {}, b, nullptr, cfg);
    CHECK(r1.residual_history == r2.residual_history);
    CHECK(r1.converged);
    CHECK(r1.final_relative_residual() <= cfg.tol);
    CHECK(r1.residual_history.size() == static_cast<std::size_t>(r1.iterations + 1));
    for (std::size_t m = 1; m < r1.residual_history.size(); ++m)
      CHECK(r1.residual_history[m] <= r1.residual_history[m - 1] * (1 + 1e-12));

    cfg.initial_guess = InitialGuess::Zero;
    const auto z = gmres(matrix_operator(sparse_from(a)), {}, b, nullptr, cfg);
    CHECK(z.converged);
    CHECK((b - a * z.solution).norm() <= 1e-5 * b.norm());
  }

  TEST_CASE("iteration cap reports non-convergence") {
    std::mt19937_64 rng(37);
    const auto a = random_matrix(40, rng);
    GmresConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iter = 5;
    const auto r = gmres(matrix_operator(sparse_from(a)), {}, oracle::random_vector(40, rng), nullptr, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 5);
  }

  TEST_CASE("residual history CSV") {
    GmresResult r;
    r.residual_history = {1.0, 0.5, 0.25};
    std::ostringstream os;
    write_residual_history(os, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "iteration,relative_residual");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
  }

  TEST_CASE("convergence bound arithmetic") {
    CHECK(theorem_bound(1.0, 1.0, 2) == 0.75);
    double prev = 1.0;
    for (int m = 1; m <= 10; ++m) {
      const double v = theorem_bound(2.0, 1.0, m);
      CHECK(v < prev);
      prev = v;
    }
    prev = 0.0;
    for (double ratio : {1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
      const double v = theorem_bound(ratio, 1.0, 3);
      CHECK(v > prev);
      CHECK(v < 1.0);
      prev = v;
    }
    CHECK(theorem_bound(1e4, 1.0, 3) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(theorem_condition(1.0, 0.1, 0.1, 0.1, 1.0));
    CHECK_FALSE(theorem_condition(10.0, 0.1, 0.1, 0.1, 1.0));
    CHECK_FALSE(theorem_condition(1.0, 0.4, 0.1, 0.1, 1.0));
  }
}
