#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "maxdd/types.hpp"

namespace maxdd {

class Preconditioner;

/// y = Op(x). `y` is resized by the callee if needed.
using LinearOperator = std::function<void(const ComplexVector& x, ComplexVector& y)>;

LinearOperator matrix_operator(const SparseComplexMatrix& matrix);
LinearOperator preconditioner_operator(const Preconditioner& precond);

enum class GmresSide {
  /// Solve A M^{-1} y = b, x = M^{-1} y; Euclidean Arnoldi; the relative
  /// residual is ||b - A x_m|| / ||b - A x_0||.
  RightStandard,
  /// Solve M^{-1} A x = M^{-1} b with Arnoldi in <u, v>_C = v^H C u; the
  /// relative residual is ||M^{-1} r_m||_C / ||M^{-1} r_0||_C.
  LeftWeighted,
};

enum class InitialGuess { Random, Zero };

struct GmresConfig {
  double tol = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = 0;
  GmresSide side = GmresSide::RightStandard;
  InitialGuess initial_guess = InitialGuess::Random;
};

struct GmresResult {
  ComplexVector solution;
  int iterations = 0;
  /// Entry m is the relative residual after m iterations (entry 0: initial guess).
  std::vector<double> residual_history;
  bool converged = false;

  double final_relative_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
};

/// Seeded starting vector: independent uniform real and imaginary parts in [-1, 1].
ComplexVector random_initial_guess(int n, std::uint64_t seed);

/// Full (unrestarted) GMRES. `precond` may be empty (identity). `weight` is
/// the SPD Gram matrix C and is required for LeftWeighted only.
GmresResult gmres(const LinearOperator& op, const LinearOperator& precond, const ComplexVector& rhs,
                  const SparseRealMatrix* weight, const GmresConfig& config);

/// CSV with columns iteration,relative_residual.
void write_residual_history(std::ostream& os, const GmresResult& result);

/// Residual reduction bound after m weighted-GMRES steps for two-level
/// additive Schwarz: (1 - (1 + (H/delta)^2)^{-2})^{m/2}.
double theorem_bound(double coarse_size, double overlap, int m);

/// max{k H_sub, k H} <= C1 (1 + (H/delta)^2)^{-1}.
bool theorem_condition(double k, double coarse_size, double subdomain_size, double overlap,
                       double c1);

}  // namespace maxdd
