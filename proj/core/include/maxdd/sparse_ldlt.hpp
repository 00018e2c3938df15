#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxdd/types.hpp"

namespace maxdd {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, int pivot) : std::runtime_error(what), pivot_(pivot) {}
  /// Row/column of the input matrix where elimination broke down.
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// Sparse LDL^T factorization of a complex *symmetric* (not Hermitian)
/// matrix, P A P^T = L D L^T, with an approximate-minimum-degree ordering.
/// No pivoting is performed: every leading block of a Maxwell matrix with
/// nonzero absorption has a sign-definite imaginary part, so no zero pivot
/// can arise there. Both triangles must be stored: entries are taken from the
/// upper triangle of the permuted matrix, so the input must be symmetric.
class SparseLdlt {
 public:
  SparseLdlt() = default;
  explicit SparseLdlt(const SparseComplexMatrix& matrix) { factorize(matrix); }

  /// Throws SingularMatrixError with the offending original index.
  void factorize(const SparseComplexMatrix& matrix);

  ComplexVector solve(const ComplexVector& rhs) const;
  /// x <- A^{-1} x, `work` must have rows() entries.
  void solve_in_place(Complex* x, Complex* work) const;

  int rows() const { return n_; }
  std::size_t factor_nonzeros() const { return row_index_.size() + diag_.size(); }
  std::size_t memory_bytes() const;

 private:
  int n_ = 0;
  std::vector<int> perm_;  // new -> old
  std::vector<int> col_ptr_;
  std::vector<int> row_index_;
  std::vector<Complex> values_;
  std::vector<Complex> diag_;
};

SparseLdlt factorize(const SparseComplexMatrix& matrix);
ComplexVector solve(const SparseLdlt& factor, const ComplexVector& rhs);

}  // namespace maxdd
