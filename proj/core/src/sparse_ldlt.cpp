#include "maxdd/sparse_ldlt.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/OrderingMethods>

namespace maxdd {

void SparseLdlt::factorize(const SparseComplexMatrix& matrix) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("SparseLdlt: matrix must be square");
  const int n = static_cast<int>(matrix.rows());
  n_ = n;

  // Fill-reducing ordering on the pattern of A + A^T.
  {
    Eigen::SparseMatrix<double, Eigen::ColMajor, int> pattern(n, n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(matrix.nonZeros()));
    for (int r = 0; r < n; ++r)
      for (SparseComplexMatrix::InnerIterator it(matrix, r); it; ++it)
        trips.emplace_back(r, static_cast<int>(it.col()), 1.0);
    pattern.setFromTriplets(trips.begin(), trips.end());
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
    Eigen::AMDOrdering<int> amd;
    amd(pattern, p);
    perm_.assign(p.indices().data(), p.indices().data() + n);
  }
  std::vector<int> pinv(n);
  for (int i = 0; i < n; ++i) pinv[perm_[i]] = i;

  // Upper triangle of C = P A P^T in compressed-column form.
  std::vector<int> cp(n + 1, 0);
  double amax = 0.0;
  for (int r = 0; r < n; ++r)
    for (SparseComplexMatrix::InnerIterator it(matrix, r); it; ++it) {
      amax = std::max(amax, std::abs(it.value()));
      const int i = pinv[r], j = pinv[it.col()];
      if (i <= j) ++cp[j + 1];
    }
  for (int j = 0; j < n; ++j) cp[j + 1] += cp[j];
  std::vector<int> ci(cp[n]);
  std::vector<Complex> cx(cp[n]);
  {
    std::vector<int> next(cp.begin(), cp.end() - 1);
    for (int r = 0; r < n; ++r)
      for (SparseComplexMatrix::InnerIterator it(matrix, r); it; ++it) {
        const int i = pinv[r], j = pinv[it.col()];
        if (i <= j) {
          ci[next[j]] = i;
          cx[next[j]++] = it.value();
        }
      }
  }

  // Symbolic: elimination tree and column counts.
  std::vector<int> parent(n), lnz(n), flag(n);
  for (int k = 0; k < n; ++k) {
    parent[k] = -1;
    flag[k] = k;
    lnz[k] = 0;
    for (int p = cp[k]; p < cp[k + 1]; ++p) {
      int i = ci[p];
      if (i < k) {
        for (; flag[i] != k; i = parent[i]) {
          if (parent[i] == -1) parent[i] = k;
          ++lnz[i];
          flag[i] = k;
        }
      }
    }
  }
  col_ptr_.assign(n + 1, 0);
  for (int k = 0; k < n; ++k) col_ptr_[k + 1] = col_ptr_[k] + lnz[k];
  row_index_.assign(col_ptr_[n], 0);
  values_.assign(col_ptr_[n], Complex(0.0));
  diag_.assign(n, Complex(0.0));

  // Numeric: up-looking row-by-row LDL^T.
  std::vector<Complex> y(n, Complex(0.0));
  std::vector<int> pattern(n);
  const double tiny = 1e-14 * amax;
  for (int k = 0; k < n; ++k) {
    int top = n;
    flag[k] = k;
    lnz[k] = 0;
    for (int p = cp[k]; p < cp[k + 1]; ++p) {
      int i = ci[p];
      y[i] += cx[p];
      int len = 0;
      for (; flag[i] != k; i = parent[i]) {
        pattern[len++] = i;
        flag[i] = k;
      }
      while (len > 0) pattern[--top] = pattern[--len];
    }
    Complex dk = y[k];
    y[k] = 0.0;
    for (; top < n; ++top) {
      const int i = pattern[top];
      const Complex yi = y[i];
      y[i] = 0.0;
      const int p2 = col_ptr_[i] + lnz[i];
      for (int p = col_ptr_[i]; p < p2; ++p) y[row_index_[p]] -= values_[p] * yi;
      const Complex lki = yi / diag_[i];
      dk -= lki * yi;
      row_index_[p2] = k;
      values_[p2] = lki;
      ++lnz[i];
    }
    if (!(std::abs(dk) > tiny) || !std::isfinite(std::abs(dk))) {
      throw SingularMatrixError("SparseLdlt: zero pivot at row " + std::to_string(perm_[k]) +
                                    " (elimination step " + std::to_string(k) + ")",
                                perm_[k]);
    }
    diag_[k] = dk;
  }
}

void SparseLdlt::solve_in_place(Complex* x, Complex* work) const {
  for (int i = 0; i < n_; ++i) work[i] = x[perm_[i]];
  for (int j = 0; j < n_; ++j) {
    const Complex xj = work[j];
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) work[row_index_[p]] -= values_[p] * xj;
  }
  for (int j = 0; j < n_; ++j) work[j] /= diag_[j];
  for (int j = n_ - 1; j >= 0; --j) {
    Complex s = work[j];
    for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) s -= values_[p] * work[row_index_[p]];
    work[j] = s;
  }
  for (int i = 0; i < n_; ++i) x[perm_[i]] = work[i];
}

ComplexVector SparseLdlt::solve(const ComplexVector& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("SparseLdlt::solve: dimension mismatch");
  ComplexVector x = rhs;
  std::vector<Complex> work(n_);
  solve_in_place(x.data(), work.data());
  return x;
}

std::size_t SparseLdlt::memory_bytes() const {
  return perm_.size() * sizeof(int) + col_ptr_.size() * sizeof(int) +
         row_index_.size() * sizeof(int) + values_.size() * sizeof(Complex) +
         diag_.size() * sizeof(Complex);
}

SparseLdlt factorize(const SparseComplexMatrix& matrix) { return SparseLdlt(matrix); }

ComplexVector solve(const SparseLdlt& factor, const ComplexVector& rhs) { return factor.solve(rhs); }

}  // namespace maxdd
