#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace maxdd {

using Complex = std::complex<double>;

/// Row-compressed complex matrix used for A_kappa and every local/coarse block.
using SparseComplexMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>;
using SparseRealMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class BoundaryCondition { PEC, Impedance };

}  // namespace maxdd
