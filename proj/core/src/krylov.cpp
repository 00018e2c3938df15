#include "maxdd/krylov.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "maxdd/mesh.hpp"
#include "maxdd/precond.hpp"

namespace maxdd {
namespace {

constexpr double kReorthThreshold = 1e-8;

// Inner product <u, v>_W = v^H W u with W = I or an SPD weight.
class Gram {
 public:
  explicit Gram(const SparseRealMatrix* weight) : weight_(weight) {}

  // Returns W u (u itself for the Euclidean product).
  ComplexVector image(const ComplexVector& u) const {
    if (!weight_) return u;
    return (*weight_).cast<Complex>() * u;
  }
  double norm(const ComplexVector& u, const ComplexVector& wu) const {
    const double sq = u.dot(wu).real();  // u^H W u
    if (weight_ && !(sq >= 0.0))
      throw std::runtime_error("gmres: weight matrix is not positive definite");
    return std::sqrt(std::max(sq, 0.0));
  }
  bool weighted() const { return weight_ != nullptr; }

 private:
  const SparseRealMatrix* weight_;
};

void check_weight(const SparseRealMatrix& w, Eigen::Index n) {
  if (w.rows() != n || w.cols() != n) throw InvalidArgument("gmres: weight dimension mismatch");
  const SparseRealMatrix t = w.transpose();
  const SparseRealMatrix diff = w - t;
  double dmax = 0.0, amax = 0.0;
  for (int p = 0; p < diff.nonZeros(); ++p) dmax = std::max(dmax, std::abs(diff.valuePtr()[p]));
  for (int p = 0; p < w.nonZeros(); ++p) amax = std::max(amax, std::abs(w.valuePtr()[p]));
  if (dmax > 1e-12 * amax) throw InvalidArgument("gmres: weight matrix is not symmetric");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(w.coeff(i, i) > 0.0)) throw InvalidArgument("gmres: weight matrix is not positive definite");
}

// Complex Givens rotation zeroing b in [a; b].
struct Givens {
  double c = 1.0;
  Complex s = 0.0;

  static Givens make(Complex a, Complex b) {
    Givens g;
    const double na = std::abs(a), nb = std::abs(b);
    if (nb == 0.0) return g;
    if (na == 0.0) {
      g.c = 0.0;
      g.s = std::conj(b) / nb;
      return g;
    }
    const double t = std::hypot(na, nb);
    g.c = na / t;
    g.s = (a / na) * std::conj(b) / t;
    return g;
  }
  void apply(Complex& x, Complex& y) const {
    const Complex nx = c * x + s * y;
    const Complex ny = -std::conj(s) * x + c * y;
    x = nx;
    y = ny;
  }
};

}  // namespace

LinearOperator matrix_operator(const SparseComplexMatrix& matrix) {
  return [&matrix](const ComplexVector& x, ComplexVector& y) { y = matrix * x; };
}

LinearOperator preconditioner_operator(const Preconditioner& precond) {
  return [&precond](const ComplexVector& x, ComplexVector& y) { y = precond.apply(x); };
}

ComplexVector random_initial_guess(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexVector x(n);
  for (int i = 0; i < n; ++i) {
    const double re = dist(rng);
    const double im = dist(rng);
    x[i] = Complex(re, im);
  }
  return x;
}

GmresResult gmres(const LinearOperator& op, const LinearOperator& precond, const ComplexVector& rhs,
                  const SparseRealMatrix* weight, const GmresConfig& config) {
  if (!(config.tol > 0.0)) throw InvalidArgument("gmres: tol must be positive");
  if (config.max_iter < 1) throw InvalidArgument("gmres: max_iter must be >= 1");
  const auto n = rhs.size();
  const bool left = config.side == GmresSide::LeftWeighted;
  if (left) {
    if (!weight) throw InvalidArgument("gmres: LeftWeighted requires a weight matrix");
    check_weight(*weight, n);
  }
  const Gram gram(left ? weight : nullptr);
  auto apply_precond = [&](const ComplexVector& x) {
    if (!precond) return x;
    ComplexVector y;
    precond(x, y);
    return y;
  };
  auto apply_op = [&](const ComplexVector& x) {
    ComplexVector y;
    op(x, y);
    if (y.size() != n) throw InvalidArgument("gmres: operator dimension mismatch");
    return y;
  };

  GmresResult result;
  result.solution = config.initial_guess == InitialGuess::Random
                        ? random_initial_guess(static_cast<int>(n), config.seed)
                        : ComplexVector::Zero(n);

  ComplexVector r0 = rhs - apply_op(result.solution);
  if (left) r0 = apply_precond(r0);
  ComplexVector wr0 = gram.image(r0);
  const double beta = gram.norm(r0, wr0);
  const double reference = beta;

  if (beta == 0.0) {
    result.residual_history.push_back(0.0);
    result.converged = true;
    return result;
  }
  result.residual_history.push_back(beta / reference);
  if (beta / reference <= config.tol) {
    result.converged = true;
    return result;
  }

  const int m_max = config.max_iter;
  std::vector<ComplexVector> basis;   // V
  std::vector<ComplexVector> wbasis;  // W V (weighted only)
  basis.reserve(m_max + 1);
  basis.push_back(r0 / beta);
  if (gram.weighted()) wbasis.push_back(wr0 / beta);

  std::vector<std::vector<Complex>> hcols;  // column j of H, length j + 2
  std::vector<Givens> rotations;
  std::vector<Complex> g{Complex(beta)};

  int j = 0;
  for (; j < m_max; ++j) {
    ComplexVector w = left ? apply_precond(apply_op(basis[j])) : apply_op(apply_precond(basis[j]));

    std::vector<Complex> h(j + 2, Complex(0.0));
    const double w_norm_before = gram.weighted() ? gram.norm(w, gram.image(w)) : w.norm();
    for (int i = 0; i <= j; ++i) {
      const ComplexVector& wi = gram.weighted() ? wbasis[i] : basis[i];
      const Complex hij = wi.dot(w);  // v_i^H W w
      h[i] += hij;
      w -= hij * basis[i];
    }
    ComplexVector ww = gram.image(w);
    double hnext = gram.norm(w, ww);

    // Second Gram-Schmidt pass when the first lost orthogonality.
    double loss = 0.0;
    std::vector<Complex> corr(j + 1);
    for (int i = 0; i <= j; ++i) {
      const ComplexVector& wi = gram.weighted() ? wbasis[i] : basis[i];
      corr[i] = wi.dot(w);
      loss = std::max(loss, std::abs(corr[i]));
    }
    if (hnext > 0.0 && loss > kReorthThreshold * hnext) {
      for (int i = 0; i <= j; ++i) {
        h[i] += corr[i];
        w -= corr[i] * basis[i];
      }
      ww = gram.image(w);
      hnext = gram.norm(w, ww);
    }
    h[j + 1] = hnext;

    for (int i = 0; i < j; ++i) rotations[i].apply(h[i], h[i + 1]);
    const Givens rot = Givens::make(h[j], h[j + 1]);
    rot.apply(h[j], h[j + 1]);
    rotations.push_back(rot);
    g.push_back(Complex(0.0));
    rot.apply(g[j], g[j + 1]);
    hcols.push_back(std::move(h));

    const double rel = std::abs(g[j + 1]) / reference;
    result.residual_history.push_back(rel);
    const bool breakdown = hnext <= 1e-14 * std::max(w_norm_before, 1e-300);
    if (rel <= config.tol || breakdown) {
      result.converged = rel <= config.tol || breakdown;
      ++j;
      break;
    }
    basis.push_back(w / hnext);
    if (gram.weighted()) wbasis.push_back(ww / hnext);
  }
  result.iterations = j;
  if (!result.converged && j == m_max) result.converged = result.residual_history.back() <= config.tol;

  // Back substitution on the j x j triangular system.
  std::vector<Complex> y(j);
  for (int i = j - 1; i >= 0; --i) {
    Complex s = g[i];
    for (int c = i + 1; c < j; ++c) s -= hcols[c][i] * y[c];
    y[i] = s / hcols[i][i];
  }
  ComplexVector update = ComplexVector::Zero(n);
  for (int i = 0; i < j; ++i) update += y[i] * basis[i];
  if (!left) update = apply_precond(update);
  result.solution += update;
  return result;
}

void write_residual_history(std::ostream& os, const GmresResult& result) {
  os << "iteration,relative_residual\n";
  const auto old_precision = os.precision(17);
  for (std::size_t m = 0; m < result.residual_history.size(); ++m)
    os << m << ',' << result.residual_history[m] << '\n';
  os.precision(old_precision);
}

double theorem_bound(double coarse_size, double overlap, int m) {
  if (!(coarse_size > 0.0) || !(overlap > 0.0) || m < 0)
    throw InvalidArgument("theorem_bound: H and delta must be positive and m >= 0");
  const double ratio = coarse_size / overlap;
  const double q = 1.0 + ratio * ratio;
  return std::pow(1.0 - 1.0 / (q * q), 0.5 * m);
}

bool theorem_condition(double k, double coarse_size, double subdomain_size, double overlap,
                       double c1) {
  if (!(k > 0.0) || !(coarse_size > 0.0) || !(subdomain_size > 0.0) || !(overlap > 0.0) ||
      !(c1 > 0.0))
    throw InvalidArgument("theorem_condition: all inputs must be positive");
  const double ratio = coarse_size / overlap;
  return std::max(k * subdomain_size, k * coarse_size) <= c1 / (1.0 + ratio * ratio);
}

}  // namespace maxdd
