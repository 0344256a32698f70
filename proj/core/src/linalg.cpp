#include "uavsim/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace uavsim {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error("matrix product dimension mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cdouble aik = a(i, k);
      if (aik == cdouble{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("matrix sum dimension mismatch");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("matrix diff dimension mismatch");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

ComplexMatrix hermitian(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(j, i) = std::conj(m(i, j));
    }
  }
  return out;
}

std::vector<double> column_norms(const ComplexMatrix& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out[j] += std::norm(m(i, j));
    }
  }
  for (double& v : out) v = std::sqrt(v);
  return out;
}

double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (const cdouble& v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

cdouble row_dot_conj(const ComplexMatrix& a, std::size_t i, const ComplexMatrix& b, std::size_t j) {
  if (a.cols() != b.cols()) throw Error("row_dot_conj length mismatch");
  cdouble acc{};
  for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * std::conj(b(j, k));
  return acc;
}

HermitianSolver::HermitianSolver(const ComplexMatrix& g) : n_(g.rows()), l_(g), perm_(g.rows()) {
  if (g.rows() != g.cols()) throw Error("HermitianSolver needs a square matrix");
  for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;

  double largest_pivot = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    // pick the largest remaining diagonal entry as the pivot
    std::size_t best = k;
    double best_val = l_(k, k).real();
    for (std::size_t i = k + 1; i < n_; ++i) {
      if (l_(i, i).real() > best_val) {
        best = i;
        best_val = l_(i, i).real();
      }
    }
    if (best != k) {
      std::swap(perm_[k], perm_[best]);
      for (std::size_t j = 0; j < n_; ++j) std::swap(l_(k, j), l_(best, j));
      for (std::size_t i = 0; i < n_; ++i) std::swap(l_(i, k), l_(i, best));
    }

    double pivot = l_(k, k).real();
    largest_pivot = std::max(largest_pivot, pivot);
    if (!(pivot > kRankTolerance * largest_pivot)) {
      throw RankDeficientError("gram matrix is rank deficient (pivot " + std::to_string(pivot) +
                               " vs largest " + std::to_string(largest_pivot) + ")");
    }

    const double root = std::sqrt(pivot);
    l_(k, k) = root;
    for (std::size_t i = k + 1; i < n_; ++i) l_(i, k) /= root;
    for (std::size_t i = k + 1; i < n_; ++i) {
      for (std::size_t j = k + 1; j <= i; ++j) {
        l_(i, j) -= l_(i, k) * std::conj(l_(j, k));
      }
    }
    // keep the strictly upper part in sync for the diagonal search above
    for (std::size_t i = k + 1; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) l_(i, j) = std::conj(l_(j, i));
    }
  }
}

ComplexMatrix HermitianSolver::inverse() const {
  // solve L L^H y = e_k for each unit vector, then undo the permutation
  ComplexMatrix inv(n_, n_);
  std::vector<cdouble> y(n_);
  for (std::size_t col = 0; col < n_; ++col) {
    // right-hand side is e_{perm^{-1}(col)} in the permuted ordering
    for (std::size_t i = 0; i < n_; ++i) y[i] = (perm_[i] == col) ? 1.0 : 0.0;
    // forward substitution with L
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < i; ++j) y[i] -= l_(i, j) * y[j];
      y[i] /= l_(i, i);
    }
    // back substitution with L^H
    for (std::size_t ii = n_; ii-- > 0;) {
      for (std::size_t j = ii + 1; j < n_; ++j) y[ii] -= std::conj(l_(j, ii)) * y[j];
      y[ii] /= l_(ii, ii);
    }
    for (std::size_t i = 0; i < n_; ++i) inv(perm_[i], col) = y[i];
  }
  return inv;
}

ComplexMatrix right_pseudo_inverse(const ComplexMatrix& m) {
  if (m.rows() > m.cols()) throw Error("right_pseudo_inverse expects a wide matrix");
  const std::size_t s = m.rows();
  ComplexMatrix gram(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      gram(i, j) = row_dot_conj(m, i, m, j);
      gram(j, i) = std::conj(gram(i, j));
    }
  }
  HermitianSolver solver(gram);
  return hermitian(m) * solver.inverse();
}

}  // namespace uavsim
