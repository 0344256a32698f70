#pragma once

#include <cstddef>
#include <vector>

#include "uavsim/types.hpp"

namespace uavsim {

// Dense complex matrix, row-major. Deliberately minimal: just what the
// precoding and power-control math needs. Dimensions here are tiny (stacked
// channel matrices are at most a few dozen rows), so clarity wins over
// cleverness everywhere except the Gram solve.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cdouble& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cdouble& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<cdouble>& data() { return data_; }
  const std::vector<cdouble>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

// conjugate transpose
ComplexMatrix hermitian(const ComplexMatrix& m);

// Euclidean norm of each column
std::vector<double> column_norms(const ComplexMatrix& m);

double max_abs(const ComplexMatrix& m);

// Inner product of two equal-length rows taken from matrices: a(i,:) * b(j,:)^H.
cdouble row_dot_conj(const ComplexMatrix& a, std::size_t i, const ComplexMatrix& b, std::size_t j);

// Factorization of a Hermitian positive semi-definite matrix via Cholesky
// with diagonal pivoting. Throws RankDeficientError when the smallest pivot
// falls below 1e-12 times the largest, which is how a rank-deficient channel
// stack surfaces to callers.
class HermitianSolver {
 public:
  explicit HermitianSolver(const ComplexMatrix& g);

  // full inverse, reconstructed from the pivoted factor
  ComplexMatrix inverse() const;

  std::size_t order() const { return n_; }

 private:
  std::size_t n_ = 0;
  ComplexMatrix l_;            // lower triangular factor of the permuted matrix
  std::vector<std::size_t> perm_;
};

// Right pseudo-inverse m^H (m m^H)^{-1} of a wide full-row-rank matrix.
// The Gram system is solved through HermitianSolver, never by naive
// elimination on the rectangular matrix itself.
ComplexMatrix right_pseudo_inverse(const ComplexMatrix& m);

inline constexpr double kRankTolerance = 1e-12;

}  // namespace uavsim
