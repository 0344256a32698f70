#include "uavsim/precoding.hpp"

#include <cmath>

namespace uavsim {

Precoder zf_precoder(const ComplexMatrix& stacked) {
  if (stacked.rows() == 0) throw Error("zf_precoder: empty stack");
  if (stacked.rows() > stacked.cols()) {
    // row rank can never reach the stream count, so this is the same failure
    // class as a duplicated row
    throw RankDeficientError("zf_precoder: more streams than antennas");
  }
  Precoder p;
  p.v = right_pseudo_inverse(stacked);
  p.raw_column_norms = column_norms(p.v);
  for (std::size_t j = 0; j < p.v.cols(); ++j) {
    const double n = p.raw_column_norms[j];
    for (std::size_t i = 0; i < p.v.rows(); ++i) p.v(i, j) /= n;
  }
  return p;
}

double effective_gain(const ComplexMatrix& h_row, const ComplexMatrix& v, std::size_t col) {
  if (h_row.cols() != v.rows()) throw Error("effective_gain dimension mismatch");
  cdouble acc{};
  for (std::size_t k = 0; k < v.rows(); ++k) acc += h_row(0, k) * v(k, col);
  return std::norm(acc);
}

}  // namespace uavsim
