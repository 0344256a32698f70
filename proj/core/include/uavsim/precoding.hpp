#pragma once

#include "uavsim/linalg.hpp"

namespace uavsim {

// Zero-forcing precoder for a stacked channel matrix (one row per stream).
// v holds unit-norm columns, one per stream; raw_column_norms are the norms
// of the unnormalized pseudo-inverse columns, so the on-stream power gain of
// column k is 1 / raw_column_norms[k]^2.
struct Precoder {
  ComplexMatrix v;
  std::vector<double> raw_column_norms;
};

Precoder zf_precoder(const ComplexMatrix& stacked);

// |h v_col|^2 for a 1 x n channel row against one precoder column.
double effective_gain(const ComplexMatrix& h_row, const ComplexMatrix& v, std::size_t col);

}  // namespace uavsim
