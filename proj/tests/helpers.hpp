#pragma once

#include "lsr/types.hpp"

#include <random>

namespace test {

using lsr::Cx;
using lsr::CxMatrix;
using lsr::Index;

inline auto random_matrix(std::mt19937_64 &rng, Index rows, Index cols) -> CxMatrix
{
  std::normal_distribution<double> d;
  CxMatrix x(rows, cols);
  for (Index c = 0; c < cols; c++) {
    for (Index r = 0; r < rows; r++) {
      x(r, c) = Cx{d(rng), d(rng)};
    }
  }
  return x;
}

inline auto random_row(std::mt19937_64 &rng, Index n, Index coils) -> lsr::HybridRow
{
  return lsr::HybridRow(random_matrix(rng, n, coils));
}

inline auto random_tensor(std::mt19937_64 &rng, Index m, Index n, Index coils) -> lsr::ComplexTensor3
{
  std::normal_distribution<double> d;
  lsr::ComplexTensor3 t(m, n, coils);
  for (auto &v : t.data()) {
    v = Cx{d(rng), d(rng)};
  }
  return t;
}

inline auto unit_column(Index n, Index i) -> CxMatrix
{
  CxMatrix x = CxMatrix::Zero(n, 1);
  x(i, 0) = 1.0;
  return x;
}

inline auto rel_diff(Cx a, Cx b) -> double { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace test
