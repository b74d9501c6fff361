// Copyright 2026 The nlocc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

#include "nlocc/dense_operator.hpp"

namespace nlocc {

using Rng = std::mt19937_64;

/// Independent stream for item `index` of a seeded computation, so results do
/// not depend on the order in which parallel workers pick items up.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline Matrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

inline Vector random_unit_vector(std::size_t dim, Rng& rng) {
  Vector v = random_ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

inline Matrix random_hermitian(std::size_t dim, Rng& rng) {
  const Matrix g = random_ginibre(dim, dim, rng);
  return (g + g.adjoint()) / 2.0;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
inline Matrix random_unitary(std::size_t dim, Rng& rng) {
  const Matrix g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const cplx d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

/// Full-rank random state from the Hilbert-Schmidt (Ginibre) ensemble.
inline DensityMatrix random_density(const SubsystemLayout& layout, Rng& rng) {
  const std::size_t d = layout.total_dim();
  const Matrix g = random_ginibre(d, d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix(std::move(rho), layout);
}

inline DensityMatrix random_pure_state(const SubsystemLayout& layout, Rng& rng) {
  return pure_state(random_unit_vector(layout.total_dim(), rng), layout);
}

}  // namespace nlocc
