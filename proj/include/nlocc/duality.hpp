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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nlocc/dense_operator.hpp"
#include "nlocc/kraus_channel.hpp"
#include "nlocc/nlocc_maps.hpp"
#include "nlocc/parallel.hpp"
#include "nlocc/random.hpp"

namespace nlocc {

/// d_in / d_out of the source channel, kept as an exact ratio.
struct TraceFactor {
  std::size_t numerator = 1;
  std::size_t denominator = 1;
  [[nodiscard]] double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

/// Hilbert-Schmidt adjoint of a Kraus channel: X -> sum_i V_i^dagger X V_i.
/// Maps operators on the source's output space back to its input space.
class DualMap {
 public:
  DualMap(std::vector<Matrix> adjointed_ops, SubsystemLayout in, SubsystemLayout out, TraceFactor factor)
      : channel_(std::move(adjointed_ops), std::move(in), std::move(out)), factor_(factor) {}

  [[nodiscard]] const std::vector<Matrix>& kraus_ops() const { return channel_.kraus_ops(); }
  [[nodiscard]] const SubsystemLayout& in_layout() const { return channel_.in_layout(); }
  [[nodiscard]] const SubsystemLayout& out_layout() const { return channel_.out_layout(); }
  [[nodiscard]] TraceFactor trace_factor() const { return factor_; }

  [[nodiscard]] Matrix apply(const Matrix& x) const { return channel_.apply(x); }
  [[nodiscard]] DenseOperator apply(const DenseOperator& x) const { return channel_.apply(x); }

  /// The same CP map viewed as a (generally not trace-preserving) channel.
  [[nodiscard]] const KrausChannel& as_channel() const { return channel_; }

 private:
  KrausChannel channel_;
  TraceFactor factor_;
};

inline DualMap adjoint(const KrausChannel& c) {
  std::vector<Matrix> ops;
  ops.reserve(c.size());
  for (const auto& k : c.kraus_ops()) ops.push_back(k.adjoint());
  return DualMap(std::move(ops), c.out_layout(), c.in_layout(), TraceFactor{c.d_in(), c.d_out()});
}

/// Gamma = (d_out / d_in) Lambda^dagger, trace preserving whenever Lambda
/// preserves the maximally mixed state (which is required).
inline KrausChannel normalized_dual(const KrausChannel& c) {
  detail::require(preserves_max_mixed(c),
                  "normalized_dual: channel does not preserve the maximally mixed state");
  const double amp = std::sqrt(static_cast<double>(c.d_out()) / static_cast<double>(c.d_in()));
  std::vector<Matrix> ops;
  ops.reserve(c.size());
  for (const auto& k : c.kraus_ops()) ops.push_back(amp * k.adjoint());
  return KrausChannel(std::move(ops), c.out_layout(), c.in_layout());
}

struct AdjointReport {
  double max_deviation = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Samples random Hermitian A (output space) and B (input space) and records
/// max |Tr(A^dagger Lambda(B)) - Tr(dual(A^dagger) B)|.
inline AdjointReport verify_adjoint(const KrausChannel& c, const DualMap& dual, std::size_t trials,
                                    double tolerance, std::uint64_t seed = 0) {
  detail::require(trials >= 1, "verify_adjoint: trials must be >= 1");
  detail::require(dual.in_layout().total_dim() == c.d_out() && dual.out_layout().total_dim() == c.d_in(),
                  "verify_adjoint: dual map dimensions do not match the channel");
  std::vector<double> deviation(trials, 0.0);
  detail::parallel_for(trials, [&](std::size_t t) {
    Rng rng = substream(seed, t);
    const Matrix a = random_hermitian(c.d_out(), rng);
    const Matrix b = random_hermitian(c.d_in(), rng);
    const cplx lhs = hs_inner(a, c.apply(b));
    const cplx rhs = hs_inner(Matrix(dual.apply(a.adjoint()).adjoint()), b);
    deviation[t] = std::abs(lhs - rhs);
  });
  AdjointReport r;
  r.trials = trials;
  r.seed = seed;
  r.tolerance = tolerance;
  for (double d : deviation) r.max_deviation = std::max(r.max_deviation, d);
  r.pass = r.max_deviation <= tolerance;
  return r;
}

inline AdjointReport verify_adjoint(const KrausChannel& c, std::size_t trials, double tolerance,
                                    std::uint64_t seed = 0) {
  return verify_adjoint(c, adjoint(c), trials, tolerance, seed);
}

/// |0...0><0...0| on m two-qubit pairs (dimension 4^m).
inline Matrix target_projector(std::size_t m) {
  std::size_t d = 1;
  for (std::size_t k = 0; k < m; ++k) d *= 4;
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  p(0, 0) = 1.0;
  return p;
}

/// Pi = Lambda^dagger(P_00^{(x)m}) on the input space of a composed channel.
inline DenseOperator dual_image_operator(const KrausChannel& composed, std::size_t m) {
  const Matrix target = target_projector(m);
  detail::require(static_cast<std::size_t>(target.rows()) == composed.d_out(),
                  "dual_image_operator: channel output dimension " + std::to_string(composed.d_out()) +
                      " is not 4^m = " + std::to_string(target.rows()));
  return adjoint(composed).apply(DenseOperator(target, composed.out_layout()));
}

inline DenseOperator dual_image_operator(const Protocol& p, std::size_t m) {
  return dual_image_operator(compose(p), m);
}

}  // namespace nlocc
