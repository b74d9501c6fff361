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

#include <cstddef>
#include <vector>

#include "nlocc/dense_operator.hpp"

namespace nlocc {

/// Completely positive map rho -> sum_i V_i rho V_i^dagger between two layouts.
class KrausChannel {
 public:
  KrausChannel(std::vector<Matrix> ops, SubsystemLayout in, SubsystemLayout out)
      : ops_(std::move(ops)), in_(std::move(in)), out_(std::move(out)) {
    const auto din = static_cast<Eigen::Index>(in_.total_dim());
    const auto dout = static_cast<Eigen::Index>(out_.total_dim());
    for (const auto& k : ops_)
      detail::require(k.rows() == dout && k.cols() == din,
                      "Kraus operator shape does not match channel layouts");
  }

  static KrausChannel identity(const SubsystemLayout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    return KrausChannel({Matrix::Identity(d, d)}, layout, layout);
  }

  [[nodiscard]] const std::vector<Matrix>& kraus_ops() const { return ops_; }
  [[nodiscard]] std::size_t size() const { return ops_.size(); }
  [[nodiscard]] const SubsystemLayout& in_layout() const { return in_; }
  [[nodiscard]] const SubsystemLayout& out_layout() const { return out_; }
  [[nodiscard]] std::size_t d_in() const { return in_.total_dim(); }
  [[nodiscard]] std::size_t d_out() const { return out_.total_dim(); }

  [[nodiscard]] Matrix apply(const Matrix& rho) const {
    detail::require(static_cast<std::size_t>(rho.rows()) == d_in() && rho.rows() == rho.cols(),
                    "channel input has dimension " + std::to_string(rho.rows()) + ", expected " +
                        std::to_string(d_in()));
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d_out()), static_cast<Eigen::Index>(d_out()));
    for (const auto& k : ops_) out.noalias() += k * rho * k.adjoint();
    return out;
  }

  [[nodiscard]] DenseOperator apply(const DenseOperator& rho) const {
    return DenseOperator(apply(rho.matrix()), out_);
  }

  [[nodiscard]] DensityMatrix apply(const DensityMatrix& rho) const {
    return DensityMatrix(apply(rho.op()));
  }

  /// sum_i V_i^dagger V_i, equal to the identity for trace-preserving maps.
  [[nodiscard]] Matrix completeness() const {
    Matrix s = Matrix::Zero(static_cast<Eigen::Index>(d_in()), static_cast<Eigen::Index>(d_in()));
    for (const auto& k : ops_) s.noalias() += k.adjoint() * k;
    return s;
  }

  [[nodiscard]] bool is_trace_preserving(double eps = tol::channel) const {
    const auto d = static_cast<Eigen::Index>(d_in());
    return max_abs(completeness() - Matrix::Identity(d, d)) <= eps;
  }

  /// next o this. Kraus list is every product B_j A_i; operators with Frobenius
  /// norm <= prune_below are dropped (pass a negative value to keep all).
  [[nodiscard]] KrausChannel then(const KrausChannel& next, double prune_below = 1e-12) const {
    detail::require(next.d_in() == d_out(), "channel composition: dimension mismatch");
    std::vector<Matrix> ops;
    ops.reserve(ops_.size() * next.ops_.size());
    for (const auto& a : ops_)
      for (const auto& b : next.ops_) {
        Matrix p = b * a;
        if (p.norm() > prune_below) ops.push_back(std::move(p));
      }
    return KrausChannel(std::move(ops), in_, next.out_);
  }

 private:
  std::vector<Matrix> ops_;
  SubsystemLayout in_;
  SubsystemLayout out_;
};

/// True iff Lambda(I_in / d_in) equals I_out / d_out within `eps` (max-abs).
inline bool preserves_max_mixed(const KrausChannel& c, double eps = tol::channel) {
  const auto din = static_cast<Eigen::Index>(c.d_in());
  const auto dout = static_cast<Eigen::Index>(c.d_out());
  const Matrix image = c.apply(Matrix(Matrix::Identity(din, din) / static_cast<double>(din)));
  return max_abs(image - Matrix::Identity(dout, dout) / static_cast<double>(dout)) <= eps;
}

}  // namespace nlocc
