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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlocc/error.hpp"
#include "nlocc/layout.hpp"

namespace nlocc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Numerical thresholds shared by every module.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double density = 1e-10;
inline constexpr double orthonormal = 1e-10;
inline constexpr double eigen_clip = 1e-12;  // eigenvalues below count as 0 in entropies
inline constexpr double support = 1e-10;     // support membership in relative entropy
inline constexpr double unitary = 1e-9;
inline constexpr double channel = 1e-9;
}  // namespace tol

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double eps = tol::hermitian) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= eps;
}

/// Square complex matrix together with the tensor factorization it acts on.
class DenseOperator {
 public:
  DenseOperator() : matrix_(Matrix::Ones(1, 1)) {}

  DenseOperator(Matrix m, SubsystemLayout layout)
      : matrix_(std::move(m)), layout_(std::move(layout)) {
    detail::require(matrix_.rows() == matrix_.cols(), "operator matrix must be square");
    detail::require(static_cast<std::size_t>(matrix_.rows()) == layout_.total_dim(),
                    "operator dimension " + std::to_string(matrix_.rows()) +
                        " does not match layout " + describe(layout_));
  }

  /// Single-system operator with an anonymous layout.
  explicit DenseOperator(Matrix m)
      : DenseOperator(m, SubsystemLayout::single(static_cast<std::size_t>(m.rows()))) {}

  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] const SubsystemLayout& layout() const { return layout_; }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  [[nodiscard]] cplx trace() const { return matrix_.trace(); }
  [[nodiscard]] bool is_hermitian(double eps = tol::hermitian) const {
    return nlocc::is_hermitian(matrix_, eps);
  }

  [[nodiscard]] DenseOperator relabeled(SubsystemLayout layout) const {
    return DenseOperator(matrix_, std::move(layout));
  }

  [[nodiscard]] DenseOperator scaled(cplx s) const { return DenseOperator(matrix_ * s, layout_); }

 private:
  Matrix matrix_;
  SubsystemLayout layout_;
};

inline DenseOperator identity(const SubsystemLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  return DenseOperator(Matrix::Identity(d, d), layout);
}

inline DenseOperator maximally_mixed(const SubsystemLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  return DenseOperator(Matrix::Identity(d, d) / static_cast<double>(d), layout);
}

inline Vector basis_vector(std::size_t dim, std::size_t k) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

inline DenseOperator projector(const Vector& v, const SubsystemLayout& layout) {
  return DenseOperator(v * v.adjoint(), layout);
}

// ---------------------------------------------------------------------------
// Spectral decomposition

struct EigenDecomposition {
  Eigen::VectorXd values;  // descending
  Matrix vectors;          // orthonormal columns matching `values`
};

inline EigenDecomposition eig_hermitian(const Matrix& a) {
  detail::require(a.rows() == a.cols(), "eig_hermitian: matrix must be square");
  detail::require(is_hermitian(a), "eig_hermitian: matrix is not Hermitian within 1e-10");
  const Matrix sym = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver failed");
  const Eigen::Index n = a.rows();
  EigenDecomposition out{Eigen::VectorXd(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

inline EigenDecomposition eig_hermitian(const DenseOperator& a) { return eig_hermitian(a.matrix()); }

/// Shannon entropy (bits) of a probability vector, with clipping of tiny values.
inline double entropy_bits(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs)
    if (p > tol::eigen_clip) s -= p * std::log2(p);
  return std::max(s, 0.0);
}

// ---------------------------------------------------------------------------
// Density matrices

/// Validated state: Hermitian, positive semidefinite and unit trace within 1e-10.
/// The spectrum (descending) is computed once at construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(DenseOperator op) : op_(std::move(op)) {
    detail::require(op_.is_hermitian(tol::density), "density matrix is not Hermitian within 1e-10");
    detail::require(std::abs(op_.trace() - 1.0) <= tol::density,
                    "density matrix trace is not 1 within 1e-10");
    spectrum_ = eig_hermitian(op_.matrix()).values;
    detail::require(spectrum_.size() == 0 || spectrum_.minCoeff() >= -tol::density,
                    "density matrix has a negative eigenvalue below -1e-10");
  }

  DensityMatrix(Matrix m, SubsystemLayout layout)
      : DensityMatrix(DenseOperator(std::move(m), std::move(layout))) {}

  [[nodiscard]] const DenseOperator& op() const { return op_; }
  [[nodiscard]] const Matrix& matrix() const { return op_.matrix(); }
  [[nodiscard]] const SubsystemLayout& layout() const { return op_.layout(); }
  [[nodiscard]] std::size_t dim() const { return op_.dim(); }
  [[nodiscard]] const Eigen::VectorXd& spectrum() const { return spectrum_; }

  /// Spectrum clipped to [0, 1] and renormalized; suitable as a probability vector.
  [[nodiscard]] std::vector<double> probabilities() const {
    std::vector<double> p(static_cast<std::size_t>(spectrum_.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::max(spectrum_(static_cast<Eigen::Index>(i)), 0.0);
      total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
  }

 private:
  DenseOperator op_;
  Eigen::VectorXd spectrum_;
};

inline DensityMatrix pure_state(const Vector& psi, const SubsystemLayout& layout) {
  const double norm = psi.norm();
  detail::require(norm > 0.0, "pure_state: zero vector");
  const Vector v = psi / norm;
  return DensityMatrix(v * v.adjoint(), layout);
}

// ---------------------------------------------------------------------------
// Tensor structure

/// Kronecker product; leftmost factor is the most significant index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline DenseOperator tensor(const DenseOperator& a, const DenseOperator& b) {
  return DenseOperator(kron(a.matrix(), b.matrix()), concat(a.layout(), b.layout()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.op(), b.op()));
}

/// n-fold tensor power. Labels of later copies are primed (A, A', A'', ...).
inline DenseOperator tensor_power(const DenseOperator& a, std::size_t n) {
  DenseOperator out;  // 1x1 identity on the empty layout
  for (std::size_t k = 0; k < n; ++k) out = tensor(out, a);
  return out;
}

inline DensityMatrix tensor_power(const DensityMatrix& a, std::size_t n) {
  return DensityMatrix(tensor_power(a.op(), n));
}

namespace detail {

/// (I_left (x) op (x) I_right) * a, where op is (mo x mi) and a has left*mi*right rows.
inline Matrix apply_left_factor(const Matrix& op, const Matrix& a, std::size_t left,
                                std::size_t right) {
  const auto mi = static_cast<std::size_t>(op.cols());
  const auto mo = static_cast<std::size_t>(op.rows());
  require(static_cast<std::size_t>(a.rows()) == left * mi * right, "factor application: size mismatch");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(left * mo * right), a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (std::size_t l = 0; l < left; ++l)
      for (std::size_t j = 0; j < mi; ++j)
        for (std::size_t r = 0; r < right; ++r) {
          const cplx v = a(static_cast<Eigen::Index>((l * mi + j) * right + r), c);
          if (v == cplx{}) continue;
          for (std::size_t i = 0; i < mo; ++i)
            out(static_cast<Eigen::Index>((l * mo + i) * right + r), c) +=
                op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * v;
        }
  return out;
}

/// (I (x) w (x) I) a (I (x) w (x) I)^dagger for a square factor w.
inline Matrix conjugate_factor(const Matrix& w, const Matrix& a, std::size_t left,
                               std::size_t right) {
  const Matrix half = apply_left_factor(w, a, left, right);
  return apply_left_factor(w, half.adjoint(), left, right).adjoint();
}

/// For every flat index, the part of the index carried by the selected subsystems.
inline std::vector<std::size_t> selected_offsets(const SubsystemLayout& layout,
                                                 const std::vector<std::size_t>& selected) {
  const std::size_t d = layout.total_dim();
  std::vector<std::size_t> out(d, 0);
  for (std::size_t k : selected) {
    const std::size_t stride = layout.stride(k);
    const std::size_t dim = layout[k].dim;
    for (std::size_t x = 0; x < d; ++x) out[x] += ((x / stride) % dim) * stride;
  }
  return out;
}

}  // namespace detail

inline DenseOperator partial_trace(const DenseOperator& a, std::string_view label) {
  const auto& layout = a.layout();
  const std::size_t k = layout.index_of(label);
  const std::size_t left = layout.dim_before(k);
  const std::size_t mid = layout[k].dim;
  const std::size_t right = layout.dim_after(k);
  const auto& m = a.matrix();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(left * right),
                            static_cast<Eigen::Index>(left * right));
  for (std::size_t l1 = 0; l1 < left; ++l1)
    for (std::size_t r1 = 0; r1 < right; ++r1)
      for (std::size_t l2 = 0; l2 < left; ++l2)
        for (std::size_t r2 = 0; r2 < right; ++r2) {
          cplx s{};
          for (std::size_t j = 0; j < mid; ++j)
            s += m(static_cast<Eigen::Index>((l1 * mid + j) * right + r1),
                   static_cast<Eigen::Index>((l2 * mid + j) * right + r2));
          out(static_cast<Eigen::Index>(l1 * right + r1), static_cast<Eigen::Index>(l2 * right + r2)) = s;
        }
  return DenseOperator(std::move(out), layout.without(label));
}

inline DensityMatrix partial_trace(const DensityMatrix& a, std::string_view label) {
  return DensityMatrix(partial_trace(a.op(), label));
}

/// Reorders tensor factors: result subsystem i is input subsystem order[i].
inline DenseOperator permute_subsystems(const DenseOperator& a, const std::vector<std::size_t>& order) {
  const auto& layout = a.layout();
  detail::require(order.size() == layout.size(), "permute_subsystems: order has wrong length");
  std::vector<Subsystem> subs;
  std::vector<bool> seen(order.size(), false);
  for (std::size_t k : order) {
    detail::require(k < layout.size() && !seen[k], "permute_subsystems: not a permutation");
    seen[k] = true;
    subs.push_back(layout[k]);
  }
  const SubsystemLayout target(std::move(subs));
  const std::size_t d = layout.total_dim();
  // map[new flat index] = old flat index
  std::vector<std::size_t> map(d, 0);
  for (std::size_t x = 0; x < d; ++x) {
    std::size_t old = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::size_t digit = (x / target.stride(i)) % target[i].dim;
      old += digit * layout.stride(order[i]);
    }
    map[x] = old;
  }
  Matrix out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          a.matrix()(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j]));
  return DenseOperator(std::move(out), target);
}

/// Transposes the listed subsystems (by position).
inline DenseOperator partial_transpose(const DenseOperator& a, const std::vector<std::size_t>& subsystems) {
  const auto offsets = detail::selected_offsets(a.layout(), subsystems);
  const std::size_t d = a.dim();
  Matrix out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y) {
      const std::size_t xs = x - offsets[x] + offsets[y];
      const std::size_t ys = y - offsets[y] + offsets[x];
      out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          a.matrix()(static_cast<Eigen::Index>(xs), static_cast<Eigen::Index>(ys));
    }
  return DenseOperator(std::move(out), a.layout());
}

// ---------------------------------------------------------------------------
// Dephasing

using Basis = std::vector<Vector>;

inline Basis computational_basis(std::size_t dim) {
  Basis b;
  for (std::size_t k = 0; k < dim; ++k) b.push_back(basis_vector(dim, k));
  return b;
}

/// Columns are the basis vectors.
inline Matrix basis_matrix(const Basis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.size());
  Matrix u(d, d);
  for (Eigen::Index k = 0; k < d; ++k) u.col(k) = basis[static_cast<std::size_t>(k)];
  return u;
}

inline void validate_basis(const Basis& basis, std::size_t dim) {
  detail::require(basis.size() == dim, "basis must contain exactly " + std::to_string(dim) + " vectors");
  for (const auto& v : basis)
    detail::require(static_cast<std::size_t>(v.size()) == dim,
                    "basis vectors must have length " + std::to_string(dim));
  const Matrix u = basis_matrix(basis);
  const auto d = static_cast<Eigen::Index>(dim);
  detail::require(max_abs(u.adjoint() * u - Matrix::Identity(d, d)) <= tol::orthonormal,
                  "basis is not orthonormal within 1e-10");
}

inline bool is_computational(const Basis& basis) {
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (max_abs(basis[k] - basis_vector(basis.size(), k)) != 0.0) return false;
  return true;
}

/// Pinching sum_i P_i a P_i with rank-one projectors P_i on one tensor factor.
inline DenseOperator dephase(const DenseOperator& a, std::string_view label, const Basis& basis) {
  const auto& layout = a.layout();
  const std::size_t k = layout.index_of(label);
  const std::size_t left = layout.dim_before(k);
  const std::size_t mid = layout[k].dim;
  const std::size_t right = layout.dim_after(k);
  validate_basis(basis, mid);

  const bool computational = is_computational(basis);
  const Matrix u = basis_matrix(basis);
  Matrix work = computational ? a.matrix() : detail::conjugate_factor(u.adjoint(), a.matrix(), left, right);
  const std::size_t d = a.dim();
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y)
      if ((x / right) % mid != (y / right) % mid)
        work(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 0.0;
  if (!computational) work = detail::conjugate_factor(u, work, left, right);
  return DenseOperator(std::move(work), layout);
}

inline DenseOperator dephase(const DenseOperator& a, std::string_view label) {
  return dephase(a, label, computational_basis(a.layout().at(label).dim));
}

// ---------------------------------------------------------------------------
// Functionals

inline double von_neumann_entropy(const DensityMatrix& rho) {
  const auto& s = rho.spectrum();
  return entropy_bits(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
}

/// S(rho || sigma) in bits; +infinity when supp(rho) is not inside supp(sigma).
inline double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require(rho.dim() == sigma.dim(), "relative_entropy: dimension mismatch");
  const auto es = eig_hermitian(sigma.matrix());
  double cross = 0.0;  // -Tr rho log2 sigma
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const Vector v = es.vectors.col(k);
    const double weight = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    if (es.values(k) <= tol::support) {
      if (weight > tol::support) return std::numeric_limits<double>::infinity();
      continue;
    }
    cross -= weight * std::log2(es.values(k));
  }
  return cross - von_neumann_entropy(rho);
}

/// Hilbert-Schmidt inner product Tr(a^dagger b).
inline cplx hs_inner(const Matrix& a, const Matrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "hs_inner: dimension mismatch");
  return (a.conjugate().cwiseProduct(b)).sum();
}

inline cplx hs_inner(const DenseOperator& a, const DenseOperator& b) {
  return hs_inner(a.matrix(), b.matrix());
}

}  // namespace nlocc
