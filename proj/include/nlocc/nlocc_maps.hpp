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
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "nlocc/dense_operator.hpp"
#include "nlocc/kraus_channel.hpp"
#include "nlocc/random.hpp"

namespace nlocc {

// ---------------------------------------------------------------------------
// Elementary NLOCC channels. Each constructor takes the layout the channel
// acts on; the output layout follows from the step.

/// U (x) I, with U acting on the listed subsystems in the listed order.
/// All listed subsystems must belong to the same party.
inline KrausChannel make_local_unitary(const SubsystemLayout& in, const std::vector<std::string>& labels,
                                       const Matrix& u) {
  detail::require(!labels.empty(), "local unitary: no subsystems given");
  std::vector<std::size_t> idx;
  std::size_t dsub = 1;
  for (const auto& l : labels) {
    const std::size_t k = in.index_of(l);
    for (std::size_t prev : idx)
      detail::require(prev != k, "local unitary: subsystem '" + l + "' listed twice");
    idx.push_back(k);
    dsub *= in[k].dim;
  }
  const Party party = in[idx.front()].party;
  for (std::size_t k : idx)
    detail::require(in[k].party == party,
                    "local unitary acts across parties (" + to_string(party) + " and " +
                        to_string(in[k].party) + "); only local operations are allowed");
  detail::require(static_cast<std::size_t>(u.rows()) == dsub && u.rows() == u.cols(),
                  "local unitary: matrix must be " + std::to_string(dsub) + "x" + std::to_string(dsub));
  detail::require(max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) <= tol::unitary,
                  "local unitary: matrix is not unitary within 1e-9");

  const std::size_t d = in.total_dim();
  // sub-index digits are ordered as in `labels`
  std::vector<std::size_t> sub_stride(idx.size(), 1);
  for (std::size_t i = idx.size(); i-- > 1;) sub_stride[i - 1] = sub_stride[i] * in[idx[i]].dim;

  Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t y = 0; y < d; ++y) {
    std::size_t base = y;
    std::size_t sy = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t digit = (y / in.stride(idx[i])) % in[idx[i]].dim;
      base -= digit * in.stride(idx[i]);
      sy += digit * sub_stride[i];
    }
    for (std::size_t sx = 0; sx < dsub; ++sx) {
      std::size_t x = base;
      for (std::size_t i = 0; i < idx.size(); ++i)
        x += ((sx / sub_stride[i]) % in[idx[i]].dim) * in.stride(idx[i]);
      k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          u(static_cast<Eigen::Index>(sx), static_cast<Eigen::Index>(sy));
    }
  }
  return KrausChannel({std::move(k)}, in, in);
}

/// rho -> rho (x) I/d_anc, the ancilla appended as the last subsystem.
/// An empty label becomes "anc" (primed until unique).
inline KrausChannel make_add_max_mixed(const SubsystemLayout& in, std::size_t d_anc, Party party,
                                       std::string label = {}) {
  detail::require(d_anc >= 1, "add_max_mixed: ancilla dimension must be >= 1");
  if (label.empty()) label = "anc";
  detail::require(!in.contains(label), "add_max_mixed: label '" + label + "' already in use");
  const SubsystemLayout out = in.appended(Subsystem{label, d_anc, party});
  const std::size_t d = in.total_dim();
  const double amp = 1.0 / std::sqrt(static_cast<double>(d_anc));
  std::vector<Matrix> ops;
  for (std::size_t a = 0; a < d_anc; ++a) {
    Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d * d_anc), static_cast<Eigen::Index>(d));
    for (std::size_t x = 0; x < d; ++x)
      k(static_cast<Eigen::Index>(x * d_anc + a), static_cast<Eigen::Index>(x)) = amp;
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops), in, out);
}

/// Local partial trace over `label`, Kraus operators I (x) <k| (x) I.
inline KrausChannel make_discard(const SubsystemLayout& in, const std::string& label) {
  const std::size_t pos = in.index_of(label);
  const std::size_t left = in.dim_before(pos);
  const std::size_t mid = in[pos].dim;
  const std::size_t right = in.dim_after(pos);
  std::vector<Matrix> ops;
  for (std::size_t j = 0; j < mid; ++j) {
    Matrix k = Matrix::Zero(static_cast<Eigen::Index>(left * right), static_cast<Eigen::Index>(left * mid * right));
    for (std::size_t l = 0; l < left; ++l)
      for (std::size_t r = 0; r < right; ++r)
        k(static_cast<Eigen::Index>(l * right + r), static_cast<Eigen::Index>((l * mid + j) * right + r)) = 1.0;
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops), in, in.without(label));
}

/// Pinching of one subsystem: Kraus projectors I (x) |b_i><b_i| (x) I.
inline KrausChannel make_dephase_local(const SubsystemLayout& in, const std::string& label,
                                       const Basis& basis) {
  const std::size_t pos = in.index_of(label);
  const std::size_t mid = in[pos].dim;
  validate_basis(basis, mid);
  const std::size_t left = in.dim_before(pos);
  const std::size_t right = in.dim_after(pos);
  const std::size_t d = in.total_dim();
  std::vector<Matrix> ops;
  for (const auto& b : basis) {
    const Matrix p = b * b.adjoint();
    Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t l = 0; l < left; ++l)
      for (std::size_t r = 0; r < right; ++r)
        for (std::size_t i = 0; i < mid; ++i)
          for (std::size_t j = 0; j < mid; ++j)
            k(static_cast<Eigen::Index>((l * mid + i) * right + r), static_cast<Eigen::Index>((l * mid + j) * right + r)) =
                p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops), in, in);
}

inline KrausChannel make_dephase_local(const SubsystemLayout& in, const std::string& label) {
  return make_dephase_local(in, label, computational_basis(in.at(label).dim));
}

/// Moves a (dephased) subsystem to another lab. Matrix entries are untouched;
/// only the party tag changes.
inline KrausChannel make_send_dephased(const SubsystemLayout& in, const std::string& label, Party to) {
  detail::require(to == Party::Alice || to == Party::Bob, "send: destination must be party A or B");
  const auto d = static_cast<Eigen::Index>(in.total_dim());
  return KrausChannel({Matrix::Identity(d, d)}, in, in.with_party(label, to));
}

// ---------------------------------------------------------------------------
// Protocols

struct LocalUnitary {
  std::vector<std::string> labels;
  Matrix unitary;
};
struct AddMaxMixed {
  std::size_t dim = 1;
  Party party = Party::Alice;
  std::string label;
};
struct Discard {
  std::string label;
};
/// Empty basis means the computational basis.
struct DephaseLocal {
  std::string label;
  Basis basis;
};
/// `basis` is the basis the subsystem must already be dephased in (empty: computational).
struct SendDephased {
  std::string label;
  Party to = Party::Bob;
  Basis basis;
};

using ProtocolStep = std::variant<LocalUnitary, AddMaxMixed, Discard, DephaseLocal, SendDephased>;

inline std::string kind_name(const ProtocolStep& step) {
  static constexpr const char* names[] = {"LocalUnitary", "AddMaxMixed", "Discard", "DephaseLocal",
                                          "SendDephased"};
  return names[step.index()];
}

struct Protocol {
  SubsystemLayout initial;
  std::vector<ProtocolStep> steps;
};

namespace detail {

inline Basis basis_or_computational(const Basis& b, std::size_t dim) {
  return b.empty() ? computational_basis(dim) : b;
}

}  // namespace detail

/// Channel realizing one protocol step on the given input layout.
inline KrausChannel step_channel(const SubsystemLayout& in, const ProtocolStep& step) {
  return std::visit(
      [&](const auto& s) -> KrausChannel {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LocalUnitary>) {
          return make_local_unitary(in, s.labels, s.unitary);
        } else if constexpr (std::is_same_v<T, AddMaxMixed>) {
          return make_add_max_mixed(in, s.dim, s.party, s.label);
        } else if constexpr (std::is_same_v<T, Discard>) {
          return make_discard(in, s.label);
        } else if constexpr (std::is_same_v<T, DephaseLocal>) {
          return make_dephase_local(in, s.label, detail::basis_or_computational(s.basis, in.at(s.label).dim));
        } else {
          return make_send_dephased(in, s.label, s.to);
        }
      },
      step);
}

struct ComposeOptions {
  bool prune = true;  // drop Kraus operators with Frobenius norm <= 1e-12
  std::uint64_t probe_seed = 0x6e6c6f6363ULL;
};

/// Composite channel of a protocol. Layouts are threaded step by step, so a
/// step that names a missing subsystem or has the wrong size is rejected.
/// A SendDephased step is accepted only if dephasing the sent subsystem in the
/// declared basis leaves the protocol's current output invariant; this is
/// checked on the image of a generic full-rank input state.
inline KrausChannel compose(const Protocol& p, const ComposeOptions& opts = {}) {
  KrausChannel current = KrausChannel::identity(p.initial);
  std::optional<Matrix> probe_in;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& step = p.steps[i];
    const std::string where = "step " + std::to_string(i) + " (" + kind_name(step) + "): ";
    try {
      if (const auto* send = std::get_if<SendDephased>(&step)) {
        const auto& layout = current.out_layout();
        const Basis basis = detail::basis_or_computational(send->basis, layout.at(send->label).dim);
        if (!probe_in) {
          Rng rng(opts.probe_seed);
          probe_in = random_density(p.initial, rng).matrix();
        }
        const DenseOperator state(current.apply(*probe_in), layout);
        detail::require(max_abs(dephase(state, send->label, basis).matrix() - state.matrix()) <= tol::channel,
                        "subsystem '" + send->label + "' is not dephased in the declared basis before sending");
      }
      current = current.then(step_channel(current.out_layout(), step), opts.prune ? 1e-12 : -1.0);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  return current;
}

/// Throws ValidationError if the protocol cannot be composed.
inline void validate(const Protocol& p) { (void)compose(p); }

/// Output layout of a protocol.
inline SubsystemLayout output_layout(const Protocol& p) { return compose(p).out_layout(); }

/// POVM support: measurement ancillas enter as part of the initial state,
/// here rho (x) |0><0| on a new subsystem.
inline DensityMatrix with_pure_ancilla(const DensityMatrix& rho, std::size_t dim, Party party,
                                       const std::string& label) {
  const DenseOperator anc = projector(basis_vector(dim, 0), SubsystemLayout({Subsystem{label, dim, party}}));
  return DensityMatrix(tensor(rho.op(), anc));
}

}  // namespace nlocc
