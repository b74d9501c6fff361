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
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "nlocc/error.hpp"

namespace nlocc {

enum class Party { Alice, Bob, None };

inline std::string to_string(Party p) {
  switch (p) {
    case Party::Alice: return "A";
    case Party::Bob: return "B";
    case Party::None: return "none";
  }
  return "none";
}

inline Party parse_party(std::string_view s) {
  if (s == "A" || s == "Alice" || s == "alice") return Party::Alice;
  if (s == "B" || s == "Bob" || s == "bob") return Party::Bob;
  if (s == "none" || s == "None" || s == "-") return Party::None;
  detail::fail("unknown party '" + std::string(s) + "' (expected A, B or none)");
}

struct Subsystem {
  std::string label;
  std::size_t dim = 1;
  Party party = Party::None;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Ordered tensor factorization of a Hilbert space. The leftmost subsystem is
/// the most significant index of the row-major Kronecker ordering.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;

  explicit SubsystemLayout(std::vector<Subsystem> subsystems)
      : subsystems_(std::move(subsystems)) {
    for (std::size_t i = 0; i < subsystems_.size(); ++i) {
      const auto& s = subsystems_[i];
      detail::require(s.dim >= 1, "subsystem '" + s.label + "' has dimension 0");
      detail::require(!s.label.empty(), "subsystem labels must be non-empty");
      for (std::size_t j = 0; j < i; ++j)
        detail::require(subsystems_[j].label != s.label,
                        "duplicate subsystem label '" + s.label + "'");
    }
  }

  /// Layout of a single unlabeled-party system of dimension `dim`.
  static SubsystemLayout single(std::size_t dim, std::string label = "S",
                                Party party = Party::None) {
    return SubsystemLayout({Subsystem{std::move(label), dim, party}});
  }

  /// Two-party layout "A" (Alice) x "B" (Bob).
  static SubsystemLayout bipartite(std::size_t dim_a, std::size_t dim_b) {
    return SubsystemLayout(
        {Subsystem{"A", dim_a, Party::Alice}, Subsystem{"B", dim_b, Party::Bob}});
  }

  [[nodiscard]] std::size_t size() const { return subsystems_.size(); }
  [[nodiscard]] bool empty() const { return subsystems_.empty(); }
  [[nodiscard]] const Subsystem& operator[](std::size_t i) const { return subsystems_[i]; }
  [[nodiscard]] const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  [[nodiscard]] auto begin() const { return subsystems_.begin(); }
  [[nodiscard]] auto end() const { return subsystems_.end(); }

  [[nodiscard]] std::size_t total_dim() const {
    return std::accumulate(subsystems_.begin(), subsystems_.end(), std::size_t{1},
                           [](std::size_t acc, const Subsystem& s) { return acc * s.dim; });
  }

  [[nodiscard]] std::vector<std::size_t> dims() const {
    std::vector<std::size_t> out;
    out.reserve(subsystems_.size());
    for (const auto& s : subsystems_) out.push_back(s.dim);
    return out;
  }

  [[nodiscard]] bool contains(std::string_view label) const {
    return std::any_of(subsystems_.begin(), subsystems_.end(),
                       [&](const Subsystem& s) { return s.label == label; });
  }

  [[nodiscard]] std::size_t index_of(std::string_view label) const {
    for (std::size_t i = 0; i < subsystems_.size(); ++i)
      if (subsystems_[i].label == label) return i;
    detail::fail("unknown subsystem label '" + std::string(label) + "'");
  }

  [[nodiscard]] const Subsystem& at(std::string_view label) const {
    return subsystems_[index_of(label)];
  }

  /// Product of the dimensions of all subsystems before / after position `i`.
  [[nodiscard]] std::size_t dim_before(std::size_t i) const {
    std::size_t d = 1;
    for (std::size_t k = 0; k < i; ++k) d *= subsystems_[k].dim;
    return d;
  }
  [[nodiscard]] std::size_t dim_after(std::size_t i) const {
    std::size_t d = 1;
    for (std::size_t k = i + 1; k < subsystems_.size(); ++k) d *= subsystems_[k].dim;
    return d;
  }

  /// Stride of subsystem `i` in the flattened index.
  [[nodiscard]] std::size_t stride(std::size_t i) const { return dim_after(i); }

  [[nodiscard]] std::size_t party_dim(Party p) const {
    std::size_t d = 1;
    for (const auto& s : subsystems_)
      if (s.party == p) d *= s.dim;
    return d;
  }

  [[nodiscard]] bool has_party(Party p) const {
    return std::any_of(subsystems_.begin(), subsystems_.end(),
                       [&](const Subsystem& s) { return s.party == p; });
  }

  [[nodiscard]] SubsystemLayout without(std::string_view label) const {
    auto copy = subsystems_;
    copy.erase(copy.begin() + static_cast<std::ptrdiff_t>(index_of(label)));
    return SubsystemLayout(std::move(copy));
  }

  [[nodiscard]] SubsystemLayout with_party(std::string_view label, Party p) const {
    auto copy = subsystems_;
    copy[index_of(label)].party = p;
    return SubsystemLayout(std::move(copy));
  }

  /// Appends a subsystem, priming its label until it is unique.
  [[nodiscard]] SubsystemLayout appended(Subsystem s) const {
    s.label = unique_label(s.label);
    auto copy = subsystems_;
    copy.push_back(std::move(s));
    return SubsystemLayout(std::move(copy));
  }

  [[nodiscard]] std::string unique_label(std::string label) const {
    while (contains(label)) label += '\'';
    return label;
  }

  friend bool operator==(const SubsystemLayout&, const SubsystemLayout&) = default;

 private:
  std::vector<Subsystem> subsystems_;
};

/// Concatenation used by the Kronecker product. Colliding labels on the right
/// operand are primed (A -> A' -> A'' ...).
inline SubsystemLayout concat(const SubsystemLayout& left, const SubsystemLayout& right) {
  SubsystemLayout out = left;
  for (const auto& s : right) out = out.appended(s);
  return out;
}

inline std::string describe(const SubsystemLayout& layout) {
  std::string out = "[";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i) out += ", ";
    out += layout[i].label + ":" + std::to_string(layout[i].dim) + "/" + to_string(layout[i].party);
  }
  return out + "]";
}

}  // namespace nlocc
