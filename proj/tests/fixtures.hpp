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


// Shared test inputs: bundled example files and random NLOCC protocols.

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nlocc/io.hpp"
#include "nlocc/nlocc.hpp"

#ifndef NLOCC_DATA_DIR
#define NLOCC_DATA_DIR "data"
#endif

namespace fixtures {

inline std::string data_path(const std::string& rel) { return std::string(NLOCC_DATA_DIR) + "/" + rel; }

inline nlocc::DensityMatrix state(const std::string& name) {
  return nlocc::io::load_density(data_path("states/" + name + ".json"));
}

inline nlocc::Protocol protocol(const std::string& name) {
  return nlocc::io::load_protocol(data_path("protocols/" + name + ".json"));
}

/// Every bundled protocol, sorted by file name.
inline std::vector<std::pair<std::string, nlocc::Protocol>> bundled_protocols() {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(data_path("protocols")))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  std::vector<std::pair<std::string, nlocc::Protocol>> out;
  for (const auto& n : names) out.emplace_back(n, protocol(n));
  return out;
}

inline nlocc::Protocol two_qubit(std::vector<nlocc::ProtocolStep> steps = {}) {
  return {nlocc::SubsystemLayout::bipartite(2, 2), std::move(steps)};
}

/// Random valid protocol on one qubit pair: local unitaries on random subsets
/// of one party, ancillas of dimension 2 or 3, discards, dephasing in random
/// bases and dephase-then-send pairs. Total dimension stays below `max_dim`.
inline nlocc::Protocol random_protocol(nlocc::Rng& rng, std::size_t steps, std::size_t max_dim = 24) {
  using namespace nlocc;
  Protocol p = two_qubit();
  SubsystemLayout layout = p.initial;
  std::size_t anc = 0;
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto random_basis = [&](std::size_t d) {
    const Matrix u = random_unitary(d, rng);
    Basis b;
    for (std::size_t k = 0; k < d; ++k) b.push_back(u.col(static_cast<Eigen::Index>(k)));
    return b;
  };
  while (p.steps.size() < steps) {
    const std::size_t kind = pick(5);
    if (kind == 0) {
      const Party party = pick(2) ? Party::Alice : Party::Bob;
      std::vector<std::string> labels;
      std::size_t d = 1;
      for (const auto& s : layout)
        if (s.party == party && (labels.empty() || pick(2))) {
          labels.push_back(s.label);
          d *= s.dim;
        }
      if (labels.empty()) continue;
      p.steps.emplace_back(LocalUnitary{labels, random_unitary(d, rng)});
    } else if (kind == 1) {
      const std::size_t d = 2 + pick(2);
      if (layout.total_dim() * d > max_dim) continue;
      const Party party = pick(2) ? Party::Alice : Party::Bob;
      const std::string label = "r" + std::to_string(anc++);
      p.steps.emplace_back(AddMaxMixed{d, party, label});
    } else if (kind == 2) {
      if (layout.size() <= 1) continue;
      p.steps.emplace_back(Discard{layout[pick(layout.size())].label});
    } else if (kind == 3) {
      const auto& s = layout[pick(layout.size())];
      p.steps.emplace_back(DephaseLocal{s.label, random_basis(s.dim)});
    } else {
      const auto& s = layout[pick(layout.size())];
      const Basis b = random_basis(s.dim);
      const Party to = s.party == Party::Alice ? Party::Bob : Party::Alice;
      p.steps.emplace_back(DephaseLocal{s.label, b});
      p.steps.emplace_back(SendDephased{s.label, to, b});
    }
    layout = output_layout(p);
  }
  return p;
}

}  // namespace fixtures
