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
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlocc/compression.hpp"
#include "nlocc/dense_operator.hpp"
#include "nlocc/duality.hpp"
#include "nlocc/nlocc_maps.hpp"
#include "nlocc/protocol_eval.hpp"
#include "nlocc/separable.hpp"

namespace nlocc::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void fail_at(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

inline const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) fail_at(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail_at(where, "missing field '" + key + "'");
  return *it;
}

inline std::size_t positive_int(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 1) fail_at(where, "expected a positive integer");
  return v.get<std::size_t>();
}

inline std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail_at(where, "expected a string");
  return v.get<std::string>();
}

inline cplx complex_entry(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail_at(where, "expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline std::vector<cplx> complex_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail_at(where, "expected an array of [re, im] pairs");
  std::vector<cplx> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_entry(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Matrix square_matrix(const json& v, std::size_t d, const std::string& where) {
  const auto entries = complex_list(v, where);
  if (entries.size() != d * d)
    fail_at(where, "expected " + std::to_string(d * d) + " entries, found " + std::to_string(entries.size()));
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries[i * d + j];
  return m;
}

inline json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(complex_json(m(i, j)));
  return out;
}

inline Basis basis_from(const json& v, const std::string& where) {
  if (!v.is_array()) fail_at(where, "expected a list of vectors");
  Basis b;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto entries = complex_list(v[i], where + "[" + std::to_string(i) + "]");
    b.emplace_back(Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size())));
  }
  return b;
}

inline json basis_json(const Basis& b) {
  json out = json::array();
  for (const auto& v : b) {
    json vec = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) vec.push_back(complex_json(v(i)));
    out.push_back(std::move(vec));
  }
  return out;
}

inline Party party_from(const json& v, const std::string& where) {
  try {
    return parse_party(text(v, where));
  } catch (const ValidationError& e) {
    fail_at(where, e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Layouts and matrices

/// {"dims": [...], "parties": [...], "labels": [...]}; labels are optional and
/// default to the party letter (primed on repeats) or "S<k>" without a party.
inline SubsystemLayout layout_from_json(const json& j, const std::string& where = "$") {
  const json& dims = detail::field(j, "dims", where);
  if (!dims.is_array() || dims.empty()) detail::fail_at(where + ".dims", "expected a non-empty array");
  std::vector<Party> parties(dims.size(), Party::None);
  if (j.contains("parties")) {
    const json& p = j["parties"];
    if (!p.is_array() || p.size() != dims.size())
      detail::fail_at(where + ".parties", "expected one party per subsystem");
    for (std::size_t i = 0; i < p.size(); ++i) parties[i] = detail::party_from(p[i], where + ".parties[" + std::to_string(i) + "]");
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const json& l = j["labels"];
    if (!l.is_array() || l.size() != dims.size())
      detail::fail_at(where + ".labels", "expected one label per subsystem");
    for (std::size_t i = 0; i < l.size(); ++i) labels.push_back(detail::text(l[i], where + ".labels[" + std::to_string(i) + "]"));
  }
  SubsystemLayout layout;
  try {
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const std::size_t d = detail::positive_int(dims[i], where + ".dims[" + std::to_string(i) + "]");
      if (!labels.empty()) {
        nlocc::detail::require(!layout.contains(labels[i]), "duplicate subsystem label '" + labels[i] + "'");
        layout = layout.appended(Subsystem{labels[i], d, parties[i]});
      } else {
        const std::string base = parties[i] == Party::None ? "S" + std::to_string(i) : to_string(parties[i]);
        layout = layout.appended(Subsystem{base, d, parties[i]});
      }
    }
  } catch (const ValidationError& e) {
    if (std::string(e.what()).rfind(where, 0) == 0) throw;
    detail::fail_at(where, e.what());
  }
  return layout;
}

inline json layout_to_json(const SubsystemLayout& layout) {
  json dims = json::array(), parties = json::array(), labels = json::array();
  for (const auto& s : layout) {
    dims.push_back(s.dim);
    parties.push_back(to_string(s.party));
    labels.push_back(s.label);
  }
  return {{"dims", dims}, {"parties", parties}, {"labels", labels}};
}

/// {"dims": [...], "parties": [...], "matrix": [[re, im], ...]} row-major.
inline DenseOperator operator_from_json(const json& j, const std::string& where = "$") {
  const SubsystemLayout layout = layout_from_json(j, where);
  Matrix m = detail::square_matrix(detail::field(j, "matrix", where), layout.total_dim(), where + ".matrix");
  return DenseOperator(std::move(m), layout);
}

inline json operator_to_json(const DenseOperator& op) {
  json out = layout_to_json(op.layout());
  out["matrix"] = detail::matrix_json(op.matrix());
  return out;
}

inline DensityMatrix density_from_json(const json& j, const std::string& where = "$") {
  auto op = operator_from_json(j, where);
  try {
    return DensityMatrix(std::move(op));
  } catch (const ValidationError& e) {
    detail::fail_at(where, e.what());
  }
}

// ---------------------------------------------------------------------------
// Protocols
//
// {"layout": {...layout...},
//  "steps": [
//    {"kind": "LocalUnitary", "labels": ["A"], "matrix": [[re, im], ...]},
//    {"kind": "AddMaxMixed", "dim": 2, "party": "A", "label": "anc"},
//    {"kind": "Discard", "label": "anc"},
//    {"kind": "DephaseLocal", "label": "A", "basis": [[[re, im], ...], ...]},   // basis optional
//    {"kind": "SendDephased", "label": "A", "to": "B", "basis": [...]}          // basis optional
//  ]}

inline ProtocolStep step_from_json(const json& j, const std::string& where) {
  const std::string kind = detail::text(detail::field(j, "kind", where), where + ".kind");
  auto label = [&] { return detail::text(detail::field(j, "label", where), where + ".label"); };
  auto basis = [&] { return j.contains("basis") ? detail::basis_from(j["basis"], where + ".basis") : Basis{}; };
  if (kind == "LocalUnitary") {
    const json& ls = detail::field(j, "labels", where);
    if (!ls.is_array() || ls.empty()) detail::fail_at(where + ".labels", "expected a non-empty list of labels");
    LocalUnitary s;
    for (std::size_t i = 0; i < ls.size(); ++i) s.labels.push_back(detail::text(ls[i], where + ".labels[" + std::to_string(i) + "]"));
    const auto entries = detail::complex_list(detail::field(j, "matrix", where), where + ".matrix");
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(entries.size()))));
    if (d * d != entries.size()) detail::fail_at(where + ".matrix", "entry count is not a square");
    s.unitary = detail::square_matrix(j["matrix"], d, where + ".matrix");
    return s;
  }
  if (kind == "AddMaxMixed") {
    AddMaxMixed s;
    s.dim = detail::positive_int(detail::field(j, "dim", where), where + ".dim");
    s.party = detail::party_from(detail::field(j, "party", where), where + ".party");
    if (j.contains("label")) s.label = label();
    return s;
  }
  if (kind == "Discard") return Discard{label()};
  if (kind == "DephaseLocal") return DephaseLocal{label(), basis()};
  if (kind == "SendDephased")
    return SendDephased{label(), detail::party_from(detail::field(j, "to", where), where + ".to"), basis()};
  detail::fail_at(where + ".kind", "unknown step kind '" + kind + "'");
}

inline json step_to_json(const ProtocolStep& step) {
  json out{{"kind", kind_name(step)}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LocalUnitary>) {
          out["labels"] = s.labels;
          out["matrix"] = detail::matrix_json(s.unitary);
        } else if constexpr (std::is_same_v<T, AddMaxMixed>) {
          out["dim"] = s.dim;
          out["party"] = to_string(s.party);
          if (!s.label.empty()) out["label"] = s.label;
        } else if constexpr (std::is_same_v<T, Discard>) {
          out["label"] = s.label;
        } else if constexpr (std::is_same_v<T, DephaseLocal>) {
          out["label"] = s.label;
          if (!s.basis.empty()) out["basis"] = detail::basis_json(s.basis);
        } else {
          out["label"] = s.label;
          out["to"] = to_string(s.to);
          if (!s.basis.empty()) out["basis"] = detail::basis_json(s.basis);
        }
      },
      step);
  return out;
}

/// Parses and validates (composes) a protocol.
inline Protocol protocol_from_json(const json& j, const std::string& where = "$") {
  Protocol p;
  p.initial = layout_from_json(detail::field(j, "layout", where), where + ".layout");
  const json& steps = detail::field(j, "steps", where);
  if (!steps.is_array()) detail::fail_at(where + ".steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i)
    p.steps.push_back(step_from_json(steps[i], where + ".steps[" + std::to_string(i) + "]"));
  try {
    validate(p);
  } catch (const ValidationError& e) {
    detail::fail_at(where + ".steps", e.what());
  }
  return p;
}

inline json protocol_to_json(const Protocol& p) {
  json steps = json::array();
  for (const auto& s : p.steps) steps.push_back(step_to_json(s));
  return {{"layout", layout_to_json(p.initial)}, {"steps", steps}};
}

// ---------------------------------------------------------------------------
// Files

/// Parses a JSON file; syntax errors are reported as "<path>:<line>:<col>: ...".
inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string textual = buf.str();
  try {
    return json::parse(textual);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < textual.size(); ++i) {
      if (textual[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline DenseOperator load_operator(const std::string& path) { return operator_from_json(read_json_file(path), path); }
inline DensityMatrix load_density(const std::string& path) { return density_from_json(read_json_file(path), path); }
inline Protocol load_protocol(const std::string& path) { return protocol_from_json(read_json_file(path), path); }

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot write file");
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Reports

inline json count_json(const Count& c) {
  if (c <= Count(std::numeric_limits<std::uint64_t>::max())) return static_cast<std::uint64_t>(c);
  return c.str();
}

inline json to_json(const AdjointReport& r) {
  return {{"max_deviation", r.max_deviation}, {"trials", r.trials}, {"seed", r.seed}, {"pass", r.pass}};
}

inline json to_json(const FidelityReport& r) {
  return {{"n", r.n},
          {"m", r.m},
          {"f_primal", r.f_primal},
          {"f_dual", r.f_dual},
          {"pi_trace", r.pi_trace},
          {"pi_trace_expected", r.pi_trace_expected},
          {"ppt_pi", r.ppt_pi},
          {"pi_min_pt_eigenvalue", r.pi_min_pt_eigenvalue},
          {"rate_from_pi", r.rate_from_pi}};
}

inline json to_json(const CompressionResult& r) {
  return {{"n", r.n},
          {"epsilon", r.epsilon},
          {"dim", count_json(r.projector_dim)},
          {"rate", r.rate_bits_per_copy},
          {"purity_rate", r.purity_rate},
          {"min_trace", r.min_trace}};
}

inline json to_json(const MismatchResult& r) {
  json rate = r.infinite ? json("inf") : json(r.rate);
  json cross = std::isinf(r.cross_entropy) ? json("inf") : json(r.cross_entropy);
  return {{"n", r.n},
          {"epsilon", r.epsilon},
          {"dim", r.infinite ? json(nullptr) : count_json(r.dim)},
          {"rate", rate},
          {"infinite", r.infinite},
          {"source_entropy", r.source_entropy},
          {"cross_entropy", cross}};
}

inline json to_json(const SeparableEnsemble& e) {
  json terms = json::array();
  for (const auto& t : e.terms) {
    json a = json::array(), b = json::array();
    for (Eigen::Index i = 0; i < t.a.size(); ++i) a.push_back(detail::complex_json(t.a(i)));
    for (Eigen::Index i = 0; i < t.b.size(); ++i) b.push_back(detail::complex_json(t.b(i)));
    terms.push_back({{"weight", t.weight}, {"a", a}, {"b", b}});
  }
  return terms;
}

inline json to_json(const ReeResult& r, double entropy, bool with_ensemble) {
  json out{{"value_bits", r.value_bits},
           {"terms", {{"cross_entropy", r.value_bits + entropy}, {"entropy", entropy}}},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"final_gap", r.final_gap},
           {"restarts", r.restarts_used},
           {"regularization", r.regularization},
           {"seed", r.seed}};
  if (with_ensemble) out["ensemble"] = to_json(r.ensemble);
  return out;
}

inline json to_json(const RateReport& r, bool with_ensemble) {
  json terms = json::object();
  for (const auto& [k, v] : r.terms) terms[k] = v;
  json out{{"quantity", r.quantity}, {"value_bits", r.value_bits}, {"terms", terms}};
  for (const auto& [k, v] : r.parameters) {
    if (k == "seed") continue;
    // Counts are stored as doubles; print whole numbers as integers.
    if (v == std::floor(v) && std::abs(v) < 9.0e15) out["parameters"][k] = static_cast<long long>(v);
    else out["parameters"][k] = v;
  }
  if (r.ree) {
    out["iterations"] = r.ree->iterations;
    out["converged"] = r.ree->converged;
    out["seed"] = r.ree->seed;
    out["regularization"] = r.ree->regularization;
    if (with_ensemble) out["ensemble"] = to_json(r.ree->ensemble);
  }
  return out;
}

}  // namespace nlocc::io
