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
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "nlocc/dense_operator.hpp"

namespace nlocc {

/// Exact subspace dimensions (d^n overflows 64 bits quickly).
using Count = boost::multiprecision::cpp_int;
/// Eigenvalue products of rho^{(x)n} underflow doubles long before n = 500.
using Real = boost::multiprecision::cpp_bin_float_50;

inline double log2_of(const Real& x) {
  using boost::multiprecision::log;
  return static_cast<double>(log(x) / log(Real(2)));
}
inline double log2_of(const Count& x) { return log2_of(Real(x)); }

namespace detail {

inline void check_epsilon(double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie strictly between 0 and 1");
}

inline void check_distribution(const std::vector<double>& p, const std::string& name) {
  require(!p.empty(), name + " is empty");
  double total = 0.0;
  for (double x : p) {
    require(x >= -tol::density, name + " has a negative entry");
    total += x;
  }
  require(std::abs(total - 1.0) <= tol::density, name + " does not sum to 1 within 1e-10");
}

inline bool nearly_equal(const Real& a, const Real& b) {
  if (a == b) return true;
  const Real scale = std::max(abs(a), abs(b));
  return abs(a - b) <= scale * Real(1e-12);
}

/// Calls visit(counts) for every vector of k non-negative integers summing to n.
inline void for_each_composition(std::size_t n, std::size_t k,
                                 const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> c(k, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == k) {
      c[pos] = left;
      visit(c);
      return;
    }
    for (std::size_t x = 0; x <= left; ++x) {
      c[pos] = x;
      rec(pos + 1, left - x);
    }
  };
  if (k == 0) return;
  rec(0, n);
}

inline Count binomial(std::size_t n, std::size_t k) {
  Count r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline Count multinomial(const std::vector<std::size_t>& counts) {
  Count r = 1;
  std::size_t total = 0;
  for (std::size_t c : counts) {
    total += c;
    r *= binomial(total, c);
  }
  return r;
}

inline double composition_count(std::size_t n, std::size_t k) {
  return std::exp(std::lgamma(static_cast<double>(n + k)) - std::lgamma(static_cast<double>(n + 1)) -
                  std::lgamma(static_cast<double>(k)));
}

/// Distinct values (merged within relative 1e-12) with their multiplicities.
struct Level {
  double value;
  std::size_t multiplicity;
};

inline std::vector<Level> group_levels(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  std::vector<Level> out;
  for (double v : values) {
    v = std::max(v, 0.0);
    if (!out.empty() && std::abs(out.back().value - v) <= 1e-12 * std::max(out.back().value, v)) {
      ++out.back().multiplicity;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

}  // namespace detail

/// Spectrum of rho^{(x)n}, represented by the spectrum of rho and n.
class SpectrumPower {
 public:
  /// A set of product eigenvectors sharing one eigenvalue.
  struct Stratum {
    Real value;   // eigenvalue of rho^{(x)n}
    Count count;  // number of eigenvectors with that eigenvalue
  };

  SpectrumPower(std::vector<double> base_eigenvalues, std::size_t n) : base_(std::move(base_eigenvalues)), n_(n) {
    detail::check_distribution(base_, "spectrum");
    detail::require(n_ >= 1, "number of copies must be >= 1");
    for (double& x : base_) x = std::max(x, 0.0);
    std::sort(base_.begin(), base_.end(), std::greater<>());
  }

  [[nodiscard]] const std::vector<double>& base() const { return base_; }
  [[nodiscard]] std::size_t n() const { return n_; }

  /// Strata with nonzero eigenvalue, sorted by descending eigenvalue. Equal
  /// products arising from different multiplicity patterns are merged.
  [[nodiscard]] std::vector<Stratum> strata() const {
    const auto levels = detail::group_levels(base_);
    detail::require(detail::composition_count(n_, levels.size()) <= 5e6,
                    "too many multiplicity strata for this spectrum and n");
    std::vector<Stratum> raw;
    detail::for_each_composition(n_, levels.size(), [&](const std::vector<std::size_t>& c) {
      Real value = 1;
      Count count = detail::multinomial(c);
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == 0) continue;
        if (levels[j].value == 0.0) return;
        value *= pow(Real(levels[j].value), static_cast<int>(c[j]));
        count *= boost::multiprecision::pow(Count(levels[j].multiplicity), static_cast<unsigned>(c[j]));
      }
      raw.push_back({value, count});
    });
    std::sort(raw.begin(), raw.end(), [](const Stratum& a, const Stratum& b) { return a.value > b.value; });
    std::vector<Stratum> merged;
    for (auto& s : raw) {
      if (!merged.empty() && detail::nearly_equal(merged.back().value, s.value)) {
        merged.back().count += s.count;
      } else {
        merged.push_back(std::move(s));
      }
    }
    return merged;
  }

 private:
  std::vector<double> base_;
  std::size_t n_;
};

namespace detail {

struct GreedyFill {
  Count dim;      // eigenvectors taken, last stratum rounded up
  Real weight;    // fractional knapsack optimum
};

/// Takes product eigenvectors in descending order until their total weight
/// reaches 1 - epsilon.
inline GreedyFill greedy_fill(const SpectrumPower& sp, double epsilon) {
  check_epsilon(epsilon);
  const Real target = Real(1) - Real(epsilon);
  Real cum = 0;
  GreedyFill out{0, 0};
  for (const auto& s : sp.strata()) {
    const Real mass = s.value * Real(s.count);
    if (cum + mass >= target * (Real(1) - Real(1e-15))) {
      Real need = (target - cum) / s.value;
      if (need < 0) need = 0;
      Count whole = static_cast<Count>(ceil(need - Real(1e-9)));
      if (whole > s.count) whole = s.count;
      if (need > Real(s.count)) need = Real(s.count);
      out.dim += whole;
      out.weight += need;
      return out;
    }
    cum += mass;
    out.dim += s.count;
    out.weight += Real(s.count);
  }
  return out;  // only reachable through rounding in the spectrum's normalization
}

}  // namespace detail

/// Minimal dimension of a projector P with Tr(rho^{(x)n} P) >= 1 - epsilon.
inline Count typical_projector_dim(const SpectrumPower& sp, double epsilon) {
  return detail::greedy_fill(sp, epsilon).dim;
}

/// Minimal trace of 0 <= A <= I with Tr(rho^{(x)n} A) >= 1 - epsilon.
inline double min_trace_operator(const SpectrumPower& sp, double epsilon) {
  return static_cast<double>(detail::greedy_fill(sp, epsilon).weight);
}

struct CompressionResult {
  std::size_t n = 0;
  double epsilon = 0.0;
  Count projector_dim = 0;
  double rate_bits_per_copy = 0.0;  // (1/n) log2 dim P
  double purity_rate = 0.0;         // log2 d - rate
  double min_trace = 0.0;
  double min_trace_rate = 0.0;      // (1/n) log2 min trace
};

inline CompressionResult purity_rate(const SpectrumPower& sp, std::size_t d, double epsilon) {
  detail::require(d == sp.base().size(), "purity_rate: dimension does not match spectrum length");
  const auto fill = detail::greedy_fill(sp, epsilon);
  const double n = static_cast<double>(sp.n());
  CompressionResult r;
  r.n = sp.n();
  r.epsilon = epsilon;
  r.projector_dim = fill.dim;
  r.rate_bits_per_copy = log2_of(fill.dim) / n;
  r.purity_rate = std::log2(static_cast<double>(d)) - r.rate_bits_per_copy;
  r.min_trace = static_cast<double>(fill.weight);
  r.min_trace_rate = log2_of(fill.weight) / n;
  return r;
}

inline CompressionResult purity_rate(const DensityMatrix& rho, std::size_t n, double epsilon) {
  return purity_rate(SpectrumPower(rho.probabilities(), n), rho.dim(), epsilon);
}

struct MismatchResult {
  std::size_t n = 0;
  double epsilon = 0.0;
  Count dim = 0;                    // size of the union of q-type classes used
  double rate = 0.0;                // (1/n) log2 dim, +inf when capture is impossible
  bool infinite = false;
  double source_entropy = 0.0;      // S(p)
  double cross_entropy = 0.0;       // S(p) + D(p||q), +inf if supp p not in supp q
};

/// Compression of an i.i.d. source p with sets built for q: whole classes of
/// sequences with equal q-probability are taken in descending q-probability
/// until they capture p-mass >= 1 - epsilon.
inline MismatchResult mismatched_rate(const std::vector<double>& p, const std::vector<double>& q, std::size_t n,
                                      double epsilon) {
  detail::check_distribution(p, "p");
  detail::check_distribution(q, "q");
  detail::require(p.size() == q.size(), "p and q must have the same length");
  detail::require(n >= 1, "number of copies must be >= 1");
  detail::check_epsilon(epsilon);

  struct Group {
    double q;
    double p_mass = 0.0;
    std::size_t symbols = 0;
  };
  std::vector<Group> groups;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double qj = std::max(q[j], 0.0);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return std::abs(g.q - qj) <= 1e-12 * std::max(g.q, qj);
    });
    if (it == groups.end()) {
      groups.push_back({qj});
      it = groups.end() - 1;
    }
    it->p_mass += std::max(p[j], 0.0);
    ++it->symbols;
  }
  detail::require(detail::composition_count(n, groups.size()) <= 5e6, "too many type classes for this n");

  struct TypeClass {
    Real q_value;
    Real p_mass;
    Count size;
  };
  std::vector<TypeClass> classes;
  detail::for_each_composition(n, groups.size(), [&](const std::vector<std::size_t>& c) {
    TypeClass t{1, 1, detail::multinomial(c)};
    t.p_mass = Real(t.size);
    for (std::size_t g = 0; g < c.size(); ++g) {
      if (c[g] == 0) continue;
      t.q_value *= pow(Real(groups[g].q), static_cast<int>(c[g]));
      t.p_mass *= pow(Real(groups[g].p_mass), static_cast<int>(c[g]));
      t.size *= boost::multiprecision::pow(Count(groups[g].symbols), static_cast<unsigned>(c[g]));
    }
    classes.push_back(std::move(t));
  });
  std::sort(classes.begin(), classes.end(), [](const TypeClass& a, const TypeClass& b) { return a.q_value > b.q_value; });
  std::vector<TypeClass> merged;
  for (auto& t : classes) {
    if (!merged.empty() && detail::nearly_equal(merged.back().q_value, t.q_value)) {
      merged.back().p_mass += t.p_mass;
      merged.back().size += t.size;
    } else {
      merged.push_back(std::move(t));
    }
  }

  MismatchResult r;
  r.n = n;
  r.epsilon = epsilon;
  r.source_entropy = entropy_bits(p);
  double cross = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    if (q[j] <= 0.0) {
      cross = std::numeric_limits<double>::infinity();
      break;
    }
    cross -= p[j] * std::log2(q[j]);
  }
  r.cross_entropy = cross;

  const Real target = (Real(1) - Real(epsilon)) * (Real(1) - Real(1e-15));
  Real cum = 0;
  for (const auto& t : merged) {
    if (t.q_value == 0) break;  // sequences outside supp q^n cannot be captured
    cum += t.p_mass;
    r.dim += t.size;
    if (cum >= target) {
      r.rate = log2_of(r.dim) / static_cast<double>(n);
      return r;
    }
  }
  r.infinite = true;
  r.rate = std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace nlocc
