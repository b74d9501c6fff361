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
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "nlocc/dense_operator.hpp"
#include "nlocc/parallel.hpp"
#include "nlocc/random.hpp"

namespace nlocc {

// ---------------------------------------------------------------------------
// Bipartite structure

struct BipartiteForm {
  Matrix matrix;  // Alice subsystems first, then Bob, each in layout order
  std::size_t dim_a = 1;
  std::size_t dim_b = 1;
};

/// Reorders an operator so that all of Alice's subsystems precede Bob's.
/// Every subsystem must belong to A or B and both parties must be present.
inline BipartiteForm bipartite_form(const DenseOperator& op) {
  const auto& layout = op.layout();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    detail::require(layout[i].party != Party::None,
                    "layout is not bipartite: subsystem '" + layout[i].label + "' has no party");
    if (layout[i].party == Party::Alice) order.push_back(i);
  }
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i].party == Party::Bob) order.push_back(i);
  detail::require(layout.has_party(Party::Alice) && layout.has_party(Party::Bob),
                  "layout is not bipartite: both parties A and B are required");
  return {permute_subsystems(op, order).matrix(), layout.party_dim(Party::Alice), layout.party_dim(Party::Bob)};
}

inline double min_partial_transpose_eigenvalue(const DenseOperator& rho) {
  const auto& layout = rho.layout();
  (void)bipartite_form(rho);  // validates the cut
  std::vector<std::size_t> bob;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i].party == Party::Bob) bob.push_back(i);
  const auto pt = partial_transpose(rho, bob);
  return eig_hermitian(pt.matrix()).values.minCoeff();
}

/// Positive-partial-transpose test across the Alice:Bob cut.
inline bool ppt_check(const DenseOperator& rho, double eps = 1e-9) {
  return min_partial_transpose_eigenvalue(rho) >= -eps;
}

inline bool ppt_check(const DensityMatrix& rho, double eps = 1e-9) { return ppt_check(rho.op(), eps); }

// ---------------------------------------------------------------------------
// Best product state: max <a (x) b| g |a (x) b>

namespace detail {

/// (<a| (x) I) g (|a> (x) I), a dB x dB matrix.
inline Matrix contract_alice(const Matrix& g, const Vector& a, std::size_t da, std::size_t db) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
  const auto B = static_cast<Eigen::Index>(db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const cplx w = std::conj(a(static_cast<Eigen::Index>(i))) * a(static_cast<Eigen::Index>(j));
      if (w == cplx{}) continue;
      m += w * g.block(static_cast<Eigen::Index>(i) * B, static_cast<Eigen::Index>(j) * B, B, B);
    }
  return m;
}

/// (I (x) <b|) g (I (x) |b>), a dA x dA matrix.
inline Matrix contract_bob(const Matrix& g, const Vector& b, std::size_t da, std::size_t db) {
  Matrix m(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(da));
  const auto B = static_cast<Eigen::Index>(db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (b.adjoint() * g.block(static_cast<Eigen::Index>(i) * B, static_cast<Eigen::Index>(j) * B, B, B) * b)(0, 0);
  return m;
}

inline Vector top_eigenvector(const Matrix& m) {
  if (m.rows() == 2) {
    // Closed form for qubits; picks the better-conditioned of the two
    // equivalent eigenvector expressions.
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const cplx b = (m(0, 1) + std::conj(m(1, 0))) / 2.0;
    const double lam = (a + d) / 2.0 + std::hypot((a - d) / 2.0, std::abs(b));
    Vector v(2);
    if (std::abs(b) == 0.0) {
      v << (a >= d ? 1.0 : 0.0), (a >= d ? 0.0 : 1.0);
      return v;
    }
    if (lam - d >= lam - a) v << lam - d, std::conj(b);
    else v << b, lam - a;
    return v / v.norm();
  }
  const Matrix sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  return solver.eigenvectors().col(sym.rows() - 1);
}

}  // namespace detail

inline Vector product_vector(const Vector& a, const Vector& b) {
  return kron(Matrix(a), Matrix(b)).col(0);
}

struct ProductState {
  Vector a;
  Vector b;
  double value = -std::numeric_limits<double>::infinity();
  std::size_t restart = 0;      // index of the winning restart
  std::vector<double> history;  // objective after each sweep of the winning run
};

/// One run of alternating maximization from `a0`: with a fixed, the best b is
/// the top eigenvector of (<a| (x) I) g (|a> (x) I), and vice versa.
inline ProductState alternating_ascent(const Matrix& g, std::size_t da, std::size_t db, Vector a0,
                                       std::size_t max_sweeps = 200, double stall = 1e-11) {
  ProductState s;
  s.a = a0 / a0.norm();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    s.b = detail::top_eigenvector(detail::contract_alice(g, s.a, da, db));
    s.a = detail::top_eigenvector(detail::contract_bob(g, s.b, da, db));
    const Vector ab = product_vector(s.a, s.b);
    const double v = (ab.adjoint() * g * ab)(0, 0).real();
    const bool done = !s.history.empty() && v - s.history.back() <= stall * std::max(1.0, std::abs(v));
    s.history.push_back(s.history.empty() ? v : std::max(v, s.history.back()));
    s.value = s.history.back();
    if (done) break;
  }
  return s;
}

/// Approximate maximizer of <a (x) b| g |a (x) b> over unit vectors, best of
/// `restarts` alternating runs from seeded random starting points plus one
/// run from each vector in `warm` (Alice factors).
inline ProductState best_product_state(const Matrix& g, std::size_t da, std::size_t db, std::size_t restarts,
                                       std::uint64_t seed, const std::vector<Vector>& warm = {}) {
  detail::require(static_cast<std::size_t>(g.rows()) == da * db && g.rows() == g.cols(),
                  "best_product_state: operator dimension is not dA*dB");
  detail::require(is_hermitian(g, 1e-8 * std::max(1.0, max_abs(g))), "best_product_state: operator is not Hermitian");
  restarts = std::max<std::size_t>(restarts, 1);
  std::vector<ProductState> runs(restarts + warm.size());
  detail::parallel_for(runs.size(), [&](std::size_t r) {
    if (r < restarts) {
      Rng rng = substream(seed, r);
      runs[r] = alternating_ascent(g, da, db, random_unit_vector(da, rng));
    } else {
      runs[r] = alternating_ascent(g, da, db, warm[r - restarts]);
    }
    runs[r].restart = r;
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].value > runs[best].value) best = r;
  return runs[best];
}

// ---------------------------------------------------------------------------
// Relative entropy of entanglement (inner approximation)

/// Mixture of pure product states sum_k w_k |a_k b_k><a_k b_k|.
struct SeparableEnsemble {
  struct Term {
    double weight = 0.0;
    Vector a;
    Vector b;
  };
  std::vector<Term> terms;

  /// Density matrix in Alice-first ordering.
  [[nodiscard]] Matrix matrix() const {
    detail::require(!terms.empty(), "empty separable ensemble");
    const auto d = terms.front().a.size() * terms.front().b.size();
    Matrix m = Matrix::Zero(d, d);
    for (const auto& t : terms) {
      const Vector v = product_vector(t.a, t.b);
      m += t.weight * v * v.adjoint();
    }
    return m;
  }

  void validate() const {
    double total = 0.0;
    for (const auto& t : terms) {
      detail::require(t.weight >= 0.0, "ensemble weight is negative");
      detail::require(std::abs(t.a.norm() - 1.0) <= 1e-10 && std::abs(t.b.norm() - 1.0) <= 1e-10,
                      "ensemble vectors must be unit vectors");
      total += t.weight;
    }
    detail::require(std::abs(total - 1.0) <= 1e-10, "ensemble weights do not sum to 1");
  }
};

struct ReeParams {
  std::size_t max_iters = 500;
  std::size_t restarts = 20;
  double tol = 1e-6;  // Frank-Wolfe gap
  std::uint64_t seed = 0;
  std::size_t corrective_steps = 50;  // weight rebalancing moves per iteration
  double regularization = 1e-9;
};

struct ReeResult {
  double value_bits = 0.0;  // S(rho || sigma*) for the returned sigma*, regularized
  SeparableEnsemble ensemble;
  std::vector<double> objective_history;  // S(rho || sigma_k), nonincreasing
  std::size_t restarts_used = 0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double final_gap = 0.0;
  double regularization = 0.0;
};

namespace detail {

class ReeObjective {
 public:
  ReeObjective(const Matrix& rho, double eta) : rho_(rho), eta_(eta), d_(static_cast<double>(rho.rows())) {}

  [[nodiscard]] Matrix regularized(const Matrix& sigma) const {
    Matrix s = (1.0 - eta_) * sigma;
    s.diagonal().array() += eta_ / d_;
    return (s + s.adjoint()) / 2.0;
  }

  /// -Tr rho log2 sigma_reg
  [[nodiscard]] double value(const Matrix& sigma) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(regularized(sigma));
    const Matrix rho_eig = es.eigenvectors().adjoint() * rho_ * es.eigenvectors();
    double f = 0.0;
    for (Eigen::Index k = 0; k < rho_eig.rows(); ++k)
      f -= rho_eig(k, k).real() * std::log2(std::max(es.eigenvalues()(k), std::numeric_limits<double>::min()));
    return f;
  }

  /// Gradient of -Tr rho log2 sigma_reg with respect to sigma, via the
  /// divided-difference form of the Frechet derivative of the logarithm.
  [[nodiscard]] Matrix gradient(const Matrix& sigma) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(regularized(sigma));
    const auto& lam = es.eigenvalues();
    const Matrix& u = es.eigenvectors();
    Matrix w = u.adjoint() * rho_ * u;
    const Eigen::Index n = lam.size();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double li = std::max(lam(i), std::numeric_limits<double>::min());
        const double lj = std::max(lam(j), std::numeric_limits<double>::min());
        const double dd = std::abs(li - lj) > 1e-12 * std::max(li, lj) ? (std::log(li) - std::log(lj)) / (li - lj)
                                                                       : 1.0 / li;
        w(i, j) *= dd;
      }
    Matrix g = -(1.0 - eta_) / std::log(2.0) * (u * w * u.adjoint());
    return (g + g.adjoint()) / 2.0;
  }

 private:
  const Matrix& rho_;
  double eta_;
  double d_;
};

/// argmin of a convex function on [0, hi]: Brent's method, with the
/// endpoints as extra candidates since the minimum may sit on the boundary.
template <typename F>
double line_minimum(F&& f, double hi, int bits) {
  std::uintmax_t max_iter = 200;
  auto [best, fbest] = boost::math::tools::brent_find_minima(f, 0.0, hi, bits, max_iter);
  for (double x : {0.0, hi}) {
    const double fx = f(x);
    if (fx < fbest) {
      best = x;
      fbest = fx;
    }
  }
  return best;
}

struct Atom {
  Vector a;
  Vector b;
  Vector ab;
  double weight;
};

inline Matrix atoms_matrix(const std::vector<Atom>& atoms, Eigen::Index d) {
  Matrix m = Matrix::Zero(d, d);
  for (const auto& t : atoms) m += t.weight * t.ab * t.ab.adjoint();
  return m;
}

/// Current iterate of the Frank-Wolfe loop: active atoms, their mixture and
/// the objective value there.
struct Iterate {
  std::vector<Atom> atoms;
  Matrix sigma;
  double f = 0.0;
};

/// Line-searches sigma + t * dir on [0, t_max]; `update(atoms, t)` applies the
/// step to the atom weights. Returns true and replaces `cur` only on a strict
/// decrease of the objective evaluated at the rebuilt mixture.
template <typename Update>
bool try_step(Iterate& cur, const ReeObjective& objective, const Matrix& dir, double t_max, Update&& update) {
  if (!(t_max > 0.0)) return false;
  const auto along = [&](double x) { return objective.value(Matrix(cur.sigma + x * dir)); };
  // A coarse search is usually enough; refine only if it is rejected.
  for (const int bits : {16, std::numeric_limits<double>::digits / 2}) {
    const double t = line_minimum(along, t_max, bits);
    if (!(t > 0.0)) continue;
    Iterate next{cur.atoms, {}, 0.0};
    update(next.atoms, t);
    next.atoms.erase(std::remove_if(next.atoms.begin(), next.atoms.end(), [](const Atom& x) { return x.weight <= 0.0; }),
                     next.atoms.end());
    double total = 0.0;
    for (const auto& x : next.atoms) total += x.weight;
    for (auto& x : next.atoms) x.weight /= total;
    next.sigma = atoms_matrix(next.atoms, cur.sigma.rows());
    next.f = objective.value(next.sigma);
    if (next.f < cur.f) {
      cur = std::move(next);
      return true;
    }
  }
  return false;
}

inline Matrix atom_projector(const Atom& x) { return x.ab * x.ab.adjoint(); }

/// Pairwise move of weight from atom `from` to atom `to`.
inline bool pairwise_step(Iterate& cur, const ReeObjective& objective, std::size_t from, std::size_t to) {
  const Matrix dir = atom_projector(cur.atoms[to]) - atom_projector(cur.atoms[from]);
  const double w = cur.atoms[from].weight;
  return try_step(cur, objective, dir, w, [&](std::vector<Atom>& atoms, double t) {
    atoms[from].weight = t >= w ? 0.0 : atoms[from].weight - t;
    atoms[to].weight += t;
  });
}

/// Index of the active atom with the largest gradient overlap (weight > 1e-10).
inline std::optional<std::size_t> worst_atom(const Iterate& cur, const Matrix& grad, double& value) {
  std::optional<std::size_t> out;
  value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cur.atoms.size(); ++k) {
    if (cur.atoms[k].weight <= 1e-10) continue;
    const double g = (cur.atoms[k].ab.adjoint() * grad * cur.atoms[k].ab)(0, 0).real();
    if (g > value) {
      value = g;
      out = k;
    }
  }
  return out;
}

}  // namespace detail

/// Upper bound on min over separable sigma of S(rho || sigma): Frank-Wolfe
/// over mixtures of pure product states, starting at I/D (the computational
/// product basis with equal weights). Each iteration calls best_product_state
/// on the negative gradient, takes a pairwise step from the worst active atom
/// to the new atom (plain Frank-Wolfe step as fallback), then rebalances the
/// weights of the active atoms with pairwise steps. Every step is an exact
/// line search accepted only on strict decrease, so the history is monotone.
inline ReeResult ree(const DensityMatrix& rho, const ReeParams& params = {}) {
  const auto form = bipartite_form(rho.op());
  const std::size_t da = form.dim_a, db = form.dim_b;
  const auto d = static_cast<Eigen::Index>(da * db);
  const double entropy = von_neumann_entropy(rho);
  const detail::ReeObjective objective(form.matrix, params.regularization);

  detail::Iterate cur;
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) {
      const Vector a = basis_vector(da, i), b = basis_vector(db, j);
      cur.atoms.push_back({a, b, product_vector(a, b), 1.0 / static_cast<double>(d)});
    }
  cur.sigma = detail::atoms_matrix(cur.atoms, d);
  cur.f = objective.value(cur.sigma);

  ReeResult out;
  out.seed = params.seed;
  out.restarts_used = std::max<std::size_t>(params.restarts, 1);
  out.regularization = params.regularization;
  out.objective_history.push_back(cur.f - entropy);
  std::optional<Vector> last_lmo_a;

  for (std::size_t it = 0; it < params.max_iters; ++it) {
    out.iterations = it;
    Matrix grad = objective.gradient(cur.sigma);
    const double g_sigma = hs_inner(grad, cur.sigma).real();
    // Cheap search warm-started from the heaviest atoms; a small gap is
    // confirmed with the full restart count before it is trusted.
    std::vector<Vector> warm;
    {
      std::vector<std::size_t> order(cur.atoms.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      const std::size_t k = std::min<std::size_t>(order.size(), 4);
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                        [&](std::size_t x, std::size_t y) { return cur.atoms[x].weight > cur.atoms[y].weight; });
      for (std::size_t i = 0; i < k; ++i) warm.push_back(cur.atoms[order[i]].a);
      if (last_lmo_a) warm.push_back(*last_lmo_a);
    }
    const Matrix neg = -grad;
    const std::uint64_t it_seed = substream(params.seed, it)();
    const std::size_t quick = std::max<std::size_t>(out.restarts_used / 5, 1);
    auto lmo = best_product_state(neg, da, db, quick, it_seed, warm);
    double fw_gap = g_sigma + lmo.value;
    if (fw_gap <= params.tol || it == 0) {
      lmo = best_product_state(neg, da, db, out.restarts_used, it_seed, warm);
      fw_gap = g_sigma + lmo.value;
    }
    out.final_gap = fw_gap;
    // Either bound certifies tol-optimality: the gap bounds f - f*, and the
    // value itself bounds it because the relative entropy is nonnegative.
    if (fw_gap <= params.tol || cur.f - entropy <= params.tol) {
      out.converged = true;
      break;
    }
    last_lmo_a = lmo.a;

    const Vector s = product_vector(lmo.a, lmo.b);
    std::size_t fresh = cur.atoms.size();
    for (std::size_t k = 0; k < cur.atoms.size(); ++k)
      if (std::norm(cur.atoms[k].ab.dot(s)) >= 1.0 - 1e-12) fresh = k;  // reuse a known atom
    if (fresh == cur.atoms.size()) cur.atoms.push_back({lmo.a, lmo.b, s, 0.0});
    double g_away = 0.0;
    bool moved = false;
    if (const auto away = detail::worst_atom(cur, grad, g_away); away && *away != fresh)
      moved = detail::pairwise_step(cur, objective, *away, fresh);
    if (!moved) {
      const Matrix dir = detail::atom_projector(cur.atoms[fresh]) - cur.sigma;
      moved = detail::try_step(cur, objective, dir, 1.0, [&](std::vector<detail::Atom>& atoms, double t) {
        for (auto& x : atoms) x.weight *= 1.0 - t;
        atoms[fresh].weight += t;
      });
    }
    if (!moved) break;  // no strict decrease in the Frank-Wolfe direction
    cur.atoms.erase(std::remove_if(cur.atoms.begin(), cur.atoms.end(), [](const detail::Atom& x) { return x.weight <= 0.0; }),
                    cur.atoms.end());

    for (std::size_t c = 0; c < params.corrective_steps; ++c) {
      grad = objective.gradient(cur.sigma);
      std::size_t toward = 0;
      double g_toward = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < cur.atoms.size(); ++k) {
        const double g = (cur.atoms[k].ab.adjoint() * grad * cur.atoms[k].ab)(0, 0).real();
        if (g < g_toward) {
          g_toward = g;
          toward = k;
        }
      }
      const auto away = detail::worst_atom(cur, grad, g_away);
      if (!away || *away == toward || g_away - g_toward <= params.tol) break;
      if (!detail::pairwise_step(cur, objective, *away, toward)) break;
    }
    out.objective_history.push_back(cur.f - entropy);
    out.iterations = it + 1;
  }

  for (const auto& t : cur.atoms) out.ensemble.terms.push_back({t.weight, t.a, t.b});
  // sigma* and its regularized version are both separable, so the smaller of
  // the two relative entropies is still an upper bound.
  const SubsystemLayout ab = SubsystemLayout::bipartite(da, db);
  const double exact = relative_entropy(DensityMatrix(form.matrix, ab), DensityMatrix(cur.sigma, ab));
  out.value_bits = std::max(0.0, std::min(out.objective_history.back(), exact));
  return out;
}

/// S(rho || sigma) for the state of a separable ensemble (Alice-first ordering).
inline double relative_entropy_to(const DensityMatrix& rho, const SeparableEnsemble& ens) {
  const auto form = bipartite_form(rho.op());
  const SubsystemLayout ab = SubsystemLayout::bipartite(form.dim_a, form.dim_b);
  Matrix s = ens.matrix();
  s = (s + s.adjoint()) / 2.0;
  return relative_entropy(DensityMatrix(form.matrix, ab), DensityMatrix(s, ab));
}

// ---------------------------------------------------------------------------
// Rate bound

/// Named rate values and the parameters that produced them.
struct RateReport {
  std::string quantity;
  double value_bits = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  std::vector<std::pair<std::string, double>> parameters;
  std::optional<ReeResult> ree;

  [[nodiscard]] double term(std::string_view name) const {
    for (const auto& [k, v] : terms)
      if (k == name) return v;
    detail::fail("rate report has no term '" + std::string(name) + "'");
  }
};

/// log2(dA dB) - S(rho) - REE(rho). The REE term comes from the inner
/// approximation, so the reported bound never exceeds the exact separable-set bound.
inline RateReport ubound_rate(const DensityMatrix& rho, const ReeParams& params = {}) {
  const auto form = bipartite_form(rho.op());
  RateReport rep;
  rep.quantity = "ubound";
  const double log_dim = std::log2(static_cast<double>(form.dim_a * form.dim_b));
  const double entropy = von_neumann_entropy(rho);
  auto r = ree(rho, params);
  rep.terms = {{"log_dim", log_dim}, {"entropy", entropy}, {"ree", r.value_bits}};
  rep.value_bits = log_dim - entropy - r.value_bits;
  rep.parameters = {{"max_iters", static_cast<double>(params.max_iters)},
                    {"restarts", static_cast<double>(params.restarts)},
                    {"tol", params.tol},
                    {"seed", static_cast<double>(params.seed)}};
  rep.ree = std::move(r);
  return rep;
}

}  // namespace nlocc
