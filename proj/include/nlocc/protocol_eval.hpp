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

#include "nlocc/dense_operator.hpp"
#include "nlocc/duality.hpp"
#include "nlocc/nlocc_maps.hpp"
#include "nlocc/separable.hpp"

namespace nlocc {

/// Largest total dimension evaluated densely end to end.
inline constexpr std::size_t kMaxDenseDim = 4096;

struct FidelityReport {
  std::size_t n = 0;
  std::size_t m = 0;
  double f_primal = 0.0;           // Tr[P_00^{(x)m} Lambda(rho^{(x)n})]
  double f_dual = 0.0;             // Tr[Pi rho^{(x)n}]
  double pi_trace = 0.0;
  double pi_trace_expected = 0.0;  // d_in / d_out of the composed channel
  bool ppt_pi = false;             // Pi / Tr Pi across the A:B cut
  double pi_min_pt_eigenvalue = 0.0;
  double rate_from_pi = 0.0;
};

namespace detail {

inline DensityMatrix source_state(const DensityMatrix& rho, std::size_t n) {
  require(n >= 1, "number of copies must be >= 1");
  double total = 1.0;
  for (std::size_t k = 0; k < n; ++k) total *= static_cast<double>(rho.dim());
  require(total <= static_cast<double>(kMaxDenseDim),
          "rho^(x)n has dimension " + std::to_string(static_cast<long long>(total)) + ", above the dense cap 4096");
  return tensor_power(rho, n);
}

inline void check_shapes(const KrausChannel& c, const DensityMatrix& source, std::size_t m) {
  require(c.d_in() == source.dim(), "protocol input dimension " + std::to_string(c.d_in()) +
                                        " does not match rho^(x)n dimension " + std::to_string(source.dim()));
  require(static_cast<std::size_t>(target_projector(m).rows()) == c.d_out(),
          "protocol output dimension " + std::to_string(c.d_out()) + " is not 4^m for m = " + std::to_string(m));
}

inline double rate_from_pi_bits(const DenseOperator& pi, const DensityMatrix& source, std::size_t n,
                                double log2_pair_dim) {
  require(pi.dim() == source.dim(), "rate_from_pi: Pi and rho^(x)n have different dimensions");
  const auto spectrum = eig_hermitian(pi.matrix()).values;
  require(spectrum.minCoeff() >= -1e-9 * std::max(1.0, spectrum.maxCoeff()),
          "rate_from_pi: Pi is not positive semidefinite");
  const double overlap = hs_inner(pi.matrix(), source.matrix()).real();
  if (!(overlap > 0.0))
    throw NumericalError("rate_from_pi: Tr[Pi rho^(x)n] = " + std::to_string(overlap) + " (degenerate protocol)");
  const double trace = pi.trace().real();
  return log2_pair_dim - std::log2(trace) / static_cast<double>(n);
}

}  // namespace detail

inline double fidelity_primal(const KrausChannel& composed, const DensityMatrix& rho, std::size_t n, std::size_t m) {
  const auto source = detail::source_state(rho, n);
  detail::check_shapes(composed, source, m);
  return composed.apply(source.matrix())(0, 0).real();
}

inline double fidelity_primal(const Protocol& p, const DensityMatrix& rho, std::size_t n, std::size_t m) {
  return fidelity_primal(compose(p), rho, n, m);
}

inline double fidelity_dual(const KrausChannel& composed, const DensityMatrix& rho, std::size_t n, std::size_t m) {
  const auto source = detail::source_state(rho, n);
  detail::check_shapes(composed, source, m);
  const auto pi = dual_image_operator(composed, m);
  return hs_inner(pi.matrix(), source.matrix()).real();
}

inline double fidelity_dual(const Protocol& p, const DensityMatrix& rho, std::size_t n, std::size_t m) {
  return fidelity_dual(compose(p), rho, n, m);
}

/// r = 2 log2 d - (1/n) log2 Tr Pi, in bits per input copy. Since
/// Tr Pi = d_in / d_out this is (1/n) log2 d_out = 2m/n for a protocol
/// ending in m qubit pairs. Rejects Pi with Tr[Pi rho^(x)n] <= 0.
inline double rate_from_pi(const DenseOperator& pi, const DensityMatrix& rho, std::size_t n, std::size_t d) {
  detail::require(d >= 1, "rate_from_pi: d must be >= 1");
  return detail::rate_from_pi_bits(pi, detail::source_state(rho, n), n, 2.0 * std::log2(static_cast<double>(d)));
}

inline FidelityReport audit_protocol(const Protocol& p, const DensityMatrix& rho, std::size_t n, std::size_t m) {
  const KrausChannel composed = compose(p);
  const auto source = detail::source_state(rho, n);
  detail::check_shapes(composed, source, m);

  FidelityReport rep;
  rep.n = n;
  rep.m = m;
  rep.f_primal = composed.apply(source.matrix())(0, 0).real();
  const DenseOperator pi = dual_image_operator(composed, m);
  rep.f_dual = hs_inner(pi.matrix(), source.matrix()).real();
  rep.pi_trace = pi.trace().real();
  rep.pi_trace_expected = static_cast<double>(composed.d_in()) / static_cast<double>(composed.d_out());
  rep.pi_min_pt_eigenvalue = min_partial_transpose_eigenvalue(pi.scaled(1.0 / rep.pi_trace));
  rep.ppt_pi = rep.pi_min_pt_eigenvalue >= -1e-9;
  rep.rate_from_pi = detail::rate_from_pi_bits(pi, source, n, std::log2(static_cast<double>(rho.dim())));
  return rep;
}

}  // namespace nlocc
