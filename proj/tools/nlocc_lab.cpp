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


// nlocc_lab: command-line front end. One subcommand per experiment; all
// options are flags, results go to --out or stdout.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlocc/io.hpp"
#include "nlocc/nlocc.hpp"

namespace {

using nlocc::io::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string state;
  std::string protocol;
  std::vector<std::size_t> n{10};  // block lengths for compress and mismatch
  std::size_t copies = 1;          // input copies for protocol
  std::size_t m = 1;
  double epsilon = 0.01;
  std::optional<std::uint64_t> seed;
  std::size_t restarts = 20;
  double tol = 1e-6;
  std::size_t max_iters = 500;
  std::size_t trials = 1000;
  std::vector<double> p;
  std::vector<double> q;
  bool ensemble = false;
  std::string out;
  std::string format;
};

std::string number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw nlocc::ValidationError(cfg.out + ": cannot write file");
  f << text;
}

void emit(const RunConfig& cfg, const json& j) { emit(cfg, j.dump(2) + "\n"); }

std::string format_or(const RunConfig& cfg, const std::string& fallback) {
  return cfg.format.empty() ? fallback : cfg.format;
}

std::uint64_t require_seed(const RunConfig& cfg, const std::string& cmd) {
  if (!cfg.seed) throw nlocc::ValidationError(cmd + ": --seed is required");
  return *cfg.seed;
}

nlocc::DensityMatrix require_state(const RunConfig& cfg, const std::string& cmd) {
  if (cfg.state.empty()) throw nlocc::ValidationError(cmd + ": --state is required");
  return nlocc::io::load_density(cfg.state);
}

nlocc::Protocol require_protocol(const RunConfig& cfg, const std::string& cmd) {
  if (cfg.protocol.empty()) throw nlocc::ValidationError(cmd + ": --protocol is required");
  return nlocc::io::load_protocol(cfg.protocol);
}

nlocc::ReeParams ree_params(const RunConfig& cfg, const std::string& cmd) {
  nlocc::ReeParams params;
  params.seed = require_seed(cfg, cmd);
  params.restarts = cfg.restarts;
  params.tol = cfg.tol;
  params.max_iters = cfg.max_iters;
  return params;
}

int run_compress(const RunConfig& cfg) {
  std::vector<double> spectrum;
  std::size_t d = 0;
  if (!cfg.state.empty()) {
    const auto rho = nlocc::io::load_density(cfg.state);
    spectrum = rho.probabilities();
    d = rho.dim();
  } else if (!cfg.p.empty()) {
    spectrum = cfg.p;
    d = cfg.p.size();
  } else {
    throw nlocc::ValidationError("compress: --state or --p is required");
  }
  std::vector<nlocc::CompressionResult> rows;
  for (std::size_t n : cfg.n) rows.push_back(nlocc::purity_rate(nlocc::SpectrumPower(spectrum, n), d, cfg.epsilon));

  const std::string fmt = format_or(cfg, "csv");
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(nlocc::io::to_json(r));
    emit(cfg, arr);
    return 0;
  }
  std::ostringstream os;
  os << "n,epsilon,dim,rate,purity_rate,min_trace\n";
  for (const auto& r : rows)
    os << r.n << ',' << number(r.epsilon) << ',' << r.projector_dim << ',' << number(r.rate_bits_per_copy) << ','
       << number(r.purity_rate) << ',' << number(r.min_trace) << '\n';
  emit(cfg, os.str());
  return 0;
}

int run_mismatch(const RunConfig& cfg) {
  if (cfg.p.empty() || cfg.q.empty()) throw nlocc::ValidationError("mismatch: --p and --q are required");
  std::vector<nlocc::MismatchResult> rows;
  for (std::size_t n : cfg.n) rows.push_back(nlocc::mismatched_rate(cfg.p, cfg.q, n, cfg.epsilon));

  const std::string fmt = format_or(cfg, "csv");
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(nlocc::io::to_json(r));
    emit(cfg, arr);
    return 0;
  }
  std::ostringstream os;
  os << "n,epsilon,dim,rate,source_entropy,cross_entropy\n";
  for (const auto& r : rows) {
    os << r.n << ',' << number(r.epsilon) << ',';
    if (r.infinite) os << "inf"; else os << r.dim;
    os << ',' << (r.infinite ? std::string("inf") : number(r.rate)) << ',' << number(r.source_entropy) << ','
       << number(r.cross_entropy) << '\n';
  }
  emit(cfg, os.str());
  return 0;
}

int run_ree(const RunConfig& cfg) {
  const auto rho = require_state(cfg, "ree");
  const auto params = ree_params(cfg, "ree");
  const auto res = nlocc::ree(rho, params);
  emit(cfg, nlocc::io::to_json(res, nlocc::von_neumann_entropy(rho), cfg.ensemble));
  return 0;
}

int run_bound(const RunConfig& cfg) {
  const auto rho = require_state(cfg, "bound");
  const auto params = ree_params(cfg, "bound");
  emit(cfg, nlocc::io::to_json(nlocc::ubound_rate(rho, params), cfg.ensemble));
  return 0;
}

int run_dual_check(const RunConfig& cfg) {
  const auto protocol = require_protocol(cfg, "dual-check");
  const std::uint64_t seed = cfg.seed.value_or(0);
  const double tolerance = 1e-9;
  const auto channel = nlocc::compose(protocol);
  const auto dual = nlocc::adjoint(channel);
  const auto report = nlocc::verify_adjoint(channel, dual, cfg.trials, tolerance, seed);

  nlocc::Rng rng = nlocc::substream(seed, cfg.trials);
  const auto probe = nlocc::random_density(channel.out_layout(), rng);
  const double dual_trace = dual.apply(probe.op()).trace().real();
  const auto factor = dual.trace_factor();
  const auto gamma = nlocc::normalized_dual(channel);
  const auto d_out = static_cast<Eigen::Index>(channel.d_out());
  const double completeness = nlocc::max_abs(gamma.completeness() - nlocc::Matrix::Identity(d_out, d_out));

  json j = nlocc::io::to_json(report);
  j["steps"] = protocol.steps.size();
  j["d_in"] = channel.d_in();
  j["d_out"] = channel.d_out();
  j["trace_factor"] = factor.value();
  j["dual_trace"] = dual_trace;
  j["normalized_dual_tp_deviation"] = completeness;
  const bool pass = report.pass && std::abs(dual_trace - factor.value()) <= tolerance && completeness <= tolerance;
  j["pass"] = pass;
  emit(cfg, j);
  return pass ? 0 : kExitNumerical;
}

int run_protocol(const RunConfig& cfg) {
  const auto protocol = require_protocol(cfg, "protocol");
  const auto rho = require_state(cfg, "protocol");
  emit(cfg, nlocc::io::to_json(nlocc::audit_protocol(protocol, rho, cfg.copies, cfg.m)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlocc_lab: purity concentration and NLOCC channel experiments"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output file (default: stdout)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_ree = [&](CLI::App* sub) {
    sub->add_option("--state", cfg.state, "Bipartite density matrix JSON")->check(CLI::ExistingFile);
    sub->add_option("--seed", cfg.seed, "RNG seed (required)");
    sub->add_option("--restarts", cfg.restarts, "Product-state search restarts")->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "Frank-Wolfe gap tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", cfg.max_iters, "Iteration cap");
    sub->add_flag("--ensemble", cfg.ensemble, "Include the separable ensemble");
    add_common(sub);
  };

  auto* compress = app.add_subcommand("compress", "Typical-subspace dimension and purity rate");
  compress->add_option("--state", cfg.state, "Density matrix JSON")->check(CLI::ExistingFile);
  compress->add_option("--p", cfg.p, "Spectrum instead of a state file")->delimiter(',');
  compress->add_option("--n", cfg.n, "Block lengths, comma separated")->delimiter(',');
  compress->add_option("--epsilon", cfg.epsilon, "Allowed loss in (0,1)");
  add_common(compress);

  auto* mismatch = app.add_subcommand("mismatch", "Compression of p with projectors built for q");
  mismatch->add_option("--p", cfg.p, "Source distribution")->delimiter(',');
  mismatch->add_option("--q", cfg.q, "Model distribution")->delimiter(',');
  mismatch->add_option("--n", cfg.n, "Block lengths, comma separated")->delimiter(',');
  mismatch->add_option("--epsilon", cfg.epsilon, "Allowed loss in (0,1)");
  add_common(mismatch);

  auto* ree = app.add_subcommand("ree", "Separable relative entropy upper bound");
  add_ree(ree);
  auto* bound = app.add_subcommand("bound", "Rate ceiling log d - S - REE");
  add_ree(bound);

  auto* dual = app.add_subcommand("dual-check", "Adjoint identity and trace factor of a protocol");
  dual->add_option("--protocol", cfg.protocol, "Protocol JSON")->check(CLI::ExistingFile);
  dual->add_option("--trials", cfg.trials, "Random (A, B) pairs")->check(CLI::PositiveNumber);
  dual->add_option("--seed", cfg.seed, "RNG seed (default 0)");
  add_common(dual);

  auto* proto = app.add_subcommand("protocol", "Primal and dual fidelity audit");
  proto->add_option("--protocol", cfg.protocol, "Protocol JSON")->check(CLI::ExistingFile);
  proto->add_option("--state", cfg.state, "Two-party density matrix JSON")->check(CLI::ExistingFile);
  proto->add_option("--n", cfg.copies, "Input copies");
  proto->add_option("--m", cfg.m, "Output pairs");
  add_common(proto);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*compress) return run_compress(cfg);
    if (*mismatch) return run_mismatch(cfg);
    if (*ree) return run_ree(cfg);
    if (*bound) return run_bound(cfg);
    if (*dual) return run_dual_check(cfg);
    if (*proto) return run_protocol(cfg);
  } catch (const nlocc::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlocc::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitValidation;
}
