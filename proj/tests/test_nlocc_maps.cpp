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


#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "nlocc/nlocc.hpp"

using namespace nlocc;

namespace {

const SubsystemLayout kPair = SubsystemLayout::bipartite(2, 2);

Matrix pauli_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

double distance(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

}  // namespace

TEST(LocalUnitary, IdentityUnitaryIsIdentityChannel) {
  Rng rng(1);
  const auto c = make_local_unitary(kPair, {"A"}, Matrix::Identity(2, 2));
  const auto rho = random_density(kPair, rng);
  EXPECT_LE(distance(c.apply(rho.matrix()), rho.matrix()), 1e-14);
}

TEST(LocalUnitary, PauliXFlipsAliceBasisState) {
  const SubsystemLayout one({{"A", 2, Party::Alice}});
  const auto c = make_local_unitary(one, {"A"}, pauli_x());
  Matrix zero = Matrix::Zero(2, 2), flipped = Matrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  flipped(1, 1) = 1.0;
  EXPECT_LE(distance(c.apply(zero), flipped), 0.0);
}

TEST(LocalUnitary, RejectsCrossPartyAndNonUnitary) {
  Rng rng(2);
  EXPECT_THROW((void)make_local_unitary(kPair, {"A", "B"}, random_unitary(4, rng)), ValidationError);
  EXPECT_THROW((void)make_local_unitary(kPair, {"A"}, 2.0 * Matrix::Identity(2, 2)), ValidationError);
  EXPECT_THROW((void)make_local_unitary(kPair, {"A"}, random_unitary(3, rng)), ValidationError);
}

TEST(LocalUnitary, LabelOrderDefinesFactorOrder) {
  Rng rng(3);
  const SubsystemLayout l({{"a1", 2, Party::Alice}, {"b", 2, Party::Bob}, {"a2", 3, Party::Alice}});
  const Matrix u = random_unitary(6, rng);
  const auto c = make_local_unitary(l, {"a1", "a2"}, u);
  // Reference: move b last, apply u (x) I, move b back.
  const auto rho = random_density(l, rng);
  const auto moved = permute_subsystems(rho.op(), {0, 2, 1});
  const Matrix big = kron(u, Matrix::Identity(2, 2));
  const DenseOperator evolved(big * moved.matrix() * big.adjoint(), moved.layout());
  const auto back = permute_subsystems(evolved, {0, 2, 1});
  EXPECT_LE(distance(c.apply(rho.matrix()), back.matrix()), 1e-12);
}

TEST(AddMaxMixed, TrivialAncillaIsIdentity) {
  Rng rng(4);
  const auto c = make_add_max_mixed(kPair, 1, Party::Alice);
  const auto rho = random_density(kPair, rng);
  EXPECT_LE(distance(c.apply(rho.matrix()), rho.matrix()), 1e-15);
}

TEST(AddMaxMixed, MaximallyMixedIsFixedPoint) {
  const SubsystemLayout one({{"A", 2, Party::Alice}});
  const auto c = make_add_max_mixed(one, 2, Party::Bob, "B");
  EXPECT_LE(distance(c.apply(Matrix(Matrix::Identity(2, 2) / 2.0)), Matrix::Identity(4, 4) / 4.0), 1e-15);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.d_out(), 4u);
  EXPECT_TRUE(c.is_trace_preserving());
  EXPECT_EQ(c.out_layout().at("B").party, Party::Bob);
}

TEST(Discard, ProductStateLeavesOtherFactor) {
  Rng rng(5);
  const auto a = random_density(SubsystemLayout({{"A", 2, Party::Alice}}), rng);
  const auto b = random_density(SubsystemLayout({{"B", 3, Party::Bob}}), rng);
  const auto c = make_discard(concat(a.layout(), b.layout()), "B");
  EXPECT_LE(distance(c.apply(tensor(a, b).matrix()), a.matrix()), 1e-12);
  EXPECT_TRUE(c.is_trace_preserving());
  EXPECT_THROW((void)make_discard(kPair, "C"), ValidationError);
}

TEST(Discard, ThenAddMaxMixedReplacesSubsystem) {
  Rng rng(6);
  const SubsystemLayout l({{"A1", 2, Party::Alice}, {"A2", 2, Party::Alice}, {"B", 2, Party::Bob}});
  const auto rho = random_density(l, rng);
  const auto c = make_discard(l, "A2").then(make_add_max_mixed(l.without("A2"), 2, Party::Alice, "A2"));
  const auto reduced = partial_trace(rho.op(), "A2");
  const Matrix expected = kron(reduced.matrix(), Matrix::Identity(2, 2) / 2.0);
  EXPECT_LE(distance(c.apply(rho.matrix()), expected), 1e-12);
}

TEST(Discard, DimensionOneSubsystemIsIdentity) {
  Rng rng(7);
  const SubsystemLayout l({{"A", 2, Party::Alice}, {"t", 1, Party::Alice}, {"B", 2, Party::Bob}});
  const auto rho = random_density(l, rng);
  EXPECT_LE(distance(make_discard(l, "t").apply(rho.matrix()), rho.matrix()), 0.0);
}

TEST(DephaseLocal, MatchesPinchingAndIsClassicalOnTheLabel) {
  Rng rng(8);
  const auto rho = random_density(kPair, rng);
  const auto c = make_dephase_local(kPair, "A");
  const Matrix out = c.apply(rho.matrix());
  EXPECT_LE(distance(out, dephase(rho.op(), "A").matrix()), 1e-14);
  // Block form sum_i |i><i| (x) rho_i: no coherence between different i.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (i != j)
        for (int b1 = 0; b1 < 2; ++b1)
          for (int b2 = 0; b2 < 2; ++b2) EXPECT_EQ(out(i * 2 + b1, j * 2 + b2), cplx(0.0));
  EXPECT_LE(distance(c.apply(out), out), 1e-15);
  EXPECT_TRUE(c.is_trace_preserving());
  EXPECT_THROW((void)make_dephase_local(kPair, "A", Basis{Vector::Ones(2), Vector::Ones(2)}), ValidationError);
}

TEST(SendDephased, OnlyTheOwnerChanges) {
  Rng rng(9);
  const auto c = make_send_dephased(kPair, "A", Party::Bob);
  const auto rho = random_density(kPair, rng);
  EXPECT_LE(distance(c.apply(rho.matrix()), rho.matrix()), 0.0);
  EXPECT_EQ(c.out_layout().at("A").party, Party::Bob);
  EXPECT_THROW((void)make_send_dephased(kPair, "A", Party::None), ValidationError);
  EXPECT_THROW((void)make_send_dephased(kPair, "Z", Party::Bob), ValidationError);
}

TEST(SendDephased, SendAndReturnIsIdentityOnDephasedInput) {
  Rng rng(10);
  const auto p = fixtures::two_qubit({DephaseLocal{"A", {}}, SendDephased{"A", Party::Bob, {}},
                                      SendDephased{"A", Party::Alice, {}}});
  const auto q = fixtures::two_qubit({DephaseLocal{"A", {}}});
  const auto rho = random_density(kPair, rng);
  EXPECT_LE(distance(compose(p).apply(rho.matrix()), compose(q).apply(rho.matrix())), 1e-14);
  EXPECT_EQ(compose(p).out_layout().at("A").party, Party::Alice);
}

TEST(SendDephased, EqualsDephasingChannel) {
  Rng rng(11);
  const auto rho = random_density(kPair, rng);
  const auto c = compose(fixtures::two_qubit({DephaseLocal{"A", {}}, SendDephased{"A", Party::Bob, {}}}));
  EXPECT_LE(distance(c.apply(rho.matrix()), dephase(rho.op(), "A").matrix()), 1e-14);
  // Further dephasing of the sent subsystem changes nothing.
  const DenseOperator out(c.apply(rho.matrix()), c.out_layout());
  EXPECT_LE(distance(dephase(out, "A").matrix(), out.matrix()), 1e-10);
}

TEST(SendDephased, RejectedWithoutPrecedingDephase) {
  const auto p = fixtures::two_qubit({SendDephased{"A", Party::Bob, {}}});
  try {
    validate(p);
    FAIL() << "send of a coherent subsystem was accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("step 0 (SendDephased)"), std::string::npos) << e.what();
  }
  Rng rng(12);
  const Matrix u = random_unitary(2, rng);
  const Basis rotated{u.col(0), u.col(1)};
  // Dephased in one basis, declared in another.
  EXPECT_THROW(validate(fixtures::two_qubit({DephaseLocal{"A", {}}, SendDephased{"A", Party::Bob, rotated}})),
               ValidationError);
  EXPECT_NO_THROW(validate(fixtures::two_qubit({DephaseLocal{"A", rotated}, SendDephased{"A", Party::Bob, rotated}})));
}

TEST(Compose, EmptyProtocolIsIdentity) {
  Rng rng(13);
  const auto c = compose(fixtures::two_qubit());
  const auto rho = random_density(kPair, rng);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_LE(distance(c.apply(rho.matrix()), rho.matrix()), 0.0);
}

TEST(Compose, DephaseIsIdempotent) {
  Rng rng(14);
  const auto once = compose(fixtures::two_qubit({DephaseLocal{"B", {}}}));
  const auto twice = compose(fixtures::two_qubit({DephaseLocal{"B", {}}, DephaseLocal{"B", {}}}));
  const auto rho = random_density(kPair, rng);
  EXPECT_LE(distance(once.apply(rho.matrix()), twice.apply(rho.matrix())), 1e-14);
}

TEST(Compose, UnprunedKrausCountIsProductOfStepCounts) {
  const auto p = fixtures::two_qubit({DephaseLocal{"A", {}}, AddMaxMixed{3, Party::Bob, "r"}, Discard{"B"}});
  const auto c = compose(p, ComposeOptions{.prune = false});
  EXPECT_EQ(c.size(), 2u * 3u * 2u);
  EXPECT_LE(compose(p).size(), c.size());
}

TEST(Compose, RejectsMissingLabelWithStepIndex) {
  try {
    validate(fixtures::two_qubit({DephaseLocal{"A", {}}, Discard{"A"}, DephaseLocal{"A", {}}}));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("step 2 (DephaseLocal)"), std::string::npos) << e.what();
  }
}

TEST(Compose, RandomProtocolsAreTracePreservingAndUnitalUpToScale) {
  Rng rng(15);
  for (int t = 0; t < 40; ++t) {
    const auto p = fixtures::random_protocol(rng, 1 + t % 5);
    const auto c = compose(p);
    EXPECT_TRUE(c.is_trace_preserving()) << t;
    EXPECT_TRUE(preserves_max_mixed(c)) << t;
  }
}

TEST(Compose, ConcatenationEqualsSequentialApplication) {
  Rng rng(16);
  for (int t = 0; t < 20; ++t) {
    const auto p1 = fixtures::random_protocol(rng, 2);
    auto p2 = fixtures::random_protocol(rng, 2);
    // Re-root p2 on p1's output by replaying its steps where they remain valid.
    Protocol joined = p1;
    for (const auto& s : p2.steps) {
      Protocol trial = joined;
      trial.steps.push_back(s);
      try {
        validate(trial);
        joined = trial;
      } catch (const ValidationError&) {
      }
    }
    Protocol tail{output_layout(p1), {joined.steps.begin() + static_cast<std::ptrdiff_t>(p1.steps.size()), joined.steps.end()}};
    const auto rho = random_density(kPair, rng);
    const Matrix whole = compose(joined).apply(rho.matrix());
    const Matrix staged = compose(tail).apply(compose(p1).apply(rho.matrix()));
    EXPECT_LE(distance(whole, staged), 1e-9) << t;
  }
}

TEST(PreservesMaxMixed, ElementaryMapsDoAndPreparationDoesNot) {
  Rng rng(17);
  EXPECT_TRUE(preserves_max_mixed(make_local_unitary(kPair, {"B"}, random_unitary(2, rng))));
  EXPECT_TRUE(preserves_max_mixed(make_add_max_mixed(kPair, 3, Party::Alice)));
  EXPECT_TRUE(preserves_max_mixed(make_discard(kPair, "A")));
  EXPECT_TRUE(preserves_max_mixed(make_dephase_local(kPair, "B")));
  EXPECT_TRUE(preserves_max_mixed(make_send_dephased(kPair, "B", Party::Alice)));

  const SubsystemLayout one({{"A", 2, Party::Alice}});
  Matrix v0 = Matrix::Zero(2, 2), v1 = Matrix::Zero(2, 2);
  v0(0, 0) = 1.0;
  v1(0, 1) = 1.0;
  const KrausChannel reset({v0, v1}, one, one);
  EXPECT_TRUE(reset.is_trace_preserving());
  EXPECT_FALSE(preserves_max_mixed(reset));
}

TEST(Ancilla, PureAncillaForMeasurements) {
  Rng rng(18);
  const auto rho = random_density(kPair, rng);
  const auto ext = with_pure_ancilla(rho, 3, Party::Alice, "m");
  EXPECT_EQ(ext.dim(), 12u);
  EXPECT_LE(distance(partial_trace(ext, "m").matrix(), rho.matrix()), 1e-15);
  EXPECT_NEAR(von_neumann_entropy(ext), von_neumann_entropy(rho), 1e-9);
}
