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
#include <limits>

#include <gtest/gtest.h>

#include "nlocc/nlocc.hpp"
#include "oracles.hpp"

using namespace nlocc;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

DensityMatrix bell() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return pure_state(v, SubsystemLayout::bipartite(2, 2));
}

}  // namespace

TEST(Layout, RejectsDuplicateAndEmptyLabels) {
  EXPECT_THROW(SubsystemLayout({{"A", 2, Party::Alice}, {"A", 2, Party::Bob}}), ValidationError);
  EXPECT_THROW(SubsystemLayout({{"", 2, Party::Alice}}), ValidationError);
  EXPECT_THROW(SubsystemLayout({{"A", 0, Party::Alice}}), ValidationError);
}

TEST(Layout, StridesFollowRowMajorOrder) {
  SubsystemLayout l({{"x", 2, Party::Alice}, {"y", 3, Party::Bob}, {"z", 5, Party::None}});
  EXPECT_EQ(l.total_dim(), 30u);
  EXPECT_EQ(l.stride(0), 15u);
  EXPECT_EQ(l.stride(2), 1u);
  EXPECT_EQ(l.party_dim(Party::Bob), 3u);
  EXPECT_EQ(l.without("y").dims(), (std::vector<std::size_t>{2, 5}));
  EXPECT_THROW((void)l.index_of("w"), ValidationError);
}

TEST(Layout, ConcatPrimesCollidingLabels) {
  const auto l = concat(SubsystemLayout::bipartite(2, 2), SubsystemLayout::bipartite(2, 2));
  EXPECT_EQ(l.size(), 4u);
  EXPECT_TRUE(l.contains("A'"));
  EXPECT_TRUE(l.contains("B'"));
}

TEST(Tensor, IdentityTimesIdentity) {
  const auto i2 = identity(SubsystemLayout::single(2, "x"));
  const auto i4 = tensor(i2, i2);
  EXPECT_LE(max_abs(i4.matrix() - Matrix::Identity(4, 4)), 0.0);
  EXPECT_EQ(i4.layout().size(), 2u);
}

TEST(Tensor, LeftFactorIsMostSignificant) {
  const DenseOperator a(diag2(1, 0), SubsystemLayout::single(2, "x"));
  const DenseOperator b(diag2(0, 1), SubsystemLayout::single(2, "y"));
  Matrix expected = Matrix::Zero(4, 4);
  expected(1, 1) = 1.0;
  EXPECT_LE(max_abs(tensor(a, b).matrix() - expected), 0.0);
}

TEST(Tensor, TraceIsMultiplicative) {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_density(SubsystemLayout::single(3), rng);
    EXPECT_NEAR(tensor(rho, rho).op().trace().real(), 1.0, 1e-12);
  }
}

TEST(PartialTrace, OfProductRecoversFactor) {
  Rng rng(3);
  const auto rho = random_density(SubsystemLayout::single(2, "x"), rng);
  const auto tau = random_density(SubsystemLayout::single(3, "y"), rng);
  const auto r = partial_trace(tensor(rho, tau), "y");
  EXPECT_LE(max_abs(r.matrix() - rho.matrix()), 1e-12);
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  const auto r = partial_trace(bell(), "B");
  EXPECT_LE(max_abs(r.matrix() - Matrix::Identity(2, 2) / 2.0), 1e-12);
}

TEST(PartialTrace, DimensionOneSubsystemOnlyShrinksLayout) {
  Rng rng(5);
  const auto rho = random_density(SubsystemLayout::single(3, "x"), rng);
  const DenseOperator one(Matrix::Ones(1, 1), SubsystemLayout::single(1, "t"));
  const auto r = partial_trace(tensor(rho.op(), one), "t");
  EXPECT_LE(max_abs(r.matrix() - rho.matrix()), 0.0);
  EXPECT_EQ(r.layout().size(), 1u);
}

TEST(PartialTrace, MatchesLoopOracleAndIsLinear) {
  Rng rng(7);
  const auto layout = SubsystemLayout::bipartite(3, 2);
  for (int t = 0; t < 20; ++t) {
    const DenseOperator x(random_ginibre(6, 6, rng), layout);
    const DenseOperator y(random_ginibre(6, 6, rng), layout);
    EXPECT_LE(max_abs(partial_trace(x, "B").matrix() - oracle::trace_out_second(x.matrix(), 3, 2)), 1e-12);
    EXPECT_LE(max_abs(partial_trace(x, "A").matrix() - oracle::trace_out_first(x.matrix(), 3, 2)), 1e-12);
    const DenseOperator sum(x.matrix() + 2.0 * y.matrix(), layout);
    EXPECT_LE(max_abs(partial_trace(sum, "A").matrix() -
                      (partial_trace(x, "A").matrix() + 2.0 * partial_trace(y, "A").matrix())),
              1e-10);
    EXPECT_NEAR(std::abs(partial_trace(x, "B").trace() - x.trace()), 0.0, 1e-10);
  }
  EXPECT_THROW((void)partial_trace(DenseOperator(Matrix::Identity(6, 6), layout), "C"), ValidationError);
}

TEST(PartialTranspose, BellHasNegativeEigenvalue) {
  const auto pt = partial_transpose(bell().op(), {1});
  EXPECT_NEAR(eig_hermitian(pt).values.minCoeff(), -0.5, 1e-12);
}

TEST(Permute, SwapMatchesExplicitConjugation) {
  Rng rng(9);
  const auto rho = random_density(SubsystemLayout::bipartite(2, 3), rng);
  const auto swapped = permute_subsystems(rho.op(), {1, 0});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 3; ++l)
          EXPECT_EQ(swapped.matrix()(j * 2 + i, l * 2 + k), rho.matrix()(i * 3 + j, k * 3 + l));
  EXPECT_EQ(swapped.layout()[0].label, "B");
}

TEST(Dephase, KillsOffDiagonalOfQubit) {
  Matrix m(2, 2);
  m << 0.7, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.3;
  const DenseOperator a(m, SubsystemLayout::single(2, "x"));
  const auto d = dephase(a, "x");
  EXPECT_LE(max_abs(d.matrix() - diag2(0.7, 0.3)), 0.0);
  EXPECT_LE(max_abs(dephase(d, "x").matrix() - d.matrix()), 0.0);
}

TEST(Dephase, ArbitraryBasisIsIdempotentAndCommutes) {
  Rng rng(21);
  const auto layout = SubsystemLayout::bipartite(3, 2);
  const Matrix u = random_unitary(3, rng);
  Basis basis;
  for (int k = 0; k < 3; ++k) basis.push_back(u.col(k));
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_density(layout, rng);
    const auto d1 = dephase(rho.op(), "A", basis);
    EXPECT_NEAR(std::abs(d1.trace() - 1.0), 0.0, 1e-10);
    EXPECT_LE(max_abs(dephase(d1, "A", basis).matrix() - d1.matrix()), 1e-12);
    for (const auto& v : basis) {
      const Matrix p = kron(v * v.adjoint(), Matrix::Identity(2, 2));
      EXPECT_LE(max_abs(p * d1.matrix() - d1.matrix() * p), 1e-12);
    }
  }
}

TEST(Dephase, RejectsNonOrthonormalBasis) {
  Basis bad{Vector::Ones(2), basis_vector(2, 1)};
  const DenseOperator a(Matrix::Identity(2, 2), SubsystemLayout::single(2, "x"));
  EXPECT_THROW((void)dephase(a, "x", bad), ValidationError);
}

TEST(Eigen, DescendingOrderAndReconstruction) {
  EXPECT_NEAR(eig_hermitian(diag2(0.1, 0.9)).values(0), 0.9, 1e-15);
  Matrix half = Matrix::Constant(2, 2, 0.5);
  const auto e = eig_hermitian(half);
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 0.0, 1e-14);

  Rng rng(4);
  for (std::size_t d : {2u, 7u, 64u, 512u}) {
    const Matrix h = random_hermitian(d, rng);
    const auto eh = eig_hermitian(h);
    const Matrix rec = eh.vectors * eh.values.cast<cplx>().asDiagonal() * eh.vectors.adjoint();
    EXPECT_LE(max_abs(rec - h), 1e-9) << d;
    EXPECT_LE(max_abs(eh.vectors.adjoint() * eh.vectors - Matrix::Identity(d, d)), 1e-9);
    for (Eigen::Index i = 1; i < eh.values.size(); ++i) EXPECT_GE(eh.values(i - 1), eh.values(i));
  }
  Matrix nh = Matrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  EXPECT_THROW((void)eig_hermitian(nh), ValidationError);
}

TEST(Entropy, ClosedFormValues) {
  Vector z = basis_vector(2, 0);
  EXPECT_NEAR(von_neumann_entropy(pure_state(z, SubsystemLayout::single(2))), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(Matrix::Identity(2, 2) / 2.0, SubsystemLayout::single(2))), 1.0,
              1e-12);
  const double h = -0.9 * std::log2(0.9) - 0.1 * std::log2(0.1);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(diag2(0.9, 0.1), SubsystemLayout::single(2))), h, 1e-12);
  EXPECT_NEAR(h, 0.4690, 1e-3);
}

TEST(Entropy, BoundedByLogDimension) {
  Rng rng(12);
  for (std::size_t d : {2u, 3u, 4u, 9u}) {
    for (int t = 0; t < 10; ++t) {
      const auto rho = random_density(SubsystemLayout::single(d), rng);
      const double s = von_neumann_entropy(rho);
      EXPECT_GE(s, -1e-9);
      EXPECT_LE(s, std::log2(static_cast<double>(d)) + 1e-9);
      EXPECT_NEAR(s, oracle::entropy_of(rho.matrix()), 1e-9);
    }
  }
}

TEST(DensityMatrix, Validation) {
  EXPECT_THROW(DensityMatrix(diag2(0.6, 0.6), SubsystemLayout::single(2)), ValidationError);
  EXPECT_THROW(DensityMatrix(diag2(1.2, -0.2), SubsystemLayout::single(2)), ValidationError);
  EXPECT_THROW(DensityMatrix(Matrix::Identity(3, 3) / 3.0, SubsystemLayout::single(2)), ValidationError);
}

TEST(RelativeEntropy, ClosedFormValues) {
  Rng rng(8);
  const auto rho = random_density(SubsystemLayout::single(3), rng);
  EXPECT_NEAR(relative_entropy(rho, rho), 0.0, 1e-9);

  const auto psi = random_pure_state(SubsystemLayout::single(2), rng);
  const DensityMatrix mixed(Matrix::Identity(2, 2) / 2.0, SubsystemLayout::single(2));
  EXPECT_NEAR(relative_entropy(psi, mixed), 1.0, 1e-9);

  const auto zero = pure_state(basis_vector(2, 0), SubsystemLayout::single(2));
  const auto one = pure_state(basis_vector(2, 1), SubsystemLayout::single(2));
  EXPECT_EQ(relative_entropy(zero, one), std::numeric_limits<double>::infinity());
  EXPECT_THROW((void)relative_entropy(rho, mixed), ValidationError);
}

TEST(RelativeEntropy, KleinInequality) {
  Rng rng(15);
  for (int t = 0; t < 50; ++t) {
    const auto layout = SubsystemLayout::single(4);
    EXPECT_GE(relative_entropy(random_density(layout, rng), random_density(layout, rng)), -1e-9);
  }
}

TEST(HilbertSchmidt, BasicIdentities) {
  Rng rng(2);
  const auto rho = random_density(SubsystemLayout::single(3), rng);
  EXPECT_NEAR(std::abs(hs_inner(Matrix(Matrix::Identity(3, 3)), rho.matrix()) - 1.0), 0.0, 1e-12);
  const Matrix a = random_ginibre(3, 3, rng);
  const cplx aa = hs_inner(a, a);
  EXPECT_GT(aa.real(), 0.0);
  EXPECT_NEAR(aa.imag(), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(hs_inner(Matrix(diag2(1, 0)), Matrix(diag2(0, 1)))), 0.0, 0.0);
  EXPECT_THROW((void)hs_inner(Matrix(Matrix::Identity(2, 2)), Matrix(Matrix::Identity(3, 3))), ValidationError);
}

TEST(Random, SubstreamsAreReproducible) {
  Rng a = substream(42, 3), b = substream(42, 3), c = substream(42, 4);
  EXPECT_EQ(a(), b());
  EXPECT_NE(substream(42, 3)(), c());
  Rng r(1);
  const Matrix u = random_unitary(5, r);
  EXPECT_LE(max_abs(u.adjoint() * u - Matrix::Identity(5, 5)), 1e-12);
}
