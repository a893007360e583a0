#include <random>

#include <gtest/gtest.h>

#include "mvcp/error.hpp"
#include "mvcp/tensor.hpp"
#include "support/oracles.hpp"

using namespace mvcp;

namespace {

DenseTensor3 random_tensor(Dims d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  DenseTensor3 t(d);
  for (double& v : t.values()) v = g(rng);
  return t;
}

}  // namespace

TEST(Unfold, ModeOneRowMatchesLayout) {
  DenseTensor3 t(Dims{2, 2, 2});
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) t(i, j, k) = double(i + 2 * j + 4 * k);
  const Matrix m = unfold(t, 1);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 4);
  EXPECT_EQ(m(0, 0), 0.0);
  EXPECT_EQ(m(0, 1), 2.0);
  EXPECT_EQ(m(0, 2), 4.0);
  EXPECT_EQ(m(0, 3), 6.0);
}

TEST(Unfold, RefoldRoundTripsBitExactly) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DenseTensor3 t = random_tensor(Dims{3 + seed, 4, 2 + seed % 2}, seed);
    for (int mode = 1; mode <= 3; ++mode) EXPECT_EQ(refold(unfold(t, mode), mode, t.dims()), t) << "mode " << mode;
  }
}

TEST(Unfold, ScalarTensor) {
  const DenseTensor3 t(Dims{1, 1, 1}, 7.5);
  for (int mode = 1; mode <= 3; ++mode) {
    const Matrix m = unfold(t, mode);
    ASSERT_EQ(m.size(), 1);
    EXPECT_EQ(m(0, 0), 7.5);
  }
}

TEST(Unfold, BadModeThrows) {
  const DenseTensor3 t(Dims{2, 2, 2});
  EXPECT_THROW(unfold(t, 0), InvalidArgument);
  EXPECT_THROW(unfold(t, 4), InvalidArgument);
}

TEST(KhatriRao, HandExpansion) {
  Matrix a(2, 1), b(2, 1);
  a << 1, 2;
  b << 3, 4;
  const Matrix kr = khatri_rao(a, b);
  ASSERT_EQ(kr.rows(), 4);
  EXPECT_EQ(kr(0, 0), 3.0);
  EXPECT_EQ(kr(1, 0), 4.0);
  EXPECT_EQ(kr(2, 0), 6.0);
  EXPECT_EQ(kr(3, 0), 8.0);
}

TEST(KhatriRao, OnesRowIsIdentityAndZerosStayZero) {
  Matrix a = Matrix::Random(3, 2);
  EXPECT_EQ(khatri_rao(a, Matrix::Ones(1, 2)), a);
  EXPECT_TRUE(khatri_rao(Matrix::Zero(3, 2), a).isZero(0.0));
}

TEST(KhatriRao, ColumnMismatchThrows) {
  EXPECT_THROW(khatri_rao(Matrix::Ones(2, 2), Matrix::Ones(2, 3)), DimensionError);
}

TEST(CpReconstruct, RankOneExamples) {
  Vector l(1);
  l << 1;
  const DenseTensor3 ones = cp_reconstruct(l, Matrix::Ones(1, 1), Matrix::Ones(2, 1));
  EXPECT_EQ(ones, DenseTensor3(Dims{2, 2, 1}, 1.0));

  l << 2;
  Matrix u(2, 1), a(2, 1);
  u << 1, 0;
  a << 1, 3;
  const DenseTensor3 t = cp_reconstruct(l, a, u);
  EXPECT_EQ(t(0, 0, 0), 2.0);
  EXPECT_EQ(t(0, 0, 1), 6.0);
  double rest = 0;
  for (double v : t.values()) rest += std::abs(v);
  EXPECT_EQ(rest, 8.0);
}

TEST(CpReconstruct, MatchesLoopOracleAndIsSymmetric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = oracle::planted(6, 3, 1 + seed % 4, seed);
    const DenseTensor3 t = cp_reconstruct(m.lambda, m.a, m.u);
    EXPECT_LT(oracle::sse(t, m.tensor), 1e-24);
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t i = 0; i < 6; ++i) ASSERT_EQ(t(i, j, k), t(j, i, k));
  }
}

TEST(CpReconstruct, DimensionMismatchThrows) {
  EXPECT_THROW(cp_reconstruct(Vector::Ones(2), Matrix::Ones(3, 1), Matrix::Ones(4, 2)), DimensionError);
}

TEST(CpReconstruct, ModeThreeUnfoldingIsKhatriRaoProduct) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = oracle::planted(5, 3, 3, 40 + seed);
    const Matrix lhs = unfold(cp_reconstruct(m.lambda, m.a, m.u), 3);
    const Matrix rhs = (m.a * m.lambda.asDiagonal()) * khatri_rao(m.u, m.u).transpose();
    EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-10);
  }
}

TEST(ModeProduct, MatchesTuckerOracle) {
  const DenseTensor3 core = random_tensor(Dims{2, 2, 2}, 3);
  const Matrix u = Matrix::Random(4, 2);
  const Matrix a = Matrix::Random(3, 2);
  const DenseTensor3 t = mode_product(mode_product(mode_product(core, u, 1), u, 2), a, 3);
  EXPECT_LT(oracle::sse(t, oracle::tucker(core, u, a)), 1e-24);
}

TEST(MaskedSse, Examples) {
  const DenseTensor3 ones(Dims{2, 2, 2}, 1.0), zeros(Dims{2, 2, 2}, 0.0);
  EXPECT_EQ(masked_sse(ones, ones), 0.0);
  EXPECT_EQ(masked_sse(ones, zeros), 8.0);
  MaskTensor m(Dims{2, 2, 2}, false);
  m.set(0, 0, 0, true);
  m.set(1, 0, 1, true);
  m.set(1, 1, 1, true);
  EXPECT_EQ(masked_sse(ones, zeros, m), 3.0);
  EXPECT_EQ(masked_sse(ones, ones, m), 0.0);
}

TEST(MaskedSse, MonotoneInObservedFlags) {
  const DenseTensor3 t = random_tensor(Dims{4, 4, 2}, 1), s = random_tensor(Dims{4, 4, 2}, 2);
  MaskTensor m(t.dims(), false);
  double prev = masked_sse(t, s, m);
  EXPECT_EQ(prev, 0.0);
  std::mt19937_64 rng(9);
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t off : order) {
    m.set(off % 4, (off / 4) % 4, off / 16, true);
    const double cur = masked_sse(t, s, m);
    EXPECT_GE(cur, prev);
    prev = cur;
  }
  EXPECT_DOUBLE_EQ(prev, masked_sse(t, s));
}

TEST(MaskedSse, DimsMismatchThrows) {
  EXPECT_THROW(masked_sse(DenseTensor3(Dims{2, 2, 2}), DenseTensor3(Dims{2, 2, 3})), DimensionError);
  EXPECT_THROW(masked_sse(DenseTensor3(Dims{2, 2, 2}), DenseTensor3(Dims{2, 2, 2}), MaskTensor(Dims{2, 2, 1})),
               DimensionError);
}

TEST(DenseTensor3, RejectsBadValues) {
  EXPECT_THROW(DenseTensor3(Dims{2, 2, 2}, std::vector<double>(7, 0.0)), DimensionError);
  std::vector<double> v(8, 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(DenseTensor3(Dims{2, 2, 2}, v), InvalidArgument);
}

TEST(MaskTensor, SymmetryAndComplement) {
  MaskTensor m(Dims{3, 3, 2});
  EXPECT_TRUE(m.symmetric_in_first_two_modes());
  m.set(0, 2, 1, false);
  EXPECT_FALSE(m.symmetric_in_first_two_modes());
  m.set(2, 0, 1, false);
  EXPECT_TRUE(m.symmetric_in_first_two_modes());
  EXPECT_EQ(m.count_hidden(), 2u);
  EXPECT_EQ(m.complement().count_observed(), 2u);
}
