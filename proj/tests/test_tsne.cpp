#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mvcp/error.hpp"
#include "mvcp/log.hpp"
#include "mvcp/tsne.hpp"
#include "support/oracles.hpp"

using namespace mvcp;

namespace {

Matrix random_points(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(n, d);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = u(rng);
  return x;
}

// Perplexity of each row measured in bits, straight from the probabilities.
std::vector<double> row_perplexity(const Matrix& p) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0) h -= p(i, j) * std::log2(p(i, j));
    out.push_back(std::exp2(h));
  }
  return out;
}

TsneConfig short_run(std::uint64_t seed, int iters = 300) {
  TsneConfig cfg;
  cfg.seed = seed;
  cfg.iterations = iters;
  return cfg;
}

}  // namespace

TEST(KlDivergence, HandValues) {
  Matrix p(2, 2), q(2, 2);
  p << 0, 0.5, 0.5, 0;
  q << 0, 0.9, 0.1, 0;
  EXPECT_NEAR(kl_divergence(p, q), 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1), 1e-15);
  EXPECT_NEAR(kl_divergence(p, q), 0.5108256237659907, 1e-12);
  EXPECT_EQ(kl_divergence(p, p), 0.0);
}

TEST(KlDivergence, ZeroWhereNeededAndErrors) {
  Matrix p(2, 2), q(2, 2);
  p << 0, 1, 0, 0;
  q << 0, 0.5, 0.5, 0;
  EXPECT_NEAR(kl_divergence(p, q), std::log(2.0), 1e-15);
  EXPECT_THROW(kl_divergence(q, p), InvalidArgument);
  Matrix neg = q;
  neg(0, 1) = -0.5;
  EXPECT_THROW(kl_divergence(p, neg), InvalidArgument);
  EXPECT_THROW(kl_divergence(p, Matrix::Zero(3, 3)), DimensionError);
}

TEST(KlDivergence, NonNegativeOnRandomPairs) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix p(5, 5), q(5, 5);
    for (Eigen::Index k = 0; k < 25; ++k) {
      p.data()[k] = u(rng);
      q.data()[k] = u(rng);
    }
    p.diagonal().setZero();
    q.diagonal().setZero();
    p /= p.sum();
    q /= q.sum();
    EXPECT_GE(kl_divergence(p, q), 0.0);
  }
}

TEST(Affinities, PerplexityMatchesEveryRow) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix x = random_points(31, 4, seed);
    for (double perp : {2.0, 5.0, 9.0}) {
      const ConditionalAffinities c = conditional_affinities(x, perp);
      const auto measured = row_perplexity(c.p);
      for (std::size_t i = 0; i < measured.size(); ++i) {
        EXPECT_LT(std::abs(measured[i] - perp), 1e-3 * perp) << "row " << i << " perplexity " << perp;
        EXPECT_EQ(c.p(i, i), 0.0);
        EXPECT_NEAR(c.p.row(i).sum(), 1.0, 1e-12);
      }
    }
  }
}

TEST(Affinities, JointIsSymmetricAndNormalized) {
  const Matrix p = joint_affinities(random_points(20, 3, 9), 5.0);
  EXPECT_NEAR(p.sum(), 1.0, 1e-9);
  EXPECT_GE(p.minCoeff(), 0.0);
  EXPECT_EQ(p, p.transpose());
}

TEST(Affinities, StudentTIsSymmetricAndNormalized) {
  const Matrix q = student_t_affinities(random_points(10, 2, 3));
  EXPECT_NEAR(q.sum(), 1.0, 1e-12);
  EXPECT_TRUE(q.diagonal().isZero(0.0));
  EXPECT_LT((q - q.transpose()).cwiseAbs().maxCoeff(), 1e-18);
}

TEST(Tsne, IdenticalPointsStillGiveFiniteOutput) {
  set_warnings_enabled(false);
  const Matrix x = Matrix::Constant(8, 3, 0.25);
  const TsneResult r = tsne_run(x, short_run(0, 100));
  set_warnings_enabled(true);
  EXPECT_EQ(r.embedding.rows(), 8);
  EXPECT_EQ(r.embedding.cols(), 2);
  EXPECT_TRUE(r.embedding.allFinite());
  EXPECT_TRUE(std::isfinite(r.kl.back()));
}

TEST(Tsne, DeterministicForFixedSeed) {
  const Matrix x = random_points(31, 4, 5);
  EXPECT_EQ(tsne_project(x, short_run(7)), tsne_project(x, short_run(7)));
  EXPECT_NE(tsne_project(x, short_run(7)), tsne_project(x, short_run(8)));
}

TEST(Tsne, TranslationInvariant) {
  // Dyadic inputs and a power-of-two shift keep every coordinate difference exact.
  const Matrix x = (random_points(31, 4, 6) * 1024.0).array().round() / 1024.0;
  const Matrix shifted = x.rowwise() + Eigen::RowVectorXd::Constant(4, 8.0);
  EXPECT_EQ(tsne_project(x, short_run(2)), tsne_project(shifted, short_run(2)));
}

TEST(Tsne, EmbeddingIsCentered) {
  const Matrix y = tsne_project(random_points(12, 3, 4), short_run(1, 200));
  EXPECT_LT(y.colwise().mean().norm(), 1e-10);
}

TEST(Tsne, KlTrendAfterExaggeration) {
  const Matrix x = random_points(31, 4, 11);
  const TsneResult r = tsne_run(x, short_run(3, 1000));
  ASSERT_EQ(r.kl.size(), 1000u);
  for (std::size_t t = 250; t + 100 < r.kl.size(); ++t) ASSERT_LE(r.kl[t + 100], 1.05 * r.kl[t]) << "t " << t;
}

TEST(Tsne, SeparatesTightClusters) {
  std::vector<int> labels;
  const Matrix x = oracle::three_clusters(10, 0.01, 0, &labels);
  TsneConfig cfg;
  EXPECT_GT(oracle::silhouette(tsne_project(x, cfg), labels), 0.5);
}

TEST(Tsne, RejectsBadInput) {
  EXPECT_THROW(tsne_project(Matrix::Random(3, 2), TsneConfig{}), InvalidArgument);
  Matrix x = Matrix::Random(6, 2);
  x(2, 1) = std::nan("");
  EXPECT_THROW(tsne_project(x, TsneConfig{}), InvalidArgument);
  TsneConfig bad;
  bad.learning_rate = 0;
  EXPECT_THROW(tsne_project(Matrix::Random(6, 2), bad), InvalidArgument);
}
