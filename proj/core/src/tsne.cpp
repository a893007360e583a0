#include "mvcp/tsne.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mvcp/error.hpp"
#include "mvcp/log.hpp"

namespace mvcp {

namespace {

constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisectionSteps = 50;
constexpr double kInitSigma = 1e-4;
constexpr double kMinGain = 0.01;

Matrix squared_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      const double s = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = s;
      d(j, i) = s;
    }
  return d;
}

void check_points(const Matrix& points) {
  if (points.rows() < 4) {
    throw InvalidArgument("t-SNE needs at least 4 points, got " + std::to_string(points.rows()));
  }
  if (points.cols() < 1) throw InvalidArgument("t-SNE input has no columns");
  if (!points.allFinite()) throw InvalidArgument("t-SNE input has non-finite values");
}

}  // namespace

void TsneConfig::validate() const {
  if (!(perplexity > 0.0)) throw InvalidArgument("perplexity must be positive");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (iterations < 1) throw InvalidArgument("iterations must be at least 1");
  if (!(early_exaggeration > 0.0)) throw InvalidArgument("early_exaggeration must be positive");
}

ConditionalAffinities conditional_affinities(const Matrix& points, double perplexity) {
  if (!(perplexity > 0.0)) throw InvalidArgument("perplexity must be positive");
  const Eigen::Index n = points.rows();
  const Matrix d = squared_distances(points);
  const double target = std::log(perplexity);

  ConditionalAffinities out{Matrix::Zero(n, n), Vector(n), Vector(n)};
  Vector row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // distances shifted by the row minimum; the normalized row is unchanged
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d(i, j));

    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double h = 0.0;
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
      double sum = 0.0;
      double weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
          row(j) = 0.0;
          continue;
        }
        const double shifted = d(i, j) - dmin;
        row(j) = std::exp(-beta * shifted);
        sum += row(j);
        weighted += shifted * row(j);
      }
      h = std::log(sum) + beta * weighted / sum;
      row /= sum;

      const double diff = h - target;
      if (std::abs(diff) < kEntropyTolerance || step + 1 == kMaxBisectionSteps) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    out.p.row(i) = row.transpose();
    out.beta(i) = beta;
    out.entropy(i) = h;
  }
  return out;
}

Matrix joint_affinities(const Matrix& points, double perplexity) {
  const Matrix cond = conditional_affinities(points, perplexity).p;
  Matrix p = cond + cond.transpose();
  p /= p.sum();
  return p;
}

Matrix student_t_affinities(const Matrix& y) {
  const Eigen::Index n = y.rows();
  Matrix q = Matrix::Zero(n, n);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      const double w = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
      q(i, j) = w;
      q(j, i) = w;
      sum += 2.0 * w;
    }
  return q / sum;
}

double kl_divergence(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols()) {
    throw DimensionError("kl_divergence: p and q must be square and of equal size");
  }
  double kl = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      if (i == j) continue;
      const double pij = p(i, j);
      if (pij < 0.0 || q(i, j) < 0.0) throw InvalidArgument("kl_divergence: negative probability");
      if (pij == 0.0) continue;
      if (q(i, j) == 0.0) {
        throw InvalidArgument("kl_divergence: q is zero where p is positive at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
      kl += pij * std::log(pij / q(i, j));
    }
  return kl;
}

TsneResult tsne_run(const Matrix& points, const TsneConfig& cfg) {
  check_points(points);
  cfg.validate();
  const Eigen::Index n = points.rows();
  if (cfg.perplexity >= static_cast<double>(n - 1) / 3.0) {
    warn("t-SNE perplexity " + std::to_string(cfg.perplexity) + " is large for " + std::to_string(n) +
         " points (should be below (N-1)/3)");
  }

  TsneResult res;
  res.p = joint_affinities(points, cfg.perplexity);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, kInitSigma);
  Matrix y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < 2; ++c) y(i, c) = gauss(rng);

  Matrix step = Matrix::Zero(n, 2);
  Matrix gains = Matrix::Ones(n, 2);
  Matrix grad(n, 2);
  Matrix num(n, n);
  res.kl.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int it = 0; it < cfg.iterations; ++it) {
    const double exaggeration = it < cfg.exaggeration_iters ? cfg.early_exaggeration : 1.0;
    const double momentum = it < cfg.momentum_switch_iter ? cfg.initial_momentum : cfg.final_momentum;

    double sum = 0.0;
    num.setZero();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) {
        const double w = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
        num(i, j) = w;
        num(j, i) = w;
        sum += 2.0 * w;
      }

    grad.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double coeff = (exaggeration * res.p(i, j) - num(i, j) / sum) * num(i, j);
        grad.row(i) += coeff * (y.row(i) - y.row(j));
      }
    grad *= 4.0;

    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < 2; ++c) {
        const bool same_sign = (grad(i, c) > 0.0) == (step(i, c) > 0.0);
        gains(i, c) = same_sign ? std::max(gains(i, c) * 0.8, kMinGain) : gains(i, c) + 0.2;
        step(i, c) = momentum * step(i, c) - cfg.learning_rate * gains(i, c) * grad(i, c);
      }
    y += step;
    y.rowwise() -= y.colwise().mean();

    res.kl.push_back(kl_divergence(res.p, student_t_affinities(y)));
  }
  res.embedding = std::move(y);
  return res;
}

Matrix tsne_project(const Matrix& points, const TsneConfig& cfg) { return tsne_run(points, cfg).embedding; }

}  // namespace mvcp
