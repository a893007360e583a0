#pragma once

#include <cstdint>
#include <vector>

#include "mvcp/tensor.hpp"

namespace mvcp {

struct TsneConfig {
  double perplexity = 5.0;
  double learning_rate = 200.0;
  int iterations = 1000;
  std::uint64_t seed = 0;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iter = 250;

  void validate() const;
};

/// Row-conditional Gaussian affinities p(j|i) with per-point precision found
/// by bisection so that exp(H_i) matches the perplexity (|dH| < 1e-5 nats,
/// at most 50 steps).
struct ConditionalAffinities {
  Matrix p;        // row-stochastic, zero diagonal
  Vector beta;     // 1 / (2 sigma_i^2)
  Vector entropy;  // H_i in nats
};

ConditionalAffinities conditional_affinities(const Matrix& points, double perplexity);

/// Symmetrized joint affinities (p(j|i) + p(i|j)) / 2N, summing to 1.
Matrix joint_affinities(const Matrix& points, double perplexity);

/// Student-t (one degree of freedom) affinities of a low-dimensional layout.
Matrix student_t_affinities(const Matrix& y);

/// sum over off-diagonal pairs of p log(p / q), with 0 log 0 = 0. Throws
/// InvalidArgument where q == 0 but p > 0.
double kl_divergence(const Matrix& p, const Matrix& q);

struct TsneResult {
  Matrix embedding;            // N x 2, centered
  Matrix p;                    // joint affinities
  std::vector<double> kl;      // KL(P || Q) after every iteration
};

/// Exact O(N^2) t-SNE: early exaggeration and momentum per `cfg`, adaptive
/// per-coordinate gains, layout initialized from N(0, 1e-4^2) and
/// re-centered after every step.
TsneResult tsne_run(const Matrix& points, const TsneConfig& cfg);

/// N x 2 embedding of the rows of `points`. Requires N >= 4 and finite input.
Matrix tsne_project(const Matrix& points, const TsneConfig& cfg);

}  // namespace mvcp
