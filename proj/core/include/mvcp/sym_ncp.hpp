#pragma once

#include <cstdint>
#include <vector>

#include "mvcp/tensor.hpp"

namespace mvcp {

enum class InitKind { UniformRandom };

struct FitConfig {
  int max_iters = 2000;
  int restarts = 5;
  /// Stop once the relative SSE change between sweeps drops below tol.
  double tol = 1e-8;
  std::uint64_t seed = 0;
  InitKind init = InitKind::UniformRandom;
  /// Emit a warning when observed entries are negative.
  bool warn_on_negative = true;

  void validate() const;
};

/// lambda, phase loadings A (P x R) and video loadings U (N x R) of
///   X(i,j,p) ~ sum_r lambda_r A(p,r) U(i,r) U(j,r)
struct CpFactors {
  Vector lambda;
  Matrix phase_loadings;
  Matrix video_loadings;

  int rank() const { return static_cast<int>(lambda.size()); }
  DenseTensor3 reconstruct() const { return cp_reconstruct(lambda, phase_loadings, video_loadings); }
};

/// A fitted non-negative symmetric CP model.
///
/// Columns of A and U have unit l2 norm (or are all-zero with lambda_r = 0)
/// and lambda is sorted descending with ties kept in component order.
struct SymCpModel {
  CpFactors factors;
  /// SSE of the reported model over the observed entries.
  double final_sse = 0.0;
  /// Seed of the winning restart.
  std::uint64_t restart_seed = 0;
  /// Best SSE reached by each restart, in restart order. A warm-start
  /// restart, when present, is the last entry.
  std::vector<double> per_restart_sse;

  int rank() const { return factors.rank(); }
  const Vector& lambda() const { return factors.lambda; }
  const Matrix& phase_loadings() const { return factors.phase_loadings; }
  const Matrix& video_loadings() const { return factors.video_loadings; }
  DenseTensor3 reconstruct() const { return factors.reconstruct(); }
};

/// Scales every column of A and U to unit norm, folds the scales into lambda
/// (lambda_r *= |a_r| |u_r|^2 since u_r appears twice), zeroes dead
/// components, then stable-sorts by lambda descending. Requires non-negative
/// factors. The reconstruction is unchanged up to rounding.
CpFactors normalize_and_sort(const CpFactors& raw);

/// Non-negative symmetric CP by projected alternating least squares.
///
/// Each sweep solves the mode-1 and mode-2 least-squares updates for U (the
/// other copy held fixed), averages them and clips at zero, then solves for A
/// and clips at zero. lambda is carried inside A during the sweeps. Restart k
/// draws its initial factors i.i.d. uniform [0,1) from seed cfg.seed + k; the
/// best iterate seen (not the last) is kept per restart and the restart with
/// the lowest SSE wins.
///
/// With a mask, hidden entries are never read: at the start of every sweep
/// they are replaced by the current reconstruction, and SSE is computed over
/// observed entries only.
///
/// `warm_start`, when given, must have rank < `rank`; it is padded with zero
/// components and run as one extra restart (seed cfg.seed + cfg.restarts),
/// so the result is never worse than the padded lower-rank model.
SymCpModel fit(const DenseTensor3& t, int rank, const FitConfig& cfg,
               const MaskTensor* mask = nullptr, const CpFactors* warm_start = nullptr);

}  // namespace mvcp
