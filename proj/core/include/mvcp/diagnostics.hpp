#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mvcp/sym_ncp.hpp"
#include "mvcp/tensor.hpp"

namespace mvcp {

/// Core consistency of a symmetric CP model, in percent.
///
/// lambda_r^(1/3) is folded into column r of each mode's factor, the tensor
/// is projected onto the factor spaces with Moore-Penrose pseudo-inverses
///   G = X x1 U+ x2 U+ x3 A+
/// and the score is 100 * (1 - |G - I|_F^2 / R) with I superdiagonal ones.
/// Returns nullopt (not applicable) when R > min(I, J, K). Throws
/// RankDeficientError naming the mode when a scaled factor is not of full
/// column rank.
std::optional<double> corcondia(const DenseTensor3& t, const CpFactors& model);
std::optional<double> corcondia(const DenseTensor3& t, const SymCpModel& model);

/// Same computation, also exposing the projected core.
DenseTensor3 corcondia_core(const DenseTensor3& t, const CpFactors& model);

struct ErrorCurvePoint {
  int rank = 0;
  double sse = 0.0;
};

/// Best-of-restarts fit per rank. Unique ranks are fitted in ascending order,
/// each warm-started from the next-lower fitted rank, so the curve is
/// non-increasing. The returned vector follows `ranks` order (duplicates
/// repeat the same model).
std::vector<SymCpModel> fit_rank_sweep(const DenseTensor3& t, const std::vector<int>& ranks,
                                       const FitConfig& cfg);
std::vector<ErrorCurvePoint> error_curve(const DenseTensor3& t, const std::vector<int>& ranks,
                                         const FitConfig& cfg);

struct HoldoutConfig {
  double mask_fraction = 0.10;
  int trials = 3;

  void validate() const;
};

struct HoldoutResult {
  double rmse_mean = 0.0;
  double rmse_std = 0.0;  // population std over trials
  std::vector<double> trial_rmse;
};

/// Samples a held-out set: (i,j,k) with i <= j are drawn uniformly without
/// replacement until the symmetrized hidden set covers at least `fraction`
/// of all entries. Rejects (and redraws, up to 100 attempts) masks that hide
/// a whole slice or a whole row in every slice. Returned flags are true for
/// observed entries.
MaskTensor sample_holdout_mask(Dims dims, double fraction, std::mt19937_64& rng);

/// sqrt(sse over hidden entries / hidden count); `mask` flags observed entries.
double holdout_rmse(const DenseTensor3& t, const DenseTensor3& approx, const MaskTensor& mask);

/// Trial tau samples a mask and fits with seed cfg.seed + 1000 * tau.
HoldoutResult holdout_validate(const DenseTensor3& t, int rank, const HoldoutConfig& hcfg,
                               const FitConfig& cfg);

struct RankReportRow {
  int rank = 0;
  std::optional<double> corcondia;
  double sse = 0.0;
  double holdout_rmse_mean = 0.0;
  double holdout_rmse_std = 0.0;
};

/// Rows sorted by rank, duplicates removed.
struct RankReport {
  std::vector<RankReportRow> rows;
};

RankReport rank_report(const DenseTensor3& t, const std::vector<int>& ranks,
                       const HoldoutConfig& hcfg, const FitConfig& cfg);

}  // namespace mvcp
