#include "mvcp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "mvcp/error.hpp"
#include "mvcp/log.hpp"

namespace mvcp {

namespace {

constexpr double kMaxConditionNumber = 1e10;
constexpr int kMaxMaskAttempts = 100;

Matrix checked_pinv(const Matrix& m, const std::string& mode) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  if (!(smax > 0.0) || !(smin > 0.0) || smax / smin > kMaxConditionNumber) {
    throw RankDeficientError("corcondia: " + mode + " factor is not of full column rank (singular values " +
                                 std::to_string(smax) + " .. " + std::to_string(smin) + ")",
                             mode);
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

bool corcondia_applicable(const DenseTensor3& t, int rank) {
  const Dims& d = t.dims();
  return static_cast<std::size_t>(rank) <= std::min({d.i, d.j, d.k});
}

void check_ranks(const DenseTensor3& t, const std::vector<int>& ranks) {
  if (ranks.empty()) throw InvalidArgument("rank list is empty");
  for (int r : ranks) {
    if (r < 1 || static_cast<std::size_t>(r) > t.dims().i) {
      throw InvalidArgument("rank " + std::to_string(r) + " is outside [1, " +
                            std::to_string(t.dims().i) + "]");
    }
  }
}

}  // namespace

DenseTensor3 corcondia_core(const DenseTensor3& t, const CpFactors& model) {
  const Dims& d = t.dims();
  if (model.video_loadings.rows() != static_cast<Eigen::Index>(d.i) || d.i != d.j ||
      model.phase_loadings.rows() != static_cast<Eigen::Index>(d.k)) {
    throw DimensionError("corcondia: model does not match tensor dims");
  }
  const Vector scale = model.lambda.unaryExpr([](double l) { return std::cbrt(l); });
  const Matrix u = model.video_loadings * scale.asDiagonal();
  const Matrix a = model.phase_loadings * scale.asDiagonal();
  const Matrix u_pinv = checked_pinv(u, "video (modes 1-2)");
  const Matrix a_pinv = checked_pinv(a, "phase (mode 3)");
  return mode_product(mode_product(mode_product(t, u_pinv, 1), u_pinv, 2), a_pinv, 3);
}

std::optional<double> corcondia(const DenseTensor3& t, const CpFactors& model) {
  const int R = model.rank();
  if (R < 1) throw InvalidArgument("corcondia: empty model");
  if (!corcondia_applicable(t, R)) return std::nullopt;
  const DenseTensor3 g = corcondia_core(t, model);
  double dev = 0.0;
  for (int a = 0; a < R; ++a)
    for (int b = 0; b < R; ++b)
      for (int c = 0; c < R; ++c) {
        const double target = (a == b && b == c) ? 1.0 : 0.0;
        const double diff = g(a, b, c) - target;
        dev += diff * diff;
      }
  return 100.0 * (1.0 - dev / R);
}

std::optional<double> corcondia(const DenseTensor3& t, const SymCpModel& model) {
  return corcondia(t, model.factors);
}

std::vector<SymCpModel> fit_rank_sweep(const DenseTensor3& t, const std::vector<int>& ranks,
                                       const FitConfig& cfg) {
  check_ranks(t, ranks);
  std::vector<int> unique = ranks;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  std::map<int, SymCpModel> by_rank;
  FitConfig c = cfg;
  const SymCpModel* lower = nullptr;
  for (int r : unique) {
    const SymCpModel& m = by_rank[r] = fit(t, r, c, nullptr, lower ? &lower->factors : nullptr);
    lower = &m;
    c.warn_on_negative = false;
  }

  std::vector<SymCpModel> out;
  out.reserve(ranks.size());
  for (int r : ranks) out.push_back(by_rank.at(r));
  return out;
}

std::vector<ErrorCurvePoint> error_curve(const DenseTensor3& t, const std::vector<int>& ranks,
                                         const FitConfig& cfg) {
  const auto models = fit_rank_sweep(t, ranks, cfg);
  std::vector<ErrorCurvePoint> out;
  out.reserve(models.size());
  for (std::size_t n = 0; n < models.size(); ++n) out.push_back({ranks[n], models[n].final_sse});
  return out;
}

void HoldoutConfig::validate() const {
  if (!(mask_fraction > 0.0 && mask_fraction < 1.0)) {
    throw InvalidArgument("mask_fraction must be in (0, 1)");
  }
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
}

MaskTensor sample_holdout_mask(Dims dims, double fraction, std::mt19937_64& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("mask fraction must be in (0, 1)");
  if (dims.i != dims.j) throw DimensionError("holdout mask needs an N x N x P tensor");

  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> pool;
  for (std::size_t k = 0; k < dims.k; ++k)
    for (std::size_t j = 0; j < dims.j; ++j)
      for (std::size_t i = 0; i <= j; ++i) pool.emplace_back(i, j, k);
  const auto target = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(dims.size())));

  for (int attempt = 0; attempt < kMaxMaskAttempts; ++attempt) {
    std::shuffle(pool.begin(), pool.end(), rng);
    MaskTensor mask(dims, true);
    std::size_t hidden = 0;
    for (const auto& [i, j, k] : pool) {
      if (hidden >= target) break;
      mask.set(i, j, k, false);
      mask.set(j, i, k, false);
      hidden += (i == j) ? 1 : 2;
    }

    bool ok = true;
    for (std::size_t k = 0; k < dims.k && ok; ++k) {
      bool any = false;
      for (std::size_t j = 0; j < dims.j && !any; ++j)
        for (std::size_t i = 0; i < dims.i && !any; ++i) any = mask.observed(i, j, k);
      ok = any;
    }
    for (std::size_t i = 0; i < dims.i && ok; ++i) {
      bool any = false;
      for (std::size_t k = 0; k < dims.k && !any; ++k)
        for (std::size_t j = 0; j < dims.j && !any; ++j) any = mask.observed(i, j, k);
      ok = any;
    }
    if (ok) return mask;
  }
  throw InvalidArgument("holdout: could not draw a mask that leaves every row and slice observed after " +
                        std::to_string(kMaxMaskAttempts) + " attempts (mask fraction too large)");
}

double holdout_rmse(const DenseTensor3& t, const DenseTensor3& approx, const MaskTensor& mask) {
  const MaskTensor held_out = mask.complement();
  const std::size_t count = held_out.count_observed();
  if (count == 0) throw InvalidArgument("holdout_rmse: mask hides no entries");
  return std::sqrt(masked_sse(t, approx, held_out) / static_cast<double>(count));
}

HoldoutResult holdout_validate(const DenseTensor3& t, int rank, const HoldoutConfig& hcfg,
                               const FitConfig& cfg) {
  hcfg.validate();
  cfg.validate();
  HoldoutResult res;
  FitConfig c = cfg;
  for (int tau = 0; tau < hcfg.trials; ++tau) {
    c.seed = cfg.seed + 1000ULL * static_cast<std::uint64_t>(tau);
    std::mt19937_64 rng(c.seed);
    const MaskTensor mask = sample_holdout_mask(t.dims(), hcfg.mask_fraction, rng);
    const SymCpModel model = fit(t, rank, c, &mask);
    res.trial_rmse.push_back(holdout_rmse(t, model.reconstruct(), mask));
    c.warn_on_negative = false;
  }
  const double n = static_cast<double>(res.trial_rmse.size());
  res.rmse_mean = std::accumulate(res.trial_rmse.begin(), res.trial_rmse.end(), 0.0) / n;
  double var = 0.0;
  for (double x : res.trial_rmse) var += (x - res.rmse_mean) * (x - res.rmse_mean);
  res.rmse_std = std::sqrt(var / n);
  return res;
}

RankReport rank_report(const DenseTensor3& t, const std::vector<int>& ranks,
                       const HoldoutConfig& hcfg, const FitConfig& cfg) {
  hcfg.validate();
  check_ranks(t, ranks);
  std::vector<int> unique = ranks;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  const auto models = fit_rank_sweep(t, unique, cfg);
  FitConfig quiet = cfg;
  quiet.warn_on_negative = false;

  RankReport report;
  for (std::size_t n = 0; n < unique.size(); ++n) {
    RankReportRow row;
    row.rank = unique[n];
    row.sse = models[n].final_sse;
    try {
      row.corcondia = corcondia(t, models[n]);
    } catch (const RankDeficientError& e) {
      warn("rank " + std::to_string(row.rank) + ": corcondia skipped: " + e.what());
    }
    const HoldoutResult h = holdout_validate(t, row.rank, hcfg, quiet);
    row.holdout_rmse_mean = h.rmse_mean;
    row.holdout_rmse_std = h.rmse_std;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace mvcp
