#include "mvcp/sym_ncp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <string>

#include "mvcp/error.hpp"
#include "mvcp/log.hpp"

namespace mvcp {

namespace {

constexpr double kSymmetryTolerance = 1e-9;

// Phase loadings here carry lambda (lambda_r == 1 during the sweeps).
struct Iterate {
  Matrix a;
  Matrix u;
};

struct RestartOutcome {
  Iterate best;
  double best_sse = 0.0;
};

DenseTensor3 reconstruct(const Iterate& it) {
  return cp_reconstruct(Vector::Ones(it.a.cols()), it.a, it.u);
}

double sse_of(const DenseTensor3& t, const DenseTensor3& approx, const MaskTensor* mask) {
  return mask ? masked_sse(t, approx, *mask) : masked_sse(t, approx);
}

// Returns mttkrp * gram^-1 (minimum-norm when gram is singular).
Matrix solve_normal_equations(const Matrix& mttkrp, const Matrix& gram) {
  return gram.completeOrthogonalDecomposition().solve(mttkrp.transpose()).transpose();
}

void validate_inputs(const DenseTensor3& t, int rank, const FitConfig& cfg, const MaskTensor* mask,
                     const CpFactors* warm_start) {
  cfg.validate();
  const Dims& d = t.dims();
  if (d.i == 0 || d.k == 0) throw InvalidArgument("fit: tensor is empty");
  if (d.i != d.j) {
    throw DimensionError("fit: tensor must be N x N x P, got first two dims " +
                         std::to_string(d.i) + " and " + std::to_string(d.j));
  }
  if (rank < 1) throw InvalidArgument("fit: rank must be at least 1, got " + std::to_string(rank));
  if (static_cast<std::size_t>(rank) > d.i) {
    throw InvalidArgument("fit: rank " + std::to_string(rank) + " exceeds N = " + std::to_string(d.i));
  }

  if (mask) {
    if (mask->dims() != d) throw DimensionError("fit: mask dims differ from tensor dims");
    if (!mask->symmetric_in_first_two_modes()) {
      throw InvalidArgument("fit: mask must be symmetric in modes 1 and 2");
    }
    for (std::size_t k = 0; k < d.k; ++k) {
      bool any = false;
      for (std::size_t j = 0; j < d.j && !any; ++j)
        for (std::size_t i = 0; i < d.i && !any; ++i) any = mask->observed(i, j, k);
      if (!any) throw InvalidArgument("fit: mask hides all of slice " + std::to_string(k));
    }
    for (std::size_t i = 0; i < d.i; ++i) {
      bool any = false;
      for (std::size_t k = 0; k < d.k && !any; ++k)
        for (std::size_t j = 0; j < d.j && !any; ++j) any = mask->observed(i, j, k);
      if (!any) throw InvalidArgument("fit: mask hides row " + std::to_string(i) + " in every slice");
    }
  }

  const auto observed = [&](std::size_t i, std::size_t j, std::size_t k) {
    return !mask || mask->observed(i, j, k);
  };
  double worst = 0.0;
  std::size_t negatives = 0;
  for (std::size_t k = 0; k < d.k; ++k)
    for (std::size_t j = 0; j < d.j; ++j)
      for (std::size_t i = 0; i < d.i; ++i) {
        if (!observed(i, j, k)) continue;
        if (t(i, j, k) < 0.0) ++negatives;
        if (i > j) worst = std::max(worst, std::abs(t(i, j, k) - t(j, i, k)));
      }
  if (worst > kSymmetryTolerance) {
    throw InvalidArgument("fit: tensor slices are not symmetric (max |X(i,j,p) - X(j,i,p)| = " +
                          std::to_string(worst) + ")");
  }
  if (negatives > 0 && cfg.warn_on_negative) {
    warn("fit: tensor has " + std::to_string(negatives) +
         " negative entries; a non-negative model cannot represent them");
  }

  if (warm_start) {
    const auto& w = *warm_start;
    if (w.rank() < 1 || w.rank() >= rank) {
      throw InvalidArgument("fit: warm start rank must be in [1, rank)");
    }
    if (w.video_loadings.rows() != static_cast<Eigen::Index>(d.i) ||
        w.phase_loadings.rows() != static_cast<Eigen::Index>(d.k) ||
        w.video_loadings.cols() != w.rank() || w.phase_loadings.cols() != w.rank()) {
      throw DimensionError("fit: warm start factors do not match the tensor");
    }
    if ((w.lambda.array() < 0).any() || (w.phase_loadings.array() < 0).any() ||
        (w.video_loadings.array() < 0).any()) {
      throw InvalidArgument("fit: warm start factors must be non-negative");
    }
  }
}

Iterate random_init(std::size_t n, std::size_t p, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Iterate it{Matrix(p, rank), Matrix(n, rank)};
  for (Eigen::Index r = 0; r < rank; ++r)
    for (Eigen::Index i = 0; i < it.u.rows(); ++i) it.u(i, r) = unif(rng);
  for (Eigen::Index r = 0; r < rank; ++r)
    for (Eigen::Index i = 0; i < it.a.rows(); ++i) it.a(i, r) = unif(rng);
  return it;
}

// Lower-rank model padded with exact zero columns.
Iterate padded(const CpFactors& w, int rank) {
  const Eigen::Index r0 = w.rank();
  Iterate it{Matrix::Zero(w.phase_loadings.rows(), rank), Matrix::Zero(w.video_loadings.rows(), rank)};
  it.a.leftCols(r0) = w.phase_loadings * w.lambda.asDiagonal();
  it.u.leftCols(r0) = w.video_loadings;
  return it;
}

// Seeds the zero columns so the new components can grow; a zero column is a
// fixed point of the ALS update.
Iterate perturb_padding(Iterate it, Eigen::Index r0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u_scale = 0.1 / std::sqrt(static_cast<double>(it.u.rows()));
  double a_mean = r0 > 0 ? it.a.leftCols(r0).mean() : 1.0;
  if (!(a_mean > 0.0)) a_mean = 1.0;
  for (Eigen::Index r = r0; r < it.u.cols(); ++r) {
    for (Eigen::Index i = 0; i < it.u.rows(); ++i) it.u(i, r) = u_scale * unif(rng);
    for (Eigen::Index i = 0; i < it.a.rows(); ++i) it.a(i, r) = 0.1 * a_mean * unif(rng);
  }
  return it;
}

RestartOutcome run_restart(const DenseTensor3& t, const MaskTensor* mask, Iterate cur,
                           const FitConfig& cfg, const Iterate* exact_start) {
  DenseTensor3 recon = reconstruct(cur);
  double sse = sse_of(t, recon, mask);
  RestartOutcome out{cur, sse};
  if (exact_start) {
    const double s0 = sse_of(t, reconstruct(*exact_start), mask);
    if (s0 <= out.best_sse) out = {*exact_start, s0};
  }

  // Hidden entries of `work` are overwritten before each sweep reads them.
  DenseTensor3 work = t;
  Matrix x1, x2, x3;
  const auto refresh_unfoldings = [&] {
    x1 = unfold(work, 1);
    x2 = unfold(work, 2);
    x3 = unfold(work, 3);
  };
  if (!mask) refresh_unfoldings();

  double prev = sse;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (mask) {
      auto w = work.values();
      const auto r = recon.values();
      for (std::size_t n = 0; n < w.size(); ++n)
        if (!mask->observed_at(n)) w[n] = r[n];
      refresh_unfoldings();
    }

    const Matrix gram_a = cur.a.transpose() * cur.a;
    const Matrix u1 = solve_normal_equations(
        x1 * khatri_rao(cur.a, cur.u), gram_a.cwiseProduct(cur.u.transpose() * cur.u));
    const Matrix u2 = solve_normal_equations(
        x2 * khatri_rao(cur.a, u1), gram_a.cwiseProduct(u1.transpose() * u1));
    cur.u = (0.5 * (u1 + u2)).cwiseMax(0.0);

    const Matrix gram_u = cur.u.transpose() * cur.u;
    cur.a = solve_normal_equations(x3 * khatri_rao(cur.u, cur.u), gram_u.cwiseProduct(gram_u))
                .cwiseMax(0.0);

    recon = reconstruct(cur);
    sse = sse_of(t, recon, mask);
    if (sse < out.best_sse) out = {cur, sse};
    if (std::abs(prev - sse) <= cfg.tol * prev) break;
    prev = sse;
  }
  return out;
}

}  // namespace

void FitConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (restarts < 1) throw InvalidArgument("restarts must be at least 1");
  if (!(tol >= 0.0)) throw InvalidArgument("tol must be non-negative");
}

CpFactors normalize_and_sort(const CpFactors& raw) {
  const Eigen::Index R = raw.lambda.size();
  if (raw.phase_loadings.cols() != R || raw.video_loadings.cols() != R) {
    throw DimensionError("normalize_and_sort: rank mismatch");
  }
  if ((raw.lambda.array() < 0).any() || (raw.phase_loadings.array() < 0).any() ||
      (raw.video_loadings.array() < 0).any()) {
    throw InvalidArgument("normalize_and_sort: factors must be non-negative");
  }

  CpFactors scaled = raw;
  for (Eigen::Index r = 0; r < R; ++r) {
    const double na = raw.phase_loadings.col(r).norm();
    const double nu = raw.video_loadings.col(r).norm();
    const double l = raw.lambda(r) * na * nu * nu;
    if (na == 0.0 || nu == 0.0 || !(l > 0.0)) {
      scaled.lambda(r) = 0.0;
      scaled.phase_loadings.col(r).setZero();
      scaled.video_loadings.col(r).setZero();
      continue;
    }
    scaled.lambda(r) = l;
    scaled.phase_loadings.col(r) /= na;
    scaled.video_loadings.col(r) /= nu;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(R));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return scaled.lambda(x) > scaled.lambda(y); });

  CpFactors out{Vector(R), Matrix(raw.phase_loadings.rows(), R), Matrix(raw.video_loadings.rows(), R)};
  for (Eigen::Index r = 0; r < R; ++r) {
    const auto src = order[static_cast<std::size_t>(r)];
    out.lambda(r) = scaled.lambda(src);
    out.phase_loadings.col(r) = scaled.phase_loadings.col(src);
    out.video_loadings.col(r) = scaled.video_loadings.col(src);
  }
  return out;
}

SymCpModel fit(const DenseTensor3& t, int rank, const FitConfig& cfg, const MaskTensor* mask,
               const CpFactors* warm_start) {
  validate_inputs(t, rank, cfg, mask, warm_start);
  const std::size_t n = t.dims().i;
  const std::size_t p = t.dims().k;

  const int runs = cfg.restarts + (warm_start ? 1 : 0);
  std::vector<std::future<RestartOutcome>> jobs;
  jobs.reserve(static_cast<std::size_t>(runs));
  for (int k = 0; k < runs; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    const bool is_warm = warm_start && k == cfg.restarts;
    jobs.push_back(std::async(runs > 1 ? std::launch::async : std::launch::deferred, [&, seed, is_warm] {
      if (!is_warm) return run_restart(t, mask, random_init(n, p, rank, seed), cfg, nullptr);
      const Iterate exact = padded(*warm_start, rank);
      return run_restart(t, mask, perturb_padding(exact, warm_start->rank(), seed), cfg, &exact);
    }));
  }

  std::vector<RestartOutcome> outcomes;
  outcomes.reserve(jobs.size());
  for (auto& j : jobs) outcomes.push_back(j.get());

  std::size_t winner = 0;
  SymCpModel model;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    model.per_restart_sse.push_back(outcomes[k].best_sse);
    if (outcomes[k].best_sse < outcomes[winner].best_sse) winner = k;
  }
  const Iterate& best = outcomes[winner].best;
  model.factors = normalize_and_sort(CpFactors{Vector::Ones(rank), best.a, best.u});
  model.final_sse = outcomes[winner].best_sse;
  model.restart_seed = cfg.seed + winner;
  return model;
}

}  // namespace mvcp
