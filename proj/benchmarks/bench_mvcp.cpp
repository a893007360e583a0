#include <random>

#include <benchmark/benchmark.h>

#include "mvcp/mvcp.hpp"

using namespace mvcp;

namespace {

DenseTensor3 planted(std::size_t n, int rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector l(rank);
  Matrix a(3, rank), v(n, rank);
  for (auto& x : l) x = 1.0 + u(rng);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = u(rng);
  for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = u(rng);
  return cp_reconstruct(l, a, v);
}

EmbeddingSet embeddings(std::size_t videos, std::size_t dim) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  EmbeddingSet e;
  for (std::size_t n = 0; n < videos; ++n) e.videos.push_back("v" + std::to_string(n));
  for (std::size_t n = 0; n < videos * 3; ++n) {
    Vector x(static_cast<Eigen::Index>(dim));
    for (auto& c : x) c = g(rng);
    e.vectors.push_back(x);
  }
  return e;
}

}  // namespace

static void BM_SimilarityTensor(benchmark::State& state) {
  const EmbeddingSet e = embeddings(static_cast<std::size_t>(state.range(0)), 768);
  for (auto _ : state) benchmark::DoNotOptimize(build_similarity_tensor(e));
}
BENCHMARK(BM_SimilarityTensor)->Arg(31)->Arg(100);

static void BM_CpReconstruct(benchmark::State& state) {
  const int rank = static_cast<int>(state.range(0));
  const Vector l = Vector::Ones(rank);
  const Matrix a = Matrix::Random(3, rank).cwiseAbs();
  const Matrix u = Matrix::Random(31, rank).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(cp_reconstruct(l, a, u));
}
BENCHMARK(BM_CpReconstruct)->Arg(4)->Arg(10);

// One restart, fixed sweep count: isolates per-sweep ALS cost.
static void BM_FitSweeps(benchmark::State& state) {
  set_warnings_enabled(false);
  const int rank = static_cast<int>(state.range(0));
  const DenseTensor3 t = planted(31, rank, 3);
  FitConfig cfg;
  cfg.restarts = 1;
  cfg.max_iters = 200;
  cfg.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(fit(t, rank, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.max_iters);
}
BENCHMARK(BM_FitSweeps)->Arg(2)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

// Default settings: 2000 iterations, 5 restarts.
static void BM_FitDefaults(benchmark::State& state) {
  set_warnings_enabled(false);
  const DenseTensor3 t = planted(31, 4, 5);
  FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit(t, 4, cfg));
}
BENCHMARK(BM_FitDefaults)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_Corcondia(benchmark::State& state) {
  set_warnings_enabled(false);
  const DenseTensor3 t = planted(31, 3, 7);
  FitConfig cfg;
  cfg.restarts = 1;
  const SymCpModel m = fit(t, 3, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(corcondia(t, m));
}
BENCHMARK(BM_Corcondia);

static void BM_Tsne(benchmark::State& state) {
  const Matrix x = Matrix::Random(state.range(0), 4);
  TsneConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(tsne_project(x, cfg));
}
BENCHMARK(BM_Tsne)->Arg(31)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
