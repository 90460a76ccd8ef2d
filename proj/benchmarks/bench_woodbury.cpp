// Micro-benchmarks for the update path against a from-scratch solve. The
// CLI's `bench` subcommand runs the full scaled experiment; these are for
// quick before/after comparisons of kernel changes.

#include <benchmark/benchmark.h>

#include "wls/bench.hpp"
#include "wls/woodbury.hpp"

namespace {

constexpr wls::Index kRows = 4000;
constexpr std::uint64_t kSeed = 1;

wls::Vector rhs(wls::Index n) {
  const auto b = wls::gen_gaussian(kSeed, wls::stream_id(n, 0, 0, wls::StreamRole::b), kRows, 1);
  return {b.values().begin(), b.values().end()};
}

wls::DenseMatrix base_matrix(wls::Index n) {
  return wls::gen_gaussian(kSeed, wls::stream_id(n, 0, 0, wls::StreamRole::a), kRows, n);
}

wls::LowRankUpdate update(wls::Index n, wls::Index r) {
  return {wls::gen_gaussian(kSeed, wls::stream_id(n, r, 0, wls::StreamRole::u), kRows, r),
          wls::gen_gaussian(kSeed, wls::stream_id(n, r, 0, wls::StreamRole::v), n, r)};
}

void BM_QrThin(benchmark::State& state) {
  const wls::DenseMatrix a = base_matrix(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wls::qr_thin(a));
}

void BM_BaselineSolve(benchmark::State& state) {
  const wls::Index n = state.range(0), r = state.range(1);
  const wls::DenseMatrix a = base_matrix(n);
  const wls::LowRankUpdate upd = update(n, r);
  const wls::Vector b = rhs(n);
  for (auto _ : state) benchmark::DoNotOptimize(wls::baseline_solve(a, upd.u(), upd.v(), b));
}

void BM_UpdatedSolve(benchmark::State& state) {
  const wls::Index n = state.range(0), r = state.range(1);
  const wls::Vector b = rhs(n);
  const wls::PreparedBase base = wls::prepare(base_matrix(n), b);
  const wls::LowRankUpdate upd = update(n, r);
  for (auto _ : state) {
    const wls::UpdateWorkspace ws = wls::build_workspace(base, upd);
    benchmark::DoNotOptimize(wls::solve_updated(base, upd, ws, b));
  }
}

void BM_SolveOnly(benchmark::State& state) {
  const wls::Index n = state.range(0), r = state.range(1);
  const wls::Vector b = rhs(n);
  const wls::PreparedBase base = wls::prepare(base_matrix(n), b);
  const wls::LowRankUpdate upd = update(n, r);
  const wls::UpdateWorkspace ws = wls::build_workspace(base, upd);
  const wls::SolveOptions opts{.refine_steps = static_cast<int>(state.range(2))};
  for (auto _ : state) benchmark::DoNotOptimize(wls::solve_updated(base, upd, ws, b, opts));
}

}  // namespace

BENCHMARK(BM_QrThin)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BaselineSolve)->Args({100, 5})->Args({400, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UpdatedSolve)->Args({100, 5})->Args({400, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveOnly)->Args({400, 5, 0})->Args({400, 5, 1})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
