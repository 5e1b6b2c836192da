#include <benchmark/benchmark.h>

#include "zinfer/bounds.hpp"
#include "zinfer/downstream.hpp"
#include "zinfer/estimate.hpp"
#include "zinfer/restore.hpp"
#include "zinfer/simulate.hpp"

using namespace zinfer;

namespace {

void BM_restore(benchmark::State& state) {
  ObservedLaw law = forward_observed_law(fixtures::mcar());
  ProxyChannel channel = ProxyChannel::shared({ChannelFactor{0.8, 0.2}});
  for (auto _ : state) {
    ZiLaw zi = restore_mcar(law, channel);
    benchmark::DoNotOptimize(zi.table().entries().data());
  }
}
BENCHMARK(BM_restore);

void BM_restore_block_parallel(benchmark::State& state) {
  Dgp dgp = fixtures::block_parallel();
  ObservedLaw law = forward_observed_law(dgp);
  ProxyChannel channel = dgp.channel();
  for (auto _ : state) {
    ZiLaw zi = restore_general(law, channel);
    benchmark::DoNotOptimize(zi.table().entries().data());
  }
}
BENCHMARK(BM_restore_block_parallel);

void BM_bound_mar_shared(benchmark::State& state) {
  ObservedLaw law = forward_observed_law(fixtures::mar_shared());
  for (auto _ : state) {
    BoundReport report = bound_mar_shared(law);
    benchmark::DoNotOptimize(report.entries.data());
  }
}
BENCHMARK(BM_bound_mar_shared);

void BM_grid_oracle(benchmark::State& state) {
  ObservedLaw law = forward_observed_law(fixtures::mar_shared());
  int grid_n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto entries = grid_feasibility_oracle(law, ModelTag::MarShared, grid_n);
    benchmark::DoNotOptimize(entries.data());
  }
}
BENCHMARK(BM_grid_oracle)->Arg(1000)->Arg(100000);

void BM_sensitivity_curve(benchmark::State& state) {
  ObservedLaw law = forward_observed_law(fixtures::mcar());
  for (auto _ : state) {
    SensitivityCurve curve = sensitivity_curve(law, ModelTag::Mcar, 200);
    benchmark::DoNotOptimize(curve.tracks.data());
  }
}
BENCHMARK(BM_sensitivity_curve);

void BM_harness_1k(benchmark::State& state) {
  HarnessOptions options;
  options.model = DgpModel::MarShared;
  options.n_dgps = 1000;
  options.grid_n = 101;
  options.seed = 7;
  for (auto _ : state) {
    HarnessReport report = validate_bounds_harness(options);
    benchmark::DoNotOptimize(report.n_pass);
  }
}
BENCHMARK(BM_harness_1k)->Unit(benchmark::kMillisecond);

void BM_em_fit(benchmark::State& state) {
  RecordSet data = sample_dataset(fixtures::mar_shared(), state.range(0), 99);
  EmConfig config;
  config.n_restarts = 5;
  for (auto _ : state) {
    EmFit fit = em_fit(data, ModelTag::MarShared, config);
    benchmark::DoNotOptimize(fit.final_loglik());
  }
}
BENCHMARK(BM_em_fit)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
