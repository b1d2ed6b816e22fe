// Microbenchmarks for the hot paths: RNG draws, acceptance Monte Carlo,
// event generation, histogramming and CSV number formatting.

#include <benchmark/benchmark.h>

#include <vector>

#include "pepsim/acceptance.hpp"
#include "pepsim/analysis.hpp"
#include "pepsim/attenuation.hpp"
#include "pepsim/config.hpp"
#include "pepsim/io.hpp"
#include "pepsim/pipeline.hpp"
#include "pepsim/rng.hpp"
#include "pepsim/simulate.hpp"

namespace {

using namespace pepsim;

void BM_Uniform(benchmark::State& state) {
  auto rng = RngStream::derive(1, 90, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.uniform());
  }
}
BENCHMARK(BM_Uniform);

void BM_Gaussian(benchmark::State& state) {
  auto rng = RngStream::derive(1, 91, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.gaussian(0.0, 1.0));
  }
}
BENCHMARK(BM_Gaussian);

void BM_PoissonInversion(benchmark::State& state) {
  auto rng = RngStream::derive(1, 92, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.poisson(5.0));
  }
}
BENCHMARK(BM_PoissonInversion);

void BM_PoissonPtrs(benchmark::State& state) {
  auto rng = RngStream::derive(1, 93, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.poisson(250.0));
  }
}
BENCHMARK(BM_PoissonPtrs);

void BM_AttenuationLookup(benchmark::State& state) {
  const auto cu = Material::copper();
  double e = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(attenuation_fraction(e, cu, 9e-4));
    e += 0.001;
    if (e > 19.0) e = 2.0;
  }
}
BENCHMARK(BM_AttenuationLookup);

void BM_AcceptanceBlock(benchmark::State& state) {
  const auto layout = layout_preset("vip2-2016");
  const auto cu = Material::copper();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        geometric_acceptance(layout, 7.70, cu, 65536, seed++));
  }
  state.SetItemsProcessed(state.iterations() * 65536);
}
BENCHMARK(BM_AcceptanceBlock)->Unit(benchmark::kMillisecond);

void BM_BackgroundDay(benchmark::State& state) {
  const auto cfg = ExperimentConfig::preset("vip2-2016");
  const CellTable cells(cfg.geometry);
  std::uint64_t slice = 0;
  for (auto _ : state) {
    auto rng = RngStream::derive(cfg.seed, stream::kBackgroundOnSlice, slice++);
    auto events = generate_background_events(cfg.background, cfg.response,
                                             cells, 0.0, 86400.0, rng);
    benchmark::DoNotOptimize(events.data());
    state.counters["events"] = static_cast<double>(events.size());
  }
}
BENCHMARK(BM_BackgroundDay)->Unit(benchmark::kMillisecond);

void BM_ApplyVeto(benchmark::State& state) {
  const auto cfg = ExperimentConfig::preset("vip2-2016");
  const CellTable cells(cfg.geometry);
  auto gen_rng = RngStream::derive(cfg.seed, stream::kBackgroundOnSlice, 0);
  const auto events = generate_background_events(cfg.background, cfg.response,
                                                 cells, 0.0, 86400.0, gen_rng);
  std::uint64_t n = 0;
  for (auto _ : state) {
    auto copy = events;
    auto rng = RngStream::derive(cfg.seed, stream::kVetoOnSlice, n++);
    apply_veto(copy, cfg.veto, rng);
    benchmark::DoNotOptimize(copy.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_ApplyVeto)->Unit(benchmark::kMillisecond);

void BM_Histogram(benchmark::State& state) {
  const auto cfg = ExperimentConfig::preset("vip2-2016");
  const CellTable cells(cfg.geometry);
  auto rng = RngStream::derive(cfg.seed, stream::kBackgroundOnSlice, 0);
  std::vector<EventRecord> events;
  for (int day = 0; day < 5; ++day) {
    auto chunk = generate_background_events(cfg.background, cfg.response,
                                            cells, 0.0, 86400.0, rng);
    events.insert(events.end(), chunk.begin(), chunk.end());
  }
  const auto edges = cfg.analysis.edges();
  for (auto _ : state) {
    benchmark::DoNotOptimize(histogram(events, edges, false, 1.0, 6.0));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_Histogram)->Unit(benchmark::kMillisecond);

void BM_FormatDouble(benchmark::State& state) {
  double v = 1.0 / 3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(format_double(v));
    v *= 1.0000001;
  }
}
BENCHMARK(BM_FormatDouble);

void BM_SimulateDay(benchmark::State& state) {
  auto cfg = ExperimentConfig::preset("vip2-2016");
  cfg.run_plan.days_current = 1.0;
  cfg.run_plan.days_nocurrent = 1.0;
  cfg.analysis.acceptance_samples = 0;
  cfg.analysis.acceptance_override = 0.03;
  for (auto _ : state) {
    cfg.seed++;
    benchmark::DoNotOptimize(simulate_run(cfg));
  }
}
BENCHMARK(BM_SimulateDay)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
