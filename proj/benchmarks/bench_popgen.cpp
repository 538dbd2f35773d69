#include <benchmark/benchmark.h>

#include <filesystem>

#include "popgen/harmony_hmm.h"
#include "popgen/pipeline.h"
#include "popgen/sarma.h"

namespace {

using namespace popgen;

const std::filesystem::path kData = POPGEN_DATA_DIR;

void BM_ViterbiTopN(benchmark::State& state) {
  const DecorationHmm model = load_hmm(kData / "models" / "decoration_hmm.json");
  const auto progression = load_progression(kData / "fixtures" / "progression_c_am_f_g.txt");
  const auto obs = extract_observation_sequence(progression).observations;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(viterbi_top_n(model, obs, n));
}
BENCHMARK(BM_ViterbiTopN)->Arg(1)->Arg(5)->Arg(20);

void BM_SarmaSimulate(benchmark::State& state) {
  SarmaParams params;
  params.phi = 0.5;
  params.theta = 0.3;
  const int length = static_cast<int>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(params, length, ++seed));
  state.SetItemsProcessed(state.iterations() * length);
}
BENCHMARK(BM_SarmaSimulate)->Arg(64)->Arg(4096)->Arg(100000);

void BM_SeriesAnalysis(benchmark::State& state) {
  SarmaParams params;
  params.phi = 0.5;
  const auto series = simulate(params, 100000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_series(series, 20));
}
BENCHMARK(BM_SeriesAnalysis);

void BM_Pipeline(benchmark::State& state) {
  PipelineConfig cfg = load_pipeline_config(kData / "config" / "pipeline.json");
  for (auto _ : state) {
    ++cfg.seed;
    benchmark::DoNotOptimize(run_pipeline(cfg));
  }
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
