#include <benchmark/benchmark.h>

#include <map>

#include "wordlearn/corpus.hpp"
#include "wordlearn/synth.hpp"

using namespace wordlearn;

namespace {

const synth::SynthOutput& corpus_of(std::size_t turns) {
  static std::map<std::size_t, synth::SynthOutput> cache;
  auto it = cache.find(turns);
  if (it == cache.end()) {
    synth::SynthConfig config;
    config.min_turns = turns;
    it = cache.emplace(turns, synth::generate(config, 1)).first;
  }
  return it->second;
}

}  // namespace

static void BM_SegmentTurns(benchmark::State& state) {
  const auto& out = corpus_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(corpus::segment_turns(out.events));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.events.size()));
}
BENCHMARK(BM_SegmentTurns)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Synthesize(benchmark::State& state) {
  synth::SynthConfig config;
  config.min_turns = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(synth::generate(config, ++seed));
}
BENCHMARK(BM_Synthesize)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_CorpusStats(benchmark::State& state) {
  const auto& out = corpus_of(10000);
  for (auto _ : state) benchmark::DoNotOptimize(corpus::compute_stats(out.corpus));
}
BENCHMARK(BM_CorpusStats);
