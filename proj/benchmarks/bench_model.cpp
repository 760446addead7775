#include <benchmark/benchmark.h>

#include <random>

#include "wordlearn/sim_eval.hpp"
#include "wordlearn/synth.hpp"
#include "wordlearn/tutor_sim.hpp"

using namespace wordlearn;

namespace {

const Corpus& training_corpus() {
  static const Corpus corpus = [] {
    synth::SynthConfig config;
    config.min_turns = 10000;
    return synth::generate(config, 2).corpus;
  }();
  return corpus;
}

}  // namespace

static void BM_Train(benchmark::State& state) {
  const auto level = static_cast<sim::Level>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim::train(training_corpus(), 3, level, default_lexicon()));
  state.SetLabel(std::string(sim::to_string(level)));
}
BENCHMARK(BM_Train)
    ->Arg(static_cast<int>(sim::Level::act))
    ->Arg(static_cast<int>(sim::Level::utterance))
    ->Arg(static_cast<int>(sim::Level::word))
    ->Unit(benchmark::kMillisecond);

// Random contexts mix seen and unseen tokens so every back-off stage is hit.
static void BM_Predict(benchmark::State& state) {
  const auto model = sim::train(training_corpus(), 3, sim::Level::word, default_lexicon());
  std::vector<std::string> tokens(model.vocabulary.begin(), model.vocabulary.end());
  tokens.push_back("unseen");
  const auto conditions = ConditionVector::all();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, tokens.size() - 1), cond(0, conditions.size() - 1);
  for (auto _ : state) {
    std::vector<std::string> context{tokens[pick(rng)], tokens[pick(rng)]};
    benchmark::DoNotOptimize(sim::predict(model, context, conditions[cond(rng)]));
  }
}
BENCHMARK(BM_Predict);

static void BM_Evaluate(benchmark::State& state) {
  const auto model = sim::train(training_corpus(), 3, sim::Level::act, default_lexicon());
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate(model, training_corpus(), sim::Level::act));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);
