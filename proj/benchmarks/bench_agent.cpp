#include <benchmark/benchmark.h>

#include <random>

#include "wordlearn/agent.hpp"
#include "wordlearn/synth.hpp"

using namespace wordlearn;

namespace {

const sim::SimModel& tutor() {
  static const sim::SimModel model = [] {
    synth::SynthConfig config;
    config.min_turns = 5000;
    return sim::train(synth::generate(config, 3).corpus, 3, sim::Level::act, config.lexicon);
  }();
  return model;
}

}  // namespace

static void BM_RuleEpisode(benchmark::State& state) {
  const auto lexicon = default_lexicon();
  std::mt19937_64 rng(1);
  std::size_t i = 0;
  for (auto _ : state) {
    agent::GroundingModel grounding(lexicon);
    const auto object = make_object(lexicon, i % 3, (i / 3) % 3, i);
    ++i;
    benchmark::DoNotOptimize(agent::run_episode(agent::rule_policy(), tutor(), object, grounding, {}, rng));
  }
}
BENCHMARK(BM_RuleEpisode);

static void BM_SarsaUpdate(benchmark::State& state) {
  agent::QTable q(agent::kNumActions, 10.0);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::uint64_t> s(0, 575);
  for (auto _ : state) {
    const auto from = s(rng);
    const auto a = agent::select_action(q, from, 0.2, rng);
    const auto to = s(rng);
    agent::sarsa_update(q, from, a, -1.0, std::pair{to, agent::select_action(q, to, 0.2, rng)}, 0.1, 1.0);
  }
}
BENCHMARK(BM_SarsaUpdate);

static void BM_TrainPolicy(benchmark::State& state) {
  auto config = agent::training_config();
  config.instances = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(agent::train_policy(tutor(), default_lexicon(), config, 7));
}
BENCHMARK(BM_TrainPolicy)->Arg(500)->Unit(benchmark::kMillisecond);
