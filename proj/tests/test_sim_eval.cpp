#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "wordlearn/sim_eval.hpp"
#include "wordlearn/synth.hpp"
#include "kld_oracle.hpp"

using namespace wordlearn;
using sim::Distribution;

namespace {

Distribution dist(std::vector<std::pair<std::string, double>> items) { return Distribution{std::move(items)}; }

Turn turn(int id, Role speaker, std::string text, std::string acts) {
  Turn t;
  t.turn_id = id;
  t.speaker = speaker;
  t.text = std::move(text);
  t.start_ms = id * 2000;
  t.end_ms = id * 2000 + 300;
  if (!acts.empty()) t.acts = parse_sequence(acts);
  return t;
}

// Five tutor turns, each after a distinct learner utterance.
Corpus five_key_corpus() {
  Dialogue d;
  d.dialogue_id = "toy";
  d.object = make_object(default_lexicon(), 0, 0, 1);
  int id = 0;
  for (const char* learner : {"a b", "c d", "e f", "g h", "i j"}) {
    d.turns.push_back(turn(id, Role::learner, learner, ""));
    ++id;
    d.turns.push_back(turn(id, Role::tutor, "okay", "ack()"));
    ++id;
  }
  Corpus c;
  c.lexicon = default_lexicon();
  c.dialogues.push_back(d);
  return c;
}

std::pair<Corpus, Corpus> split_even_odd(const Corpus& corpus) {
  Corpus even, odd;
  even.lexicon = odd.lexicon = corpus.lexicon;
  for (std::size_t i = 0; i < corpus.dialogues.size(); ++i) (i % 2 ? odd : even).dialogues.push_back(corpus.dialogues[i]);
  return {even, odd};
}

}  // namespace

TEST(Kld, IdenticalIsZero) {
  const auto p = dist({{"a", 0.5}, {"b", 0.5}});
  EXPECT_EQ(eval::kld(p, p), 0.0);
}

TEST(Kld, KnownValue) {
  const auto p = dist({{"a", 0.5}, {"b", 0.5}});
  const auto q = dist({{"a", 0.25}, {"b", 0.75}});
  EXPECT_NEAR(eval::kld(p, q), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(eval::kld(p, q), 0.143841, 1e-6);
}

TEST(Kld, MatchesDirectSummation) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> support{"a", "b", "c", "d", "e"};
  for (int i = 0; i < 1000; ++i) {
    const auto p = oracle::random_distribution(rng, support);
    const auto q = oracle::random_distribution(rng, support);
    const double k = eval::kld(p, q);
    EXPECT_NEAR(k, oracle::kld(p, q, eval::kDefaultEpsilon), 1e-12);
    EXPECT_GE(k, 0.0);
    EXPECT_EQ(eval::kld(p, p), 0.0);
    bool equal = true;
    for (std::size_t j = 0; j < support.size(); ++j) equal &= std::abs(p.items[j].second - q.items[j].second) <= 1e-9;
    EXPECT_EQ(k == 0.0, equal);
  }
}

TEST(Kld, DisjointSupportIsLargeButFinite) {
  const double k = eval::kld(dist({{"a", 1.0}}), dist({{"b", 1.0}}));
  EXPECT_TRUE(std::isfinite(k));
  EXPECT_GT(k, 10.0);
}

TEST(Kld, InvalidDistributionThrows) {
  EXPECT_THROW(eval::validate(dist({{"a", 0.7}})), std::invalid_argument);
  EXPECT_THROW(eval::validate(dist({{"a", 1.2}, {"b", -0.2}})), std::invalid_argument);
  EXPECT_NO_THROW(eval::validate(dist({{"a", 0.3}, {"b", 0.7}})));
}

TEST(Accuracy, SelfTrainedModelIsPerfect) {
  const auto corpus = five_key_corpus();
  const auto model = sim::train(corpus, 3, sim::Level::act, default_lexicon());
  EXPECT_EQ(eval::accuracy(model, corpus), 1.0);
}

TEST(Accuracy, FourOfFiveKeys) {
  const auto corpus = five_key_corpus();
  auto model = sim::train(corpus, 3, sim::Level::act, default_lexicon());
  auto& table = model.counts.orders[2];
  ASSERT_EQ(table.size(), 5u);
  // An item never seen under this key in the evaluation corpus.
  table.begin()->second = {{"inform(color)", 7}};
  const auto report = eval::evaluate(model, corpus, sim::Level::act);
  EXPECT_EQ(report.total_keys, 5u);
  EXPECT_EQ(report.correct_keys, 4u);
  EXPECT_DOUBLE_EQ(report.accuracy, 0.8);
}

TEST(Accuracy, LevelMismatchThrows) {
  const auto corpus = five_key_corpus();
  const auto model = sim::train(corpus, 3, sim::Level::act, default_lexicon());
  EXPECT_THROW(eval::evaluate(model, corpus, sim::Level::utterance), std::invalid_argument);
  EXPECT_THROW(eval::evaluate(model, Corpus{}, sim::Level::act), std::invalid_argument);
}

TEST(Evaluate, SelfConsistencyOnSyntheticCorpus) {
  synth::SynthConfig config;
  config.min_turns = 3000;
  const auto corpus = synth::generate(config, 2).corpus;
  for (auto level : {sim::Level::act, sim::Level::utterance, sim::Level::word}) {
    const auto model = sim::train(corpus, 3, level, config.lexicon);
    const auto report = eval::evaluate(model, corpus, level);
    EXPECT_EQ(report.accuracy, 1.0) << sim::to_string(level);
    EXPECT_EQ(report.mean_kld, 0.0) << sim::to_string(level);
    EXPECT_GT(report.total_keys, 0u);
  }
}

TEST(Evaluate, HeldOutAccuracyIsStableAcrossSeeds) {
  std::vector<double> acc;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    synth::SynthConfig config;
    config.min_turns = 10000;
    const auto [train, test] = split_even_odd(synth::generate(config, seed).corpus);
    const auto model = sim::train(train, 3, sim::Level::act, config.lexicon);
    acc.push_back(eval::evaluate(model, test, sim::Level::act).accuracy);
  }
  const double mean = std::accumulate(acc.begin(), acc.end(), 0.0) / acc.size();
  for (double a : acc) EXPECT_NEAR(a, mean, 0.05);
}

TEST(Evaluate, ActLevelAtLeastUtteranceLevel) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    synth::SynthConfig config;
    config.min_turns = 2000;
    const auto [train, test] = split_even_odd(synth::generate(config, seed).corpus);
    const double act =
        eval::evaluate(sim::train(train, 3, sim::Level::act, config.lexicon), test, sim::Level::act).accuracy;
    const double utt = eval::evaluate(sim::train(train, 3, sim::Level::utterance, config.lexicon), test,
                                      sim::Level::utterance)
                           .accuracy;
    wins += act >= utt;
  }
  EXPECT_GE(wins, 8);
}

TEST(Evaluate, CsvOutputs) {
  const auto corpus = five_key_corpus();
  const auto model = sim::train(corpus, 3, sim::Level::act, default_lexicon());
  const auto report = eval::evaluate(model, corpus, sim::Level::act);
  const auto csv = eval::eval_csv(report);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  const auto summary = eval::summary_csv(report);
  EXPECT_NE(summary.find("all"), std::string::npos);
}
