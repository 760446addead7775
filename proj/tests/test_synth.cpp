#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "wordlearn/corpus.hpp"
#include "wordlearn/corpus_io.hpp"
#include "wordlearn/synth.hpp"

using namespace wordlearn;
namespace fs = std::filesystem;

namespace {

synth::SynthConfig sized(std::size_t min_turns) {
  synth::SynthConfig config;
  config.min_turns = min_turns;
  return config;
}

const synth::SynthOutput& big_corpus() {
  static const synth::SynthOutput output = synth::generate(sized(10000), 5);
  return output;
}

std::vector<Dialogue> resegment(const synth::SynthOutput& output) {
  std::vector<Dialogue> out;
  std::map<std::string, std::vector<CharEvent>> by_session;
  for (const auto& e : output.events) by_session[e.session_id].push_back(e);
  for (const auto& [session, events] : by_session) {
    auto d = corpus::segment_turns(events, corpus::kDefaultGapMs, output.objects.at(session));
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

}  // namespace

TEST(SynthPolicy, DefaultPolicyIsValid) {
  EXPECT_TRUE(synth::validate_policy(synth::default_policy()).empty());
  for (const auto& row : synth::row_names()) EXPECT_TRUE(synth::default_policy().count(row)) << row;
}

TEST(SynthPolicy, ProbabilitiesMustSumToOne) {
  auto policy = synth::default_policy();
  policy.begin()->second.front().second += 0.5;
  EXPECT_FALSE(synth::validate_policy(policy).empty());
}

TEST(SynthPolicy, ExpandBindsAttributes) {
  const auto expanded = synth::expand({{"reject()+inform(X)", 0.5}, {"inform(Y)", 0.5}}, Category::shape);
  EXPECT_DOUBLE_EQ(expanded.at("reject()+inform(shape)"), 0.5);
  EXPECT_DOUBLE_EQ(expanded.at("inform(color)"), 0.5);
}

TEST(SynthConfig, JsonRoundTrip) {
  auto config = sized(1234);
  config.overlap_prob = 0.25;
  const auto back = synth::config_from_json(synth::to_json(config));
  EXPECT_EQ(back.min_turns, 1234u);
  EXPECT_DOUBLE_EQ(back.overlap_prob, 0.25);
  EXPECT_EQ(back.policy, config.policy);
}

TEST(SynthConfig, RoundTripKeepsGeneration) {
  const auto config = sized(400);
  const auto back = synth::config_from_json(nlohmann::json::parse(synth::to_json(config).dump()));
  EXPECT_EQ(synth::generate(back, 3).events, synth::generate(config, 3).events);
}

TEST(SynthConfig, InvalidConfigThrows) {
  auto config = sized(100);
  config.char_gap_min_ms = 400;
  config.char_gap_max_ms = 300;
  EXPECT_FALSE(synth::validate_config(config).empty());
  EXPECT_THROW(synth::generate(config, 1), ValidationError);
}

TEST(Synth, DeterministicOutputFiles) {
  synth::SynthConfig config;
  config.dialogues = 10;
  const auto dir = fs::temp_directory_path() / "wordlearn_synth_det";
  fs::remove_all(dir);
  synth::write_output(synth::generate(config, 1), config, 1, dir / "a");
  synth::write_output(synth::generate(config, 1), config, 1, dir / "b");
  for (const char* name : {"log.jsonl", "corpus.json", "gold.json", "objects.json"})
    EXPECT_EQ(io::read_file(dir / "a" / name), io::read_file(dir / "b" / name)) << name;
  EXPECT_EQ(io::load_corpus(dir / "a" / "corpus.json").dialogues.size(), 10u);
  fs::remove_all(dir);
}

TEST(Synth, SegmentationRecoversGoldTurns) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto output = synth::generate(sized(1500), seed);
    const auto dialogues = resegment(output);
    ASSERT_EQ(dialogues.size(), output.corpus.dialogues.size());
    for (std::size_t d = 0; d < dialogues.size(); ++d) {
      const auto& got = dialogues[d];
      const auto& gold = output.corpus.dialogues[d];
      ASSERT_EQ(got.dialogue_id, gold.dialogue_id);
      ASSERT_EQ(got.turns.size(), gold.turns.size()) << gold.dialogue_id;
      for (std::size_t t = 0; t < gold.turns.size(); ++t) {
        EXPECT_EQ(got.turns[t].speaker, gold.turns[t].speaker);
        EXPECT_EQ(got.turns[t].text, gold.turns[t].text);
        EXPECT_EQ(got.turns[t].events, gold.turns[t].events);
        EXPECT_EQ(got.turns[t].start_ms, gold.turns[t].start_ms);
        EXPECT_EQ(got.turns[t].end_ms, gold.turns[t].end_ms);
      }
    }
  }
}

TEST(Synth, ReachesMinimumTurns) {
  const auto stats = corpus::compute_stats(big_corpus().corpus);
  EXPECT_GE(stats.turn_count, 10000u);
}

TEST(Synth, TutorFollowsConfiguredPolicy) {
  // Empirical distribution of chosen sequences per (row, conditions) against
  // the distribution the generator drew from.
  std::map<std::string, std::map<std::string, double>> expected;
  std::map<std::string, std::map<std::string, double>> counts;
  std::map<std::string, double> totals;
  for (const auto& d : big_corpus().decisions) {
    const std::string k = d.row + "|" + to_string(d.conditions) + "|" + std::string(to_string(d.focus));
    expected[k] = d.distribution;
    counts[k][d.chosen] += 1;
    totals[k] += 1;
  }
  ASSERT_FALSE(expected.empty());
  for (const auto& [k, dist] : expected) {
    double kld = 0.0;
    for (const auto& [seq, n] : counts[k]) {
      const double p = n / totals[k];
      ASSERT_TRUE(dist.count(seq)) << k << " drew " << seq;
      kld += p * std::log(p / dist.at(seq));
    }
    EXPECT_LE(kld, 0.02) << k << " (" << totals[k] << " draws)";
  }
}

TEST(Synth, ActFrequencyMatchesExpected) {
  const auto expected = synth::expected_act_frequency(big_corpus());
  const auto observed = synth::observed_act_frequency(big_corpus().corpus);
  double l1 = 0.0;
  for (ActType t : kActTypes) {
    const double e = expected.count(t) ? expected.at(t) : 0.0;
    const double o = observed.count(t) ? observed.at(t) : 0.0;
    l1 += std::abs(e - o);
  }
  EXPECT_LE(l1, 0.05);
}

TEST(Synth, DetectedOverlapRateTracksRealized) {
  auto config = sized(5000);
  config.overlap_prob = 0.3;
  const auto output = synth::generate(config, 9);
  std::size_t realized = 0;
  for (const auto& [id, pairs] : output.overlaps) realized += pairs.size();
  std::size_t detected = 0;
  for (const auto& d : resegment(output)) detected += corpus::detect_overlaps(d).size();
  ASSERT_GT(realized, 0u);
  const double turns = static_cast<double>(corpus::compute_stats(output.corpus).turn_count);
  const double realized_rate = realized / turns;
  const double detected_rate = detected / turns;
  EXPECT_NEAR(detected_rate, realized_rate, 0.1 * realized_rate);
}

TEST(Synth, ObjectsCycleThroughGrid) {
  const auto& output = big_corpus();
  for (const auto& [session, objects] : output.objects) {
    std::map<std::pair<std::string, std::string>, int> cells;
    for (std::size_t i = 0; i < std::min<std::size_t>(9, objects.size()); ++i) ++cells[{objects[i].color, objects[i].shape}];
    EXPECT_EQ(cells.size(), std::min<std::size_t>(9, objects.size())) << session;
  }
}
