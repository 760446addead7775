#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "golden.hpp"
#include "wordlearn/corpus.hpp"
#include "wordlearn/corpus_io.hpp"

using namespace wordlearn;

namespace {

CharEvent key(std::uint64_t seq, Role sender, char32_t ch, std::int64_t ts, int object = 0) {
  CharEvent e;
  e.seq = seq;
  e.session_id = "s";
  e.object_index = object;
  e.sender = sender;
  e.ch = ch;
  e.server_ts = ts;
  e.client_ts = ts;
  return e;
}

std::vector<std::string> texts(const Dialogue& d) {
  std::vector<std::string> out;
  for (const auto& t : d.turns) out.push_back(t.text);
  return out;
}

struct RefTurn {
  Role speaker;
  std::vector<std::uint64_t> seqs;
  std::int64_t start, end;
};

// Per speaker: walk that speaker's characters and cut wherever the gap
// exceeds the threshold; then order all turns by start time and first seq.
std::vector<RefTurn> reference_turns(const std::vector<CharEvent>& events, std::int64_t gap) {
  std::vector<RefTurn> turns;
  for (Role r : {Role::tutor, Role::learner}) {
    std::vector<CharEvent> mine;
    for (const auto& e : events)
      if (e.sender == r) mine.push_back(e);
    for (std::size_t i = 0; i < mine.size();) {
      std::size_t j = i + 1;
      while (j < mine.size() && mine[j].server_ts - mine[j - 1].server_ts <= gap) ++j;
      RefTurn t{r, {}, mine[i].server_ts, mine[j - 1].server_ts};
      for (std::size_t k = i; k < j; ++k) t.seqs.push_back(mine[k].seq);
      turns.push_back(t);
      i = j;
    }
  }
  std::sort(turns.begin(), turns.end(), [](const RefTurn& a, const RefTurn& b) {
    return std::pair(a.start, a.seqs.front()) < std::pair(b.start, b.seqs.front());
  });
  return turns;
}

Turn turn(Role speaker, std::string text, std::int64_t start, std::int64_t end, int id = 0) {
  Turn t;
  t.turn_id = id;
  t.speaker = speaker;
  t.text = std::move(text);
  t.start_ms = start;
  t.end_ms = end;
  return t;
}

Corpus corpus_of(std::vector<std::vector<std::string>> dialogues) {
  Corpus c;
  int d = 0;
  for (auto& texts : dialogues) {
    Dialogue dialogue;
    dialogue.dialogue_id = "d" + std::to_string(d++);
    int i = 0;
    for (auto& text : texts) {
      dialogue.turns.push_back(turn(i % 2 ? Role::learner : Role::tutor, text, i * 2000, i * 2000 + 500, i));
      ++i;
    }
    c.dialogues.push_back(std::move(dialogue));
  }
  return c;
}

}  // namespace

TEST(Segmentation, GoldenFixture) {
  const auto problems = golden::check_segmentation();
  for (const auto& p : problems) ADD_FAILURE() << p;
}

TEST(Segmentation, SmallGapKeepsTurn) {
  const auto d = corpus::segment_turns({key(1, Role::tutor, U'h', 0), key(2, Role::tutor, U'i', 500)});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(texts(d[0]), std::vector<std::string>{"hi"});
}

TEST(Segmentation, GapBoundary) {
  const auto split = corpus::segment_turns({key(1, Role::tutor, U'h', 0), key(2, Role::tutor, U'i', 1101)});
  EXPECT_EQ(texts(split[0]), (std::vector<std::string>{"h", "i"}));
  const auto same = corpus::segment_turns({key(1, Role::tutor, U'h', 0), key(2, Role::tutor, U'i', 1100)});
  EXPECT_EQ(texts(same[0]), std::vector<std::string>{"hi"});
}

TEST(Segmentation, MatchesReferenceOnRandomInterleavings) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> gap(0, 2500);
    std::bernoulli_distribution learner(0.5);
    std::vector<CharEvent> events;
    std::int64_t t = 0;
    for (std::uint64_t i = 1; i <= 50; ++i) {
      t += gap(rng) / (i % 5 == 0 ? 1 : 4);
      events.push_back(key(i, learner(rng) ? Role::learner : Role::tutor, U'a' + (i % 26), t));
    }
    const auto dialogues = corpus::segment_turns(events);
    ASSERT_EQ(dialogues.size(), 1u);
    const auto ref = reference_turns(events, corpus::kDefaultGapMs);
    ASSERT_EQ(dialogues[0].turns.size(), ref.size()) << "seed " << seed;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const auto& got = dialogues[0].turns[i];
      EXPECT_EQ(got.speaker, ref[i].speaker);
      EXPECT_EQ(got.events, ref[i].seqs);
      EXPECT_EQ(got.start_ms, ref[i].start);
      EXPECT_EQ(got.end_ms, ref[i].end);
      EXPECT_EQ(got.turn_id, static_cast<int>(i));
    }
  }
}

TEST(Segmentation, DialoguesPerObjectWithObjects) {
  const auto lexicon = default_lexicon();
  const auto objects = make_object_sequence(lexicon, 2, 1);
  const auto d = corpus::segment_turns({key(1, Role::tutor, U'a', 0, 0), key(2, Role::tutor, U'b', 100, 1)}, 1100, objects);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].dialogue_id, "s:0");
  EXPECT_EQ(d[1].dialogue_id, "s:1");
  EXPECT_EQ(d[1].object, objects[1]);
}

TEST(Segmentation, NonIncreasingSeqThrows) {
  EXPECT_THROW(corpus::segment_turns({key(2, Role::tutor, U'a', 0), key(2, Role::tutor, U'b', 10)}),
               std::invalid_argument);
}

TEST(Overlap, IntersectingIntervals) {
  Dialogue d;
  d.turns = {turn(Role::tutor, "a", 0, 2000, 0), turn(Role::learner, "b", 1500, 2500, 1)};
  EXPECT_EQ(corpus::detect_overlaps(d), (std::set<std::pair<int, int>>{{0, 1}}));
}

TEST(Overlap, TouchingEndpointsCount) {
  Dialogue d;
  d.turns = {turn(Role::tutor, "a", 0, 1000, 0), turn(Role::learner, "b", 1000, 2000, 1)};
  EXPECT_EQ(corpus::detect_overlaps(d).size(), 1u);
}

TEST(Overlap, SameSpeakerOrDisjointIsNotOverlap) {
  Dialogue d;
  d.turns = {turn(Role::tutor, "a", 0, 1000, 0), turn(Role::tutor, "b", 500, 2000, 1),
             turn(Role::learner, "c", 2001, 2100, 2)};
  EXPECT_TRUE(corpus::detect_overlaps(d).empty());
}

TEST(Phenomena, FillerAndSelfRepetition) {
  const auto p = corpus::detect_phenomena(turn(Role::learner, "a sako um... sako wakaki", 0, 0), nullptr);
  EXPECT_EQ(p, (std::vector<Phenomenon>{Phenomenon::self_repetition, Phenomenon::filler}));
}

TEST(Phenomena, SelfCorrectionAndFiller) {
  const auto p =
      corpus::detect_phenomena(turn(Role::tutor, "this is a sako ... no no ... a suzuli burchak", 0, 0), nullptr);
  EXPECT_EQ(p, (std::vector<Phenomenon>{Phenomenon::self_correction, Phenomenon::filler}));
}

TEST(Phenomena, PlainTurnHasNone) {
  const auto previous = turn(Role::tutor, "what is this?", 0, 100);
  EXPECT_TRUE(corpus::detect_phenomena(turn(Role::learner, "hello", 200, 300), &previous).empty());
}

TEST(Phenomena, AnnotateAddsOverlap) {
  Dialogue d;
  d.turns = {turn(Role::tutor, "what is this?", 0, 2000, 0), turn(Role::learner, "sako.", 1500, 2500, 1)};
  corpus::annotate_phenomena(d);
  for (const auto& t : d.turns) EXPECT_NE(std::find(t.phenomena.begin(), t.phenomena.end(), Phenomenon::overlap), t.phenomena.end());
}

TEST(Cleaning, RemovesEmoticons) {
  const auto result = corpus::clean(corpus_of({{"okay :)"}}), corpus::CleaningRules::defaults());
  EXPECT_EQ(result.corpus.dialogues[0].turns[0].text, "okay");
  ASSERT_EQ(result.report.size(), 1u);
  EXPECT_EQ(result.report[0].kind, corpus::Change::Kind::emoticon);
}

TEST(Cleaning, EmptyRulesAreIdentity) {
  const auto input = corpus_of({{"okay :)", "a sqaure"}, {"hi"}});
  const auto result = corpus::clean(input, corpus::CleaningRules{});
  EXPECT_EQ(result.corpus, input);
  EXPECT_TRUE(result.report.empty());
}

TEST(Cleaning, Substitution) {
  corpus::CleaningRules rules;
  rules.substitutions["sqaure"] = "square";
  const auto result = corpus::clean(corpus_of({{"a sqaure"}}), rules);
  EXPECT_EQ(result.corpus.dialogues[0].turns[0].text, "a square");
  ASSERT_EQ(result.report.size(), 1u);
  EXPECT_EQ(result.report[0].kind, corpus::Change::Kind::substitution);
}

TEST(Cleaning, ExcludedSpanDropsTurns) {
  corpus::CleaningRules rules;
  rules.excluded.push_back({"d0", 1, 2});
  const auto result = corpus::clean(corpus_of({{"a", "b", "c", "d"}}), rules);
  EXPECT_EQ(texts(result.corpus.dialogues[0]), (std::vector<std::string>{"a", "d"}));
}

TEST(Cleaning, Idempotent) {
  auto rules = corpus::CleaningRules::defaults();
  rules.substitutions["sqaure"] = "square";
  rules.substitutions["colour"] = "color";
  const auto once = corpus::clean(corpus_of({{"a sqaure :)", "what colour :-)"}, {"xD ok"}}), rules);
  const auto twice = corpus::clean(once.corpus, rules);
  EXPECT_EQ(twice.corpus, once.corpus);
  EXPECT_TRUE(twice.report.empty());
}

TEST(Cleaning, KeepsTiming) {
  const auto input = corpus_of({{"okay :)"}});
  const auto result = corpus::clean(input, corpus::CleaningRules::defaults());
  EXPECT_EQ(result.corpus.dialogues[0].turns[0].start_ms, input.dialogues[0].turns[0].start_ms);
  EXPECT_EQ(result.corpus.dialogues[0].turns[0].end_ms, input.dialogues[0].turns[0].end_ms);
}

TEST(Cleaning, ChainedSubstitutionsAreInvalid) {
  corpus::CleaningRules rules;
  rules.substitutions["a"] = "b";
  rules.substitutions["b"] = "c";
  EXPECT_FALSE(corpus::validate_rules(rules).empty());
  EXPECT_THROW(corpus::clean(corpus_of({{"a"}}), rules), ValidationError);
}

TEST(Stats, MeanOfTwoDialogues) {
  const auto stats = corpus::compute_stats(corpus_of({std::vector<std::string>(10, "x"), std::vector<std::string>(16, "y")}));
  EXPECT_EQ(stats.dialogue_count, 2u);
  EXPECT_EQ(stats.turn_count, 26u);
  EXPECT_EQ(corpus::format_mean(stats.mean_turns_per_dialogue), "13.00");
}

TEST(Stats, ReportedCorpusMeanFormatsAsPublished) { EXPECT_EQ(corpus::format_mean(2454.0 / 177.0), "13.86"); }

TEST(Stats, CsvHasHeader) {
  const auto csv = corpus::stats_csv(corpus::compute_stats(corpus_of({{"a", "b"}})));
  EXPECT_EQ(csv.rfind("section,key,value\n", 0), 0u);
}

TEST(CorpusIo, LogRoundTrip) {
  std::vector<CharEvent> events{key(1, Role::tutor, U'é', 5), key(2, Role::learner, U' ', 9, 3)};
  for (auto& e : events) e.client_ts = 0;  // not part of the log line
  EXPECT_EQ(io::parse_log(io::write_log(events)), events);
}

TEST(CorpusIo, CorpusJsonRoundTrip) {
  auto c = corpus_of({{"a sako", "yes"}});
  c.lexicon = default_lexicon();
  c.dialogues[0].object = make_object_sequence(*c.lexicon, 1, 2)[0];
  c.dialogues[0].turns[0].acts = parse_sequence("inform(color=sako)");
  c.dialogues[0].turns[1].phenomena = {Phenomenon::filler};
  EXPECT_EQ(io::corpus_from_json(io::to_json(c)), c);
}
