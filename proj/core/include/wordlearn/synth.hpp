#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlearn/model.hpp"

namespace wordlearn::synth {

// Tutor policy: row name -> outcomes. Outcomes are act-sequence patterns in
// the act grammar with X standing for the attribute in focus and Y for the
// other one, e.g. "reject()+inform(X)".
using Outcomes = std::vector<std::pair<std::string, double>>;
using ActPolicy = std::map<std::string, Outcomes>;

// Rows and when the tutor uses them:
//   start                   tutor opens the dialogue (X is colour)
//   ask_unknown             learner asked about X
//   guess_right_other_open  learner guessed X right, Y still open
//   guess_right_done        learner guessed X right, Y already known
//   guess_wrong             learner guessed X wrong
//   dont_know               learner could not answer a question on X
//   ack_next                learner acknowledged; X is the next open attribute
//   repeat                  learner asked to hear X again
//   silent                  learner let the turn pass; X is the next open attribute
const std::vector<std::string>& row_names();
ActPolicy default_policy();
std::vector<std::string> validate_policy(const ActPolicy& policy);

// Delexicalized act sequences (canonical strings) with their probabilities
// once X and Y are bound.
std::map<std::string, double> expand(const Outcomes& outcomes, Category x);

struct SynthConfig {
  std::size_t dialogues = 0;  // exact dialogue count; 0 means "until min_turns"
  std::size_t min_turns = 0;
  std::size_t objects_per_session = 9;
  std::int64_t char_gap_min_ms = 60;
  std::int64_t char_gap_max_ms = 350;
  std::int64_t pause_min_ms = 1300;
  std::int64_t pause_max_ms = 4000;
  double overlap_prob = 0.1;
  double tutor_opens_prob = 0.7;
  double listen_prob = 0.1;
  double repeat_prob = 0.05;
  double filler_prob = 0.1;
  double unsure_correct_prob = 0.6;
  int max_turns_per_dialogue = 40;
  // Rows fall back to their most likely outcome when a condition slot other
  // than the row's own attribute is "guessed". Such keys are rare, and a
  // deterministic row keeps their estimates exact.
  bool determinize_rare = true;
  ActPolicy policy = default_policy();
  AttributeLexicon lexicon = default_lexicon();
};

SynthConfig config_from_json(const nlohmann::json& json);
nlohmann::ordered_json to_json(const SynthConfig& config);
std::vector<std::string> validate_config(const SynthConfig& config);

// What the tutor drew from for one of its turns.
struct TutorDecision {
  std::string dialogue_id;
  int turn_id = 0;
  std::string row;
  Category focus = Category::color;
  ConditionVector conditions;
  std::map<std::string, double> distribution;  // delexicalized sequence -> p
  std::string chosen;
};

struct SynthOutput {
  std::vector<CharEvent> events;  // seq-ordered per session, sessions in order
  Corpus corpus;                  // gold turns with acts and detected phenomena
  std::vector<TutorDecision> decisions;
  std::map<std::string, std::set<std::pair<int, int>>> overlaps;  // realized, by dialogue id
  std::map<std::string, std::vector<VisualObject>> objects;      // by session id
};

// Deterministic for a given config and seed. Throws ValidationError for an
// invalid config.
SynthOutput generate(const SynthConfig& config, std::uint64_t seed);

// Act-type frequencies expected from the visited policy rows plus the
// learner's acts, normalised to sum to 1.
std::map<ActType, double> expected_act_frequency(const SynthOutput& output);
std::map<ActType, double> observed_act_frequency(const Corpus& corpus);

// Writes log.jsonl, corpus.json, gold.json and objects.json into `dir`.
void write_output(const SynthOutput& output, const SynthConfig& config, std::uint64_t seed,
                  const std::filesystem::path& dir);

}  // namespace wordlearn::synth
