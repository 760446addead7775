#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlearn/model.hpp"

namespace wordlearn::sim {

// What the simulation predicts for the tutor's next turn.
enum class Level { utterance, act, word };

std::string_view to_string(Level level);  // "utt", "act", "word"
Level level_from_string(std::string_view text);

inline const std::string kStartToken = "<s>";
inline const std::string kEndToken = "</u>";
inline constexpr int kDefaultOrder = 3;

// Word context of length k-1 plus the full condition vector.
struct NGramKey {
  std::vector<std::string> words;
  ConditionVector conditions;

  auto operator<=>(const NGramKey&) const = default;
  bool operator==(const NGramKey&) const = default;
};

std::string to_string(const NGramKey& key);  // "w1 w2|unknown,known,color"

using Counts = std::map<std::string, std::uint64_t>;

// Probabilities keyed by item, support sorted in canonical (lexicographic)
// item order.
struct Distribution {
  std::vector<std::pair<std::string, double>> items;

  double probability(const std::string& item) const;
  // Highest probability, ties to the first item in canonical order.
  const std::string& argmax() const;
  double total() const;

  static Distribution from_counts(const Counts& counts);
};

// orders[k-1] holds the order-k table: key words have length k-1.
struct CountTable {
  std::vector<std::map<NGramKey, Counts>> orders;
};

// Delexicalized act sequence -> (utterance template -> count).
struct TemplateStore {
  std::map<std::string, Counts> templates;

  void add(const std::string& act_sequence, const std::string& templ, std::uint64_t count = 1);
};

struct TrainingExample {
  std::vector<std::string> context;  // tokens preceding the item, oldest first
  ConditionVector conditions;
  std::string item;
};

struct SimModel {
  Level level = Level::act;
  int n = kDefaultOrder;
  AttributeLexicon lexicon;
  CountTable counts;
  TemplateStore templates;
  std::map<std::string, Counts> utterance_acts;  // utterance template -> delexicalized act sequences
  std::set<std::string> vocabulary;             // context tokens seen in training
  Counts global;                                // item counts over every example
  bool trained = false;
};

// Examples for every tutor turn (every tutor token plus the end marker at the
// word level). Context is the immediately preceding turn's tokens, whichever
// speaker produced it; word-level context continues into the tutor's own
// partial utterance. Tokens are delexicalized. Conditions are replayed from
// the dialogue's acts and object.
std::vector<TrainingExample> extract_examples(const Corpus& corpus, const AttributeLexicon& lexicon,
                                              Level level);

// Throws std::invalid_argument for an empty corpus or missing act annotations
// where the level needs them.
SimModel train(const Corpus& corpus, int n, Level level, const AttributeLexicon& lexicon);
SimModel train_examples(const std::vector<TrainingExample>& examples, int n, Level level,
                        const AttributeLexicon& lexicon);

// Words of the order-n key for a context: last n-1 tokens, left-padded with <s>.
std::vector<std::string> key_words(const std::vector<std::string>& context, int order);

int hamming(const ConditionVector& a, const ConditionVector& b);

// How predict found its answer.
struct PredictTrace {
  enum class Stage { exact, nearest, conditions_only, global } stage = Stage::global;
  int order = 0;        // order of the table consulted
  int distance = 0;     // Hamming distance for `nearest`
  std::vector<NGramKey> keys;  // keys whose counts were used
};

std::string_view to_string(PredictTrace::Stage stage);

// 1. exact (words, conditions) key at orders n..2,
// 2. keys sharing the word context at the highest order that has any, at
//    minimal Hamming distance (their counts merged),
// 3. the condition-only table (exact, then nearest conditions),
// 4. the global item distribution.
Distribution predict(const SimModel& model, const std::vector<std::string>& context,
                     const ConditionVector& conditions, PredictTrace* trace = nullptr);

std::string sample(const Distribution& distribution, std::mt19937_64& rng);
std::string sample(const SimModel& model, const std::vector<std::string>& context,
                   const ConditionVector& conditions, std::mt19937_64& rng);

// Tokens of a text as the model sees them.
std::vector<std::string> context_tokens(const SimModel& model, std::string_view text);

// ─── Surface realization ─────────────────────────────────────────────────────

// Slots {color}/{shape} take the word of the first act of that category,
// {word} the first word of any act. Throws std::invalid_argument when a slot
// has no filler.
std::string fill_template(const std::string& templ, const ActSequence& acts);

// Built-in single-act fallback templates.
std::string default_template(const DialogueAct& act);

// Samples a stored template for the whole sequence in proportion to its
// count; unseen sequences concatenate per-act realizations in act order.
std::string realize(const ActSequence& acts, const TemplateStore& store, std::mt19937_64& rng);

// ─── Interactive use ─────────────────────────────────────────────────────────

struct DialogueState {
  VisualObject object;
  ConditionVector conditions;
  std::vector<std::string> last_tokens;  // model tokens of the previous turn
  bool complete = false;
};

struct LearnerTurn {
  std::string text;  // empty when the learner stays silent
  ActSequence acts;
};

struct TutorTurn {
  ActSequence acts;  // lexicalized for the current object
  std::string utterance;
  std::string item;  // predicted item as stored in the model
};

// Fills category-only informs/rejections with the object's words.
ActSequence lexicalize(const ActSequence& acts, const AttributeLexicon& lexicon,
                       const VisualObject& object);

// Updates conditions from the learner turn, samples the tutor item, realizes
// it, then applies the tutor turn's own condition updates. Marks the dialogue
// complete once both attributes are known. Act or utterance level only.
TutorTurn respond(const SimModel& model, const LearnerTurn& learner, DialogueState& state,
                  std::mt19937_64& rng);

// ─── Persistence ─────────────────────────────────────────────────────────────

inline constexpr int kModelFormatVersion = 1;

nlohmann::ordered_json to_json(const SimModel& model);
SimModel model_from_json(const nlohmann::json& json);

}  // namespace wordlearn::sim
