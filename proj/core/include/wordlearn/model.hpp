#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace wordlearn {

// Raised whenever a value object fails its invariants. `errors` lists every
// violation found, not just the first.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// ─── Roles and attribute categories ──────────────────────────────────────────

enum class Role { tutor, learner };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);
Role other(Role role);

// Attribute categories of the visual objects. `both` only appears as an act
// argument or a discussion context, never as a lexicon category.
enum class Category { color, shape, both };

std::string_view to_string(Category category);
Category category_from_string(std::string_view text);

inline constexpr std::array<Category, 2> kAttributeCategories{Category::color, Category::shape};

// ─── Lexicon and objects ─────────────────────────────────────────────────────

struct LexiconEntry {
  std::string label;  // ground label, e.g. "red"
  std::string word;   // invented word, e.g. "sako"

  bool operator==(const LexiconEntry&) const = default;
};

// Invented attribute vocabulary. Entry order is significant: it fixes the
// 3x3 grid layout and every deterministic tie-break on words.
struct AttributeLexicon {
  std::vector<LexiconEntry> colors;
  std::vector<LexiconEntry> shapes;

  const std::vector<LexiconEntry>& entries(Category category) const;

  // Word for a ground label; throws std::out_of_range when absent.
  const std::string& word_for(Category category, std::string_view label) const;
  // Category of an invented word, if it belongs to the lexicon.
  std::optional<Category> category_of(std::string_view word) const;
  // Ground label named by an invented word, if any.
  std::optional<std::string> label_of(std::string_view word) const;

  bool operator==(const AttributeLexicon&) const = default;
};

// Three attested words (sako=red, suzuli=green, burchak=square), two attested
// shape words assigned to the remaining shapes, and one placeholder colour.
AttributeLexicon default_lexicon();

// Empty result means the lexicon is valid.
std::vector<std::string> validate_lexicon(const AttributeLexicon& lexicon);
void require_valid(const AttributeLexicon& lexicon);

struct VisualObject {
  std::string color;  // ground label
  std::string shape;  // ground label
  // colour one-hot followed by shape one-hot, perturbed by uniform noise and
  // clamped to [0, 1]
  std::vector<double> features;

  bool operator==(const VisualObject&) const = default;
};

inline constexpr double kFeatureNoise = 0.1;

VisualObject make_object(const AttributeLexicon& lexicon, std::size_t color_index,
                         std::size_t shape_index, std::uint64_t noise_seed);

// Objects cycle through shuffled blocks covering all nine grid cells, so every
// cell appears once before any repeats.
std::vector<VisualObject> make_object_sequence(const AttributeLexicon& lexicon, std::size_t count,
                                               std::uint64_t seed);

// Ground label of a category as indicated by the object's feature vector.
std::string feature_label(const AttributeLexicon& lexicon, const VisualObject& object,
                          Category category);

// ─── Dialogue acts ───────────────────────────────────────────────────────────

enum class ActType {
  inform,
  acknowledgment,
  rejection,
  asking,
  focus,
  clarification,
  checking,
  repetition,
  offer_help,
};

inline constexpr std::array<ActType, 9> kActTypes{
    ActType::inform,        ActType::acknowledgment, ActType::rejection,
    ActType::asking,        ActType::focus,          ActType::clarification,
    ActType::checking,      ActType::repetition,     ActType::offer_help,
};

// Short canonical names used in the act grammar ("inform", "ack", ...).
std::string_view to_string(ActType type);
ActType act_type_from_string(std::string_view text);

enum class Polarity { pos, neg };

struct DialogueAct {
  ActType type = ActType::acknowledgment;
  std::optional<Category> category;
  std::optional<std::string> word;
  std::optional<Polarity> polarity;

  bool operator==(const DialogueAct&) const = default;
  auto operator<=>(const DialogueAct&) const = default;
};

std::vector<std::string> validate_act(const DialogueAct& act);

// Grammar: type(arg,...) with args drawn, in this order, from
//   <category>=<word> | word=<word> | <category>     (at most one)
//   pol=pos | pol=neg
// e.g. "inform(color=sako)", "ack()", "ask(shape)", "reject(pol=neg)".
std::string canonical_act_string(const DialogueAct& act);
DialogueAct parse_act(std::string_view text);

using ActSequence = std::vector<DialogueAct>;

// Acts joined with '+', e.g. "reject()+inform(color=sako)".
std::string canonical_sequence_string(const ActSequence& acts);
ActSequence parse_sequence(std::string_view text);

// Drops invented words so the sequence no longer depends on the object.
DialogueAct delexicalize(const DialogueAct& act);
ActSequence delexicalize(const ActSequence& acts);

// ─── Dialogue context conditions ─────────────────────────────────────────────

enum class Knowledge { unknown, guessed, known };
enum class Context { color, shape, both, none };

std::string_view to_string(Knowledge value);
std::string_view to_string(Context value);
Knowledge knowledge_from_string(std::string_view text);
Context context_from_string(std::string_view text);
Context to_context(Category category);

struct ConditionVector {
  Knowledge color_state = Knowledge::unknown;
  Knowledge shape_state = Knowledge::unknown;
  Context pre_context = Context::none;

  static constexpr std::size_t kArity = 3;
  static constexpr std::size_t kCardinality = 3 * 3 * 4;

  // Dense index in [0, 36); inverse of from_index.
  std::size_t index() const;
  static ConditionVector from_index(std::size_t index);
  static std::vector<ConditionVector> all();

  std::array<int, kArity> slots() const;

  bool operator==(const ConditionVector&) const = default;
  auto operator<=>(const ConditionVector&) const = default;
};

// "unknown,known,color"
std::string to_string(const ConditionVector& conditions);
ConditionVector conditions_from_string(std::string_view text);

// ─── Keystrokes, turns, dialogues ────────────────────────────────────────────

enum class Phenomenon { overlap, self_correction, self_repetition, continuation, filler };

inline constexpr std::array<Phenomenon, 5> kPhenomena{
    Phenomenon::overlap, Phenomenon::self_correction, Phenomenon::self_repetition,
    Phenomenon::continuation, Phenomenon::filler};

std::string_view to_string(Phenomenon tag);
Phenomenon phenomenon_from_string(std::string_view text);

struct CharEvent {
  std::uint64_t seq = 0;
  std::string session_id;
  int object_index = 0;
  Role sender = Role::tutor;
  char32_t ch = U' ';
  std::int64_t server_ts = 0;
  std::int64_t client_ts = 0;

  bool operator==(const CharEvent&) const = default;
};

// Printable scalar or plain space: no C0/C1 controls, no DEL, no surrogates.
bool is_storable_char(char32_t ch);

// UTF-8 helpers. decode_single throws unless `text` is exactly one scalar.
std::string encode_utf8(char32_t ch);
char32_t decode_single_utf8(std::string_view text);
std::u32string decode_utf8(std::string_view text);

struct Turn {
  int turn_id = 0;
  Role speaker = Role::tutor;
  std::string text;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::vector<std::uint64_t> events;  // seq numbers
  ActSequence acts;
  std::vector<Phenomenon> phenomena;  // sorted, unique

  bool operator==(const Turn&) const = default;
};

struct DialogueOutcome {
  bool color_identified = false;
  bool shape_identified = false;

  bool operator==(const DialogueOutcome&) const = default;
};

struct Dialogue {
  std::string dialogue_id;
  std::optional<VisualObject> object;  // unknown for logs ingested without a task config
  std::vector<Turn> turns;
  DialogueOutcome outcome;

  bool operator==(const Dialogue&) const = default;
};

struct Corpus {
  std::optional<AttributeLexicon> lexicon;
  std::vector<Dialogue> dialogues;

  bool operator==(const Corpus&) const = default;
};

// ─── JSON mapping ────────────────────────────────────────────────────────────

nlohmann::ordered_json to_json(const AttributeLexicon& lexicon);
AttributeLexicon lexicon_from_json(const nlohmann::json& json);
// {"color": {"red": "sako", ...}, "shape": {...}} as shown to the tutor.
nlohmann::ordered_json dictionary_json(const AttributeLexicon& lexicon);

nlohmann::ordered_json to_json(const VisualObject& object);
VisualObject object_from_json(const nlohmann::json& json);

}  // namespace wordlearn
