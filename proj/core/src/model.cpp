#include "wordlearn/model.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace wordlearn {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '\'';
}

bool is_valid_word(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(), is_word_char);
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> errors)
    : std::invalid_argument(join(errors, "; ")), errors_(std::move(errors)) {}

std::string_view to_string(Role role) { return role == Role::tutor ? "tutor" : "learner"; }

Role role_from_string(std::string_view text) {
  if (text == "tutor") return Role::tutor;
  if (text == "learner") return Role::learner;
  throw std::invalid_argument("unknown role: " + std::string(text));
}

Role other(Role role) { return role == Role::tutor ? Role::learner : Role::tutor; }

std::string_view to_string(Category category) {
  switch (category) {
    case Category::color: return "color";
    case Category::shape: return "shape";
    case Category::both: return "both";
  }
  return "?";
}

Category category_from_string(std::string_view text) {
  if (text == "color") return Category::color;
  if (text == "shape") return Category::shape;
  if (text == "both") return Category::both;
  throw std::invalid_argument("unknown category: " + std::string(text));
}

// ─── Lexicon ─────────────────────────────────────────────────────────────────

const std::vector<LexiconEntry>& AttributeLexicon::entries(Category category) const {
  switch (category) {
    case Category::color: return colors;
    case Category::shape: return shapes;
    case Category::both: break;
  }
  throw std::invalid_argument("lexicon has no entries for category 'both'");
}

const std::string& AttributeLexicon::word_for(Category category, std::string_view label) const {
  for (const auto& e : entries(category))
    if (e.label == label) return e.word;
  throw std::out_of_range("no word for label " + std::string(label));
}

std::optional<Category> AttributeLexicon::category_of(std::string_view word) const {
  for (auto category : kAttributeCategories)
    for (const auto& e : entries(category))
      if (e.word == word) return category;
  return std::nullopt;
}

std::optional<std::string> AttributeLexicon::label_of(std::string_view word) const {
  for (auto category : kAttributeCategories)
    for (const auto& e : entries(category))
      if (e.word == word) return e.label;
  return std::nullopt;
}

AttributeLexicon default_lexicon() {
  return AttributeLexicon{
      {{"red", "sako"}, {"green", "suzuli"}, {"blue", "lomoda"}},
      {{"square", "burchak"}, {"circle", "aylana"}, {"triangle", "wakaki"}},
  };
}

std::vector<std::string> validate_lexicon(const AttributeLexicon& lexicon) {
  std::vector<std::string> errors;
  std::set<std::string> words;
  for (auto category : kAttributeCategories) {
    const auto& list = lexicon.entries(category);
    const std::string name(to_string(category));
    if (list.size() != 3)
      errors.push_back("missing entry: category " + name + " has " + std::to_string(list.size()) +
                       " entries, expected 3");
    std::set<std::string> labels;
    for (const auto& e : list) {
      if (e.label.empty()) errors.push_back("missing entry: empty label in " + name);
      if (!labels.insert(e.label).second)
        errors.push_back("duplicate label '" + e.label + "' in " + name);
      if (!is_valid_word(e.word))
        errors.push_back("invalid word '" + e.word + "' in " + name);
      else if (!words.insert(e.word).second)
        errors.push_back("duplicate word '" + e.word + "'");
    }
  }
  return errors;
}

void require_valid(const AttributeLexicon& lexicon) {
  auto errors = validate_lexicon(lexicon);
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

// ─── Objects ─────────────────────────────────────────────────────────────────

VisualObject make_object(const AttributeLexicon& lexicon, std::size_t color_index,
                         std::size_t shape_index, std::uint64_t noise_seed) {
  std::mt19937_64 rng(noise_seed);
  std::uniform_real_distribution<double> noise(0.0, kFeatureNoise);
  VisualObject object;
  object.color = lexicon.colors.at(color_index).label;
  object.shape = lexicon.shapes.at(shape_index).label;
  object.features.reserve(lexicon.colors.size() + lexicon.shapes.size());
  for (std::size_t i = 0; i < lexicon.colors.size(); ++i) {
    double u = noise(rng);
    object.features.push_back(i == color_index ? 1.0 - u : u);
  }
  for (std::size_t i = 0; i < lexicon.shapes.size(); ++i) {
    double u = noise(rng);
    object.features.push_back(i == shape_index ? 1.0 - u : u);
  }
  return object;
}

std::vector<VisualObject> make_object_sequence(const AttributeLexicon& lexicon, std::size_t count,
                                               std::uint64_t seed) {
  require_valid(lexicon);
  if (count == 0) throw ValidationError({"object count must be at least 1"});
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> cells(9);
  std::vector<VisualObject> out;
  out.reserve(count);
  while (out.size() < count) {
    std::iota(cells.begin(), cells.end(), 0);
    std::shuffle(cells.begin(), cells.end(), rng);
    for (std::size_t cell : cells) {
      if (out.size() == count) break;
      out.push_back(make_object(lexicon, cell / 3, cell % 3, rng()));
    }
  }
  return out;
}

std::string feature_label(const AttributeLexicon& lexicon, const VisualObject& object,
                          Category category) {
  const auto& list = lexicon.entries(category);
  const std::size_t offset = category == Category::color ? 0 : lexicon.colors.size();
  if (object.features.size() < lexicon.colors.size() + lexicon.shapes.size())
    return category == Category::color ? object.color : object.shape;
  std::size_t best = 0;
  for (std::size_t i = 1; i < list.size(); ++i)
    if (object.features[offset + i] > object.features[offset + best]) best = i;
  return list[best].label;
}

// ─── Acts ────────────────────────────────────────────────────────────────────

std::string_view to_string(ActType type) {
  switch (type) {
    case ActType::inform: return "inform";
    case ActType::acknowledgment: return "ack";
    case ActType::rejection: return "reject";
    case ActType::asking: return "ask";
    case ActType::focus: return "focus";
    case ActType::clarification: return "clarify";
    case ActType::checking: return "check";
    case ActType::repetition: return "repeat";
    case ActType::offer_help: return "help";
  }
  return "?";
}

ActType act_type_from_string(std::string_view text) {
  for (auto type : kActTypes)
    if (to_string(type) == text) return type;
  throw std::invalid_argument("unknown act type: " + std::string(text));
}

std::vector<std::string> validate_act(const DialogueAct& act) {
  std::vector<std::string> errors;
  if (act.word && !is_valid_word(*act.word)) errors.push_back("invalid word '" + *act.word + "'");
  if (act.type == ActType::inform && !act.word && !act.category)
    errors.push_back("inform requires a word or category");
  if (act.type == ActType::asking && !act.word && !act.category)
    errors.push_back("asking requires a category or word");
  return errors;
}

std::string canonical_act_string(const DialogueAct& act) {
  std::string out(to_string(act.type));
  out += '(';
  bool first = true;
  auto add = [&](const std::string& arg) {
    if (!first) out += ',';
    out += arg;
    first = false;
  };
  if (act.word)
    add(std::string(act.category ? to_string(*act.category) : "word") + "=" + *act.word);
  else if (act.category)
    add(std::string(to_string(*act.category)));
  if (act.polarity) add(act.polarity == Polarity::pos ? "pol=pos" : "pol=neg");
  out += ')';
  return out;
}

DialogueAct parse_act(std::string_view text) {
  auto open = text.find('(');
  if (open == std::string_view::npos || text.empty() || text.back() != ')')
    throw std::invalid_argument("malformed act: " + std::string(text));
  DialogueAct act;
  act.type = act_type_from_string(text.substr(0, open));
  std::string_view args = text.substr(open + 1, text.size() - open - 2);
  bool have_subject = false;
  while (!args.empty()) {
    auto comma = args.find(',');
    std::string_view arg = args.substr(0, comma);
    args = comma == std::string_view::npos ? std::string_view{} : args.substr(comma + 1);
    if (comma != std::string_view::npos && args.empty())
      throw std::invalid_argument("trailing comma in act: " + std::string(text));
    auto eq = arg.find('=');
    std::string_view key = arg.substr(0, eq);
    if (key == "pol") {
      if (eq == std::string_view::npos || act.polarity)
        throw std::invalid_argument("bad polarity in act: " + std::string(text));
      auto value = arg.substr(eq + 1);
      if (value == "pos") act.polarity = Polarity::pos;
      else if (value == "neg") act.polarity = Polarity::neg;
      else throw std::invalid_argument("bad polarity value: " + std::string(value));
      continue;
    }
    if (have_subject || act.polarity)
      throw std::invalid_argument("unexpected argument order in act: " + std::string(text));
    have_subject = true;
    if (key != "word") act.category = category_from_string(key);
    if (eq != std::string_view::npos) {
      act.word = std::string(arg.substr(eq + 1));
    } else if (key == "word") {
      throw std::invalid_argument("word argument needs a value: " + std::string(text));
    }
  }
  if (auto errors = validate_act(act); !errors.empty()) throw ValidationError(std::move(errors));
  return act;
}

std::string canonical_sequence_string(const ActSequence& acts) {
  std::string out;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    if (i) out += '+';
    out += canonical_act_string(acts[i]);
  }
  return out;
}

ActSequence parse_sequence(std::string_view text) {
  ActSequence acts;
  while (!text.empty()) {
    auto close = text.find(')');
    if (close == std::string_view::npos) throw std::invalid_argument("malformed act sequence");
    acts.push_back(parse_act(text.substr(0, close + 1)));
    text = text.substr(close + 1);
    if (!text.empty()) {
      if (text.front() != '+' || text.size() == 1)
        throw std::invalid_argument("malformed act sequence separator");
      text = text.substr(1);
    }
  }
  return acts;
}

DialogueAct delexicalize(const DialogueAct& act) {
  DialogueAct out = act;
  out.word.reset();
  return out;
}

ActSequence delexicalize(const ActSequence& acts) {
  ActSequence out;
  out.reserve(acts.size());
  for (const auto& act : acts) out.push_back(delexicalize(act));
  return out;
}

// ─── Conditions ──────────────────────────────────────────────────────────────

std::string_view to_string(Knowledge value) {
  switch (value) {
    case Knowledge::unknown: return "unknown";
    case Knowledge::guessed: return "guessed";
    case Knowledge::known: return "known";
  }
  return "?";
}

std::string_view to_string(Context value) {
  switch (value) {
    case Context::color: return "color";
    case Context::shape: return "shape";
    case Context::both: return "both";
    case Context::none: return "none";
  }
  return "?";
}

Knowledge knowledge_from_string(std::string_view text) {
  if (text == "unknown") return Knowledge::unknown;
  if (text == "guessed") return Knowledge::guessed;
  if (text == "known") return Knowledge::known;
  throw std::invalid_argument("unknown knowledge state: " + std::string(text));
}

Context context_from_string(std::string_view text) {
  if (text == "color") return Context::color;
  if (text == "shape") return Context::shape;
  if (text == "both") return Context::both;
  if (text == "none") return Context::none;
  throw std::invalid_argument("unknown context: " + std::string(text));
}

Context to_context(Category category) {
  switch (category) {
    case Category::color: return Context::color;
    case Category::shape: return Context::shape;
    case Category::both: return Context::both;
  }
  return Context::none;
}

std::size_t ConditionVector::index() const {
  return (static_cast<std::size_t>(color_state) * 3 + static_cast<std::size_t>(shape_state)) * 4 +
         static_cast<std::size_t>(pre_context);
}

ConditionVector ConditionVector::from_index(std::size_t index) {
  if (index >= kCardinality) throw std::out_of_range("condition index out of range");
  return ConditionVector{static_cast<Knowledge>(index / 12), static_cast<Knowledge>((index / 4) % 3),
                         static_cast<Context>(index % 4)};
}

std::vector<ConditionVector> ConditionVector::all() {
  std::vector<ConditionVector> out;
  out.reserve(kCardinality);
  for (std::size_t i = 0; i < kCardinality; ++i) out.push_back(from_index(i));
  return out;
}

std::array<int, ConditionVector::kArity> ConditionVector::slots() const {
  return {static_cast<int>(color_state), static_cast<int>(shape_state),
          static_cast<int>(pre_context)};
}

std::string to_string(const ConditionVector& c) {
  return std::string(to_string(c.color_state)) + "," + std::string(to_string(c.shape_state)) + "," +
         std::string(to_string(c.pre_context));
}

ConditionVector conditions_from_string(std::string_view text) {
  auto a = text.find(',');
  auto b = a == std::string_view::npos ? a : text.find(',', a + 1);
  if (b == std::string_view::npos) throw std::invalid_argument("malformed conditions");
  return ConditionVector{knowledge_from_string(text.substr(0, a)),
                         knowledge_from_string(text.substr(a + 1, b - a - 1)),
                         context_from_string(text.substr(b + 1))};
}

// ─── Phenomena ───────────────────────────────────────────────────────────────

std::string_view to_string(Phenomenon tag) {
  switch (tag) {
    case Phenomenon::overlap: return "overlap";
    case Phenomenon::self_correction: return "self_correction";
    case Phenomenon::self_repetition: return "self_repetition";
    case Phenomenon::continuation: return "continuation";
    case Phenomenon::filler: return "filler";
  }
  return "?";
}

Phenomenon phenomenon_from_string(std::string_view text) {
  for (auto tag : kPhenomena)
    if (to_string(tag) == text) return tag;
  throw std::invalid_argument("unknown phenomenon: " + std::string(text));
}

// ─── Characters ──────────────────────────────────────────────────────────────

bool is_storable_char(char32_t ch) {
  if (ch < 0x20 || ch == 0x7F) return false;
  if (ch >= 0x80 && ch <= 0x9F) return false;
  if (ch >= 0xD800 && ch <= 0xDFFF) return false;
  if (ch == 0x2028 || ch == 0x2029) return false;
  return ch <= 0x10FFFF;
}

std::string encode_utf8(char32_t ch) {
  std::string out;
  if (ch < 0x80) {
    out += static_cast<char>(ch);
  } else if (ch < 0x800) {
    out += static_cast<char>(0xC0 | (ch >> 6));
    out += static_cast<char>(0x80 | (ch & 0x3F));
  } else if (ch < 0x10000) {
    out += static_cast<char>(0xE0 | (ch >> 12));
    out += static_cast<char>(0x80 | ((ch >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (ch & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (ch >> 18));
    out += static_cast<char>(0x80 | ((ch >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((ch >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (ch & 0x3F));
  }
  return out;
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3
                                      : (lead >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > text.size()) throw std::invalid_argument("invalid UTF-8");
    char32_t ch = len == 1 ? lead : len == 2 ? (lead & 0x1F) : len == 3 ? (lead & 0x0F) : (lead & 0x07);
    for (std::size_t k = 1; k < len; ++k) {
      auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) throw std::invalid_argument("invalid UTF-8");
      ch = (ch << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (ch < kMin[len]) throw std::invalid_argument("overlong UTF-8");
    out += ch;
    i += len;
  }
  return out;
}

char32_t decode_single_utf8(std::string_view text) {
  auto decoded = decode_utf8(text);
  if (decoded.size() != 1) throw std::invalid_argument("expected exactly one character");
  return decoded.front();
}

// ─── JSON ────────────────────────────────────────────────────────────────────

nlohmann::ordered_json to_json(const AttributeLexicon& lexicon) {
  nlohmann::ordered_json out;
  for (auto category : kAttributeCategories) {
    auto& list = out[std::string(to_string(category))] = nlohmann::ordered_json::array();
    for (const auto& e : lexicon.entries(category)) list.push_back({{"label", e.label}, {"word", e.word}});
  }
  return out;
}

AttributeLexicon lexicon_from_json(const nlohmann::json& json) {
  AttributeLexicon lexicon;
  auto read = [&](const char* key, std::vector<LexiconEntry>& into) {
    if (!json.contains(key)) return;
    const auto& node = json.at(key);
    if (node.is_array()) {
      for (const auto& e : node) into.push_back({e.at("label").get<std::string>(), e.at("word").get<std::string>()});
    } else {
      for (const auto& [label, word] : node.items()) into.push_back({label, word.get<std::string>()});
    }
  };
  read("color", lexicon.colors);
  read("shape", lexicon.shapes);
  return lexicon;
}

nlohmann::ordered_json dictionary_json(const AttributeLexicon& lexicon) {
  nlohmann::ordered_json out;
  for (auto category : kAttributeCategories) {
    auto& map = out[std::string(to_string(category))] = nlohmann::ordered_json::object();
    for (const auto& e : lexicon.entries(category)) map[e.label] = e.word;
  }
  return out;
}

nlohmann::ordered_json to_json(const VisualObject& object) {
  return {{"color", object.color}, {"shape", object.shape}, {"features", object.features}};
}

VisualObject object_from_json(const nlohmann::json& json) {
  VisualObject object;
  object.color = json.at("color").get<std::string>();
  object.shape = json.at("shape").get<std::string>();
  if (json.contains("features")) object.features = json.at("features").get<std::vector<double>>();
  return object;
}

}  // namespace wordlearn
