#include "wordlearn/tutor_sim.hpp"

#include <algorithm>
#include <limits>

#include "wordlearn/dialogue_state.hpp"
#include "wordlearn/text.hpp"

namespace wordlearn::sim {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Level level) {
  switch (level) {
    case Level::utterance: return "utt";
    case Level::act: return "act";
    case Level::word: return "word";
  }
  return "?";
}

Level level_from_string(std::string_view text) {
  if (text == "utt" || text == "utterance") return Level::utterance;
  if (text == "act") return Level::act;
  if (text == "word") return Level::word;
  throw std::invalid_argument("unknown simulation level: " + std::string(text));
}

std::string to_string(const NGramKey& key) {
  std::string out;
  for (std::size_t i = 0; i < key.words.size(); ++i) {
    if (i) out += ' ';
    out += key.words[i];
  }
  return out + "|" + wordlearn::to_string(key.conditions);
}

// ─── Distribution ────────────────────────────────────────────────────────────

double Distribution::probability(const std::string& item) const {
  auto it = std::lower_bound(items.begin(), items.end(), item,
                             [](const auto& entry, const std::string& value) { return entry.first < value; });
  return it != items.end() && it->first == item ? it->second : 0.0;
}

const std::string& Distribution::argmax() const {
  if (items.empty()) throw std::logic_error("argmax of an empty distribution");
  const auto* best = &items.front();
  for (const auto& entry : items)
    if (entry.second > best->second) best = &entry;
  return best->first;
}

double Distribution::total() const {
  double sum = 0.0;
  for (const auto& [item, p] : items) sum += p;
  return sum;
}

Distribution Distribution::from_counts(const Counts& counts) {
  std::uint64_t total = 0;
  for (const auto& [item, count] : counts) total += count;
  Distribution out;
  out.items.reserve(counts.size());
  for (const auto& [item, count] : counts)
    out.items.emplace_back(item, static_cast<double>(count) / static_cast<double>(total));
  return out;
}

void TemplateStore::add(const std::string& act_sequence, const std::string& templ, std::uint64_t count) {
  templates[act_sequence][templ] += count;
}

// ─── Training ────────────────────────────────────────────────────────────────

namespace {

bool slots_fillable(const std::string& templ, const ActSequence& acts) {
  for (const auto& slot : template_slots(templ)) {
    bool ok = false;
    for (const auto& act : acts) {
      if (!act.category) continue;
      if (slot == "word") ok = true;
      if (slot == "color" && *act.category != Category::shape) ok = true;
      if (slot == "shape" && *act.category != Category::color) ok = true;
    }
    if (!ok) return false;
  }
  return true;
}

void merge_into(Counts& into, const Counts& from) {
  for (const auto& [item, count] : from) into[item] += count;
}

}  // namespace

std::vector<TrainingExample> extract_examples(const Corpus& corpus, const AttributeLexicon& lexicon,
                                              Level level) {
  std::vector<TrainingExample> out;
  for (const auto& dialogue : corpus.dialogues) {
    const VisualObject* object = dialogue.object ? &*dialogue.object : nullptr;
    ConditionVector conditions;
    std::vector<std::string> previous;
    for (const auto& turn : dialogue.turns) {
      auto tokens = delexicalize_tokens(tokenize(turn.text), lexicon);
      if (turn.speaker == Role::learner) {
        conditions = after_learner_turn(conditions, turn.acts, lexicon, object);
      } else {
        switch (level) {
          case Level::act:
            if (turn.acts.empty())
              throw std::invalid_argument("tutor turn " + std::to_string(turn.turn_id) + " of " +
                                          dialogue.dialogue_id + " has no act annotation");
            out.push_back({previous, conditions, canonical_sequence_string(delexicalize(turn.acts))});
            break;
          case Level::utterance:
            out.push_back({previous, conditions, template_from_text(turn.text, lexicon)});
            break;
          case Level::word: {
            auto context = previous;
            for (const auto& token : tokens) {
              out.push_back({context, conditions, token});
              context.push_back(token);
            }
            out.push_back({context, conditions, kEndToken});
            break;
          }
        }
        conditions = after_tutor_turn(conditions, turn.acts);
      }
      previous = std::move(tokens);
    }
  }
  return out;
}

std::vector<std::string> key_words(const std::vector<std::string>& context, int order) {
  const std::size_t want = order > 1 ? static_cast<std::size_t>(order - 1) : 0;
  std::vector<std::string> words;
  words.reserve(want);
  const std::size_t have = std::min(want, context.size());
  for (std::size_t i = have; i < want; ++i) words.push_back(kStartToken);
  words.insert(words.end(), context.end() - static_cast<std::ptrdiff_t>(have), context.end());
  return words;
}

SimModel train_examples(const std::vector<TrainingExample>& examples, int n, Level level,
                        const AttributeLexicon& lexicon) {
  if (n < 1) throw std::invalid_argument("n-gram order must be at least 1");
  if (examples.empty()) throw std::invalid_argument("no training examples at level " + std::string(to_string(level)));
  SimModel model;
  model.level = level;
  model.n = n;
  model.lexicon = lexicon;
  model.counts.orders.resize(static_cast<std::size_t>(n));
  for (const auto& ex : examples) {
    for (int k = 1; k <= n; ++k)
      ++model.counts.orders[static_cast<std::size_t>(k - 1)][NGramKey{key_words(ex.context, k), ex.conditions}][ex.item];
    ++model.global[ex.item];
    model.vocabulary.insert(ex.context.begin(), ex.context.end());
  }
  model.trained = true;
  return model;
}

SimModel train(const Corpus& corpus, int n, Level level, const AttributeLexicon& lexicon) {
  require_valid(lexicon);
  if (corpus.dialogues.empty()) throw std::invalid_argument("empty corpus");
  SimModel model = train_examples(extract_examples(corpus, lexicon, level), n, level, lexicon);
  for (const auto& dialogue : corpus.dialogues) {
    for (const auto& turn : dialogue.turns) {
      if (turn.speaker != Role::tutor || turn.acts.empty()) continue;
      auto delex = delexicalize(turn.acts);
      auto templ = template_from_text(turn.text, lexicon);
      auto key = canonical_sequence_string(delex);
      if (slots_fillable(templ, delex)) model.templates.add(key, templ);
      ++model.utterance_acts[templ][key];
    }
  }
  return model;
}

// ─── Prediction ──────────────────────────────────────────────────────────────

int hamming(const ConditionVector& a, const ConditionVector& b) {
  auto sa = a.slots();
  auto sb = b.slots();
  int d = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) d += sa[i] != sb[i];
  return d;
}

std::string_view to_string(PredictTrace::Stage stage) {
  switch (stage) {
    case PredictTrace::Stage::exact: return "exact";
    case PredictTrace::Stage::nearest: return "nearest";
    case PredictTrace::Stage::conditions_only: return "conditions_only";
    case PredictTrace::Stage::global: return "global";
  }
  return "?";
}

namespace {

// Entries of `table` whose words equal `words`, at minimal Hamming distance.
bool nearest_by_conditions(const std::map<NGramKey, Counts>& table, const std::vector<std::string>& words,
                           const ConditionVector& conditions, Counts& merged, PredictTrace& trace) {
  auto it = table.lower_bound(NGramKey{words, ConditionVector::from_index(0)});
  int best = std::numeric_limits<int>::max();
  std::vector<decltype(it)> chosen;
  for (; it != table.end() && it->first.words == words; ++it) {
    int d = hamming(it->first.conditions, conditions);
    if (d < best) {
      best = d;
      chosen.clear();
    }
    if (d == best) chosen.push_back(it);
  }
  if (chosen.empty()) return false;
  trace.distance = best;
  for (auto entry : chosen) {
    merge_into(merged, entry->second);
    trace.keys.push_back(entry->first);
  }
  return true;
}

}  // namespace

Distribution predict(const SimModel& model, const std::vector<std::string>& context,
                     const ConditionVector& conditions, PredictTrace* trace_out) {
  if (!model.trained) throw std::logic_error("simulation model is not trained");
  PredictTrace trace;
  const auto& orders = model.counts.orders;
  Distribution result;
  bool found = false;

  for (int k = model.n; k >= 2 && !found; --k) {
    NGramKey key{key_words(context, k), conditions};
    const auto& table = orders[static_cast<std::size_t>(k - 1)];
    if (auto it = table.find(key); it != table.end()) {
      trace.stage = PredictTrace::Stage::exact;
      trace.order = k;
      trace.keys = {key};
      result = Distribution::from_counts(it->second);
      found = true;
    }
  }
  for (int k = model.n; k >= 2 && !found; --k) {
    Counts merged;
    if (nearest_by_conditions(orders[static_cast<std::size_t>(k - 1)], key_words(context, k), conditions, merged,
                              trace)) {
      trace.stage = PredictTrace::Stage::nearest;
      trace.order = k;
      result = Distribution::from_counts(merged);
      found = true;
    }
  }
  if (!found && !orders.empty()) {
    Counts merged;
    if (nearest_by_conditions(orders[0], {}, conditions, merged, trace)) {
      trace.stage = PredictTrace::Stage::conditions_only;
      trace.order = 1;
      result = Distribution::from_counts(merged);
      found = true;
    }
  }
  if (!found) {
    trace.stage = PredictTrace::Stage::global;
    trace.order = 0;
    result = Distribution::from_counts(model.global);
  }
  if (trace_out) *trace_out = std::move(trace);
  return result;
}

std::string sample(const Distribution& distribution, std::mt19937_64& rng) {
  if (distribution.items.empty()) throw std::logic_error("sampling an empty distribution");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng) * distribution.total();
  double cumulative = 0.0;
  for (const auto& [item, p] : distribution.items) {
    cumulative += p;
    if (u < cumulative) return item;
  }
  return distribution.items.back().first;
}

std::string sample(const SimModel& model, const std::vector<std::string>& context,
                   const ConditionVector& conditions, std::mt19937_64& rng) {
  return sample(predict(model, context, conditions), rng);
}

std::vector<std::string> context_tokens(const SimModel& model, std::string_view text) {
  return delexicalize_tokens(tokenize(text), model.lexicon);
}

// ─── Realization ─────────────────────────────────────────────────────────────

std::string fill_template(const std::string& templ, const ActSequence& acts) {
  std::string out;
  std::size_t pos = 0;
  while (pos < templ.size()) {
    auto open = templ.find('{', pos);
    if (open == std::string::npos) {
      out.append(templ, pos, std::string::npos);
      break;
    }
    auto close = templ.find('}', open);
    if (close == std::string::npos) throw std::invalid_argument("unterminated slot in template: " + templ);
    out.append(templ, pos, open - pos);
    const std::string slot = templ.substr(open + 1, close - open - 1);
    const std::string* filler = nullptr;
    for (const auto& act : acts) {
      if (!act.word) continue;
      bool match = slot == "word" ||
                   (act.category && slot == "color" && *act.category == Category::color) ||
                   (act.category && slot == "shape" && *act.category == Category::shape);
      if (match) {
        filler = &*act.word;
        break;
      }
    }
    if (!filler) throw std::invalid_argument("unfillable slot {" + slot + "} in template: " + templ);
    out += *filler;
    pos = close + 1;
  }
  return out;
}

std::string default_template(const DialogueAct& act) {
  auto cat = act.category ? std::string(wordlearn::to_string(*act.category)) : std::string("object");
  if (cat == "both") cat = "object";
  switch (act.type) {
    case ActType::inform:
      if (act.polarity == Polarity::neg) return "i don't know.";
      if (act.word && act.category == Category::color) return "it is {color}.";
      if (act.word && act.category == Category::shape) return "it is a {shape}.";
      if (act.word) return "{word}.";
      return "it is like this.";
    case ActType::acknowledgment: return "yes";
    case ActType::rejection: return "no.";
    case ActType::asking:
      if (act.word) return "is it {word}?";
      if (act.category == Category::color) return "what color is this?";
      if (act.category == Category::shape) return "what shape is this?";
      return "what is this object?";
    case ActType::focus: return "let's talk about the " + cat + ".";
    case ActType::clarification:
      if (act.word) return "{word} is for the " + cat + ".";
      return "this is about the " + cat + ".";
    case ActType::checking: return "get it?";
    case ActType::repetition: return "can you repeat the " + cat + " again?";
    case ActType::offer_help: return "need help?";
  }
  return "";
}

namespace {

const std::string* sample_template(const TemplateStore& store, const std::string& key, std::mt19937_64& rng) {
  auto it = store.templates.find(key);
  if (it == store.templates.end() || it->second.empty()) return nullptr;
  std::uint64_t total = 0;
  for (const auto& [templ, count] : it->second) total += count;
  std::uniform_int_distribution<std::uint64_t> dist(0, total - 1);
  std::uint64_t pick = dist(rng);
  for (const auto& [templ, count] : it->second) {
    if (pick < count) return &templ;
    pick -= count;
  }
  return &it->second.rbegin()->first;
}

}  // namespace

std::string realize(const ActSequence& acts, const TemplateStore& store, std::mt19937_64& rng) {
  if (acts.empty()) throw std::invalid_argument("cannot realize an empty act sequence");
  if (const auto* templ = sample_template(store, canonical_sequence_string(delexicalize(acts)), rng))
    return fill_template(*templ, acts);
  std::string out;
  for (const auto& act : acts) {
    const ActSequence single{act};
    const auto* templ = sample_template(store, canonical_sequence_string(delexicalize(single)), rng);
    std::string piece = fill_template(templ ? *templ : default_template(act), single);
    if (!out.empty()) out += ' ';
    out += piece;
  }
  return out;
}

// ─── Interactive use ─────────────────────────────────────────────────────────

ActSequence lexicalize(const ActSequence& acts, const AttributeLexicon& lexicon, const VisualObject& object) {
  ActSequence out;
  for (const auto& act : acts) {
    if (act.type != ActType::inform || act.word || !act.category || act.polarity == Polarity::neg) {
      out.push_back(act);
      continue;
    }
    if (*act.category != Category::shape) {
      DialogueAct a = act;
      a.category = Category::color;
      a.word = lexicon.word_for(Category::color, object.color);
      out.push_back(std::move(a));
    }
    if (*act.category != Category::color) {
      DialogueAct a = act;
      a.category = Category::shape;
      a.word = lexicon.word_for(Category::shape, object.shape);
      out.push_back(std::move(a));
    }
  }
  return out;
}

TutorTurn respond(const SimModel& model, const LearnerTurn& learner, DialogueState& state, std::mt19937_64& rng) {
  if (!model.trained) throw std::logic_error("simulation model is not trained");
  if (model.level == Level::word) throw std::logic_error("respond needs an act- or utterance-level model");

  state.conditions = after_learner_turn(state.conditions, learner.acts, model.lexicon, &state.object);
  auto context = learner.text.empty() ? state.last_tokens : context_tokens(model, learner.text);

  TutorTurn turn;
  turn.item = sample(model, context, state.conditions, rng);
  if (model.level == Level::act) {
    turn.acts = lexicalize(parse_sequence(turn.item), model.lexicon, state.object);
    turn.utterance = realize(turn.acts, model.templates, rng);
  } else {
    if (auto it = model.utterance_acts.find(turn.item); it != model.utterance_acts.end() && !it->second.empty()) {
      const auto* best = &*it->second.begin();
      for (const auto& entry : it->second)
        if (entry.second > best->second) best = &entry;
      turn.acts = lexicalize(parse_sequence(best->first), model.lexicon, state.object);
    }
    const ActSequence object_words{
        {ActType::inform, Category::color, model.lexicon.word_for(Category::color, state.object.color), std::nullopt},
        {ActType::inform, Category::shape, model.lexicon.word_for(Category::shape, state.object.shape), std::nullopt}};
    turn.utterance = fill_template(turn.item, object_words);
  }
  state.conditions = after_tutor_turn(state.conditions, turn.acts);
  state.last_tokens = context_tokens(model, turn.utterance);
  state.complete = both_known(state.conditions);
  return turn;
}

// ─── Persistence ─────────────────────────────────────────────────────────────

namespace {

ojson counts_json(const Counts& counts) {
  ojson out = ojson::object();
  for (const auto& [item, count] : counts) out[item] = count;
  return out;
}

Counts counts_from(const nlohmann::json& json) {
  Counts out;
  for (const auto& [item, count] : json.items()) out[item] = count.get<std::uint64_t>();
  return out;
}

}  // namespace

ojson to_json(const SimModel& model) {
  ojson out;
  out["format"] = "wordlearn-sim";
  out["version"] = kModelFormatVersion;
  out["level"] = std::string(to_string(model.level));
  out["n"] = model.n;
  out["lexicon"] = wordlearn::to_json(model.lexicon);
  auto& orders = out["orders"] = ojson::array();
  for (const auto& table : model.counts.orders) {
    ojson entries = ojson::array();
    for (const auto& [key, counts] : table)
      entries.push_back({{"words", key.words}, {"conditions", wordlearn::to_string(key.conditions)}, {"items", counts_json(counts)}});
    orders.push_back(std::move(entries));
  }
  auto& templates = out["templates"] = ojson::object();
  for (const auto& [seq, counts] : model.templates.templates) templates[seq] = counts_json(counts);
  auto& utt = out["utterance_acts"] = ojson::object();
  for (const auto& [templ, counts] : model.utterance_acts) utt[templ] = counts_json(counts);
  out["vocabulary"] = model.vocabulary;
  out["global"] = counts_json(model.global);
  return out;
}

SimModel model_from_json(const nlohmann::json& json) {
  if (json.value("format", "") != "wordlearn-sim") throw std::invalid_argument("not a simulation model file");
  if (json.value("version", 0) != kModelFormatVersion)
    throw std::invalid_argument("unsupported model version " + std::to_string(json.value("version", 0)));
  SimModel model;
  model.level = level_from_string(json.at("level").get<std::string>());
  model.n = json.at("n").get<int>();
  model.lexicon = lexicon_from_json(json.at("lexicon"));
  for (const auto& table : json.at("orders")) {
    auto& into = model.counts.orders.emplace_back();
    for (const auto& entry : table)
      into[NGramKey{entry.at("words").get<std::vector<std::string>>(),
                    conditions_from_string(entry.at("conditions").get<std::string>())}] = counts_from(entry.at("items"));
  }
  if (static_cast<int>(model.counts.orders.size()) != model.n)
    throw std::invalid_argument("model order tables do not match n");
  for (const auto& [seq, counts] : json.at("templates").items()) model.templates.templates[seq] = counts_from(counts);
  for (const auto& [templ, counts] : json.at("utterance_acts").items()) model.utterance_acts[templ] = counts_from(counts);
  for (const auto& word : json.at("vocabulary")) model.vocabulary.insert(word.get<std::string>());
  model.global = counts_from(json.at("global"));
  model.trained = true;
  return model;
}

}  // namespace wordlearn::sim
