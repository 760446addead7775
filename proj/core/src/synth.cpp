#include "wordlearn/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "wordlearn/corpus.hpp"
#include "wordlearn/corpus_io.hpp"
#include "wordlearn/dialogue_state.hpp"
#include "wordlearn/random.hpp"
#include "wordlearn/tutor_sim.hpp"

namespace wordlearn::synth {

using ojson = nlohmann::ordered_json;

const std::vector<std::string>& row_names() {
  static const std::vector<std::string> names{
      "start",     "ask_unknown", "guess_right_other_open", "guess_right_done", "guess_wrong",
      "dont_know", "ack_next",    "repeat",                 "silent"};
  return names;
}

ActPolicy default_policy() {
  return {
      {"start", {{"inform(X)", 0.6}, {"ask(X)", 0.4}}},
      {"ask_unknown", {{"inform(X)", 1.0}}},
      {"guess_right_other_open", {{"ack()", 0.3}, {"ack()+focus(Y)", 0.35}, {"ack()+ask(Y)", 0.35}}},
      {"guess_right_done", {{"ack()", 1.0}}},
      {"guess_wrong", {{"reject()+inform(X)", 1.0}}},
      {"dont_know", {{"inform(X)", 1.0}}},
      {"ack_next", {{"inform(X)", 0.3}, {"inform(X)+check()", 0.1}, {"ask(X)", 0.3}, {"focus(X)", 0.3}}},
      {"repeat", {{"inform(X)", 1.0}}},
      {"silent", {{"inform(X)", 1.0}}},
  };
}

namespace {

Category other_attribute(Category c) { return c == Category::color ? Category::shape : Category::color; }

std::string bind(std::string pattern, Category x) {
  const std::string xs(to_string(x));
  const std::string ys(to_string(other_attribute(x)));
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if ((pattern[i] == 'X' || pattern[i] == 'Y') && i > 0 && pattern[i - 1] == '(' &&
        (i + 1 == pattern.size() || pattern[i + 1] == ')' || pattern[i + 1] == ',')) {
      out += pattern[i] == 'X' ? xs : ys;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

}  // namespace

std::map<std::string, double> expand(const Outcomes& outcomes, Category x) {
  std::map<std::string, double> out;
  for (const auto& [pattern, p] : outcomes)
    out[canonical_sequence_string(delexicalize(parse_sequence(bind(pattern, x))))] += p;
  return out;
}

std::vector<std::string> validate_policy(const ActPolicy& policy) {
  std::vector<std::string> errors;
  for (const auto& name : row_names())
    if (!policy.count(name)) errors.push_back("policy row '" + name + "' is missing");
  for (const auto& [name, outcomes] : policy) {
    if (std::find(row_names().begin(), row_names().end(), name) == row_names().end()) {
      errors.push_back("unknown policy row '" + name + "'");
      continue;
    }
    if (outcomes.empty()) errors.push_back("policy row '" + name + "' has no outcomes");
    double sum = 0.0;
    for (const auto& [pattern, p] : outcomes) {
      if (!(p >= 0.0)) errors.push_back("policy row '" + name + "' has a negative probability");
      sum += p;
      try {
        auto acts = parse_sequence(bind(pattern, Category::color));
        if (acts.empty()) errors.push_back("policy row '" + name + "' has an empty outcome");
      } catch (const std::exception& e) {
        errors.push_back("policy row '" + name + "': " + e.what());
      }
    }
    if (!outcomes.empty() && std::abs(sum - 1.0) > 1e-9)
      errors.push_back("policy row '" + name + "' sums to " + std::to_string(sum));
  }
  return errors;
}

std::vector<std::string> validate_config(const SynthConfig& c) {
  auto errors = validate_policy(c.policy);
  for (auto& e : validate_lexicon(c.lexicon)) errors.push_back("lexicon: " + e);
  if (c.dialogues == 0 && c.min_turns == 0) errors.push_back("one of dialogues or min_turns must be positive");
  if (c.objects_per_session == 0) errors.push_back("objects_per_session must be positive");
  if (c.char_gap_min_ms < 1 || c.char_gap_max_ms < c.char_gap_min_ms)
    errors.push_back("character gaps must satisfy 1 <= min <= max");
  if (c.pause_min_ms < 1 || c.pause_max_ms < c.pause_min_ms) errors.push_back("pauses must satisfy 1 <= min <= max");
  for (auto [name, p] : {std::pair{"overlap_prob", c.overlap_prob}, std::pair{"tutor_opens_prob", c.tutor_opens_prob},
                         std::pair{"listen_prob", c.listen_prob}, std::pair{"repeat_prob", c.repeat_prob},
                         std::pair{"filler_prob", c.filler_prob},
                         std::pair{"unsure_correct_prob", c.unsure_correct_prob}})
    if (!(p >= 0.0 && p <= 1.0)) errors.push_back(std::string(name) + " must lie in [0, 1]");
  if (c.listen_prob + c.repeat_prob > 1.0) errors.push_back("listen_prob + repeat_prob must not exceed 1");
  if (c.max_turns_per_dialogue < 2) errors.push_back("max_turns_per_dialogue must be at least 2");
  return errors;
}

SynthConfig config_from_json(const nlohmann::json& json) {
  static const std::set<std::string> known{
      "dialogues",       "min_turns",   "objects_per_session", "char_gap_min_ms", "char_gap_max_ms",
      "pause_min_ms",    "pause_max_ms", "overlap_prob",       "tutor_opens_prob", "listen_prob",
      "repeat_prob",     "filler_prob", "unsure_correct_prob", "max_turns_per_dialogue",
      "determinize_rare", "policy",     "lexicon"};
  std::vector<std::string> errors;
  for (const auto& [key, value] : json.items())
    if (!known.count(key)) errors.push_back("unknown synth config field '" + key + "'");
  if (!errors.empty()) throw ValidationError(errors);

  SynthConfig c;
  auto get = [&](const char* key, auto& field) {
    if (json.contains(key)) field = json.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("dialogues", c.dialogues);
  get("min_turns", c.min_turns);
  get("objects_per_session", c.objects_per_session);
  get("char_gap_min_ms", c.char_gap_min_ms);
  get("char_gap_max_ms", c.char_gap_max_ms);
  get("pause_min_ms", c.pause_min_ms);
  get("pause_max_ms", c.pause_max_ms);
  get("overlap_prob", c.overlap_prob);
  get("tutor_opens_prob", c.tutor_opens_prob);
  get("listen_prob", c.listen_prob);
  get("repeat_prob", c.repeat_prob);
  get("filler_prob", c.filler_prob);
  get("unsure_correct_prob", c.unsure_correct_prob);
  get("max_turns_per_dialogue", c.max_turns_per_dialogue);
  get("determinize_rare", c.determinize_rare);
  if (json.contains("lexicon")) c.lexicon = lexicon_from_json(json.at("lexicon"));
  if (json.contains("policy")) {
    for (const auto& [row, outcomes] : json.at("policy").items()) {
      Outcomes parsed;
      if (outcomes.is_array()) {
        for (const auto& pair : outcomes)
          parsed.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
      } else {
        for (const auto& [pattern, p] : outcomes.items()) parsed.emplace_back(pattern, p.get<double>());
      }
      c.policy[row] = std::move(parsed);
    }
  }
  return c;
}

ojson to_json(const SynthConfig& c) {
  ojson out;
  out["dialogues"] = c.dialogues;
  out["min_turns"] = c.min_turns;
  out["objects_per_session"] = c.objects_per_session;
  out["char_gap_min_ms"] = c.char_gap_min_ms;
  out["char_gap_max_ms"] = c.char_gap_max_ms;
  out["pause_min_ms"] = c.pause_min_ms;
  out["pause_max_ms"] = c.pause_max_ms;
  out["overlap_prob"] = c.overlap_prob;
  out["tutor_opens_prob"] = c.tutor_opens_prob;
  out["listen_prob"] = c.listen_prob;
  out["repeat_prob"] = c.repeat_prob;
  out["filler_prob"] = c.filler_prob;
  out["unsure_correct_prob"] = c.unsure_correct_prob;
  out["max_turns_per_dialogue"] = c.max_turns_per_dialogue;
  out["determinize_rare"] = c.determinize_rare;
  auto& policy = out["policy"] = ojson::object();
  for (const auto& [row, outcomes] : c.policy) {
    ojson entry = ojson::array();
    for (const auto& [pattern, p] : outcomes) entry.push_back(ojson::array({pattern, p}));
    policy[row] = std::move(entry);
  }
  out["lexicon"] = wordlearn::to_json(c.lexicon);
  return out;
}

// ─── Generation ──────────────────────────────────────────────────────────────

namespace {

const std::map<std::string, std::vector<std::string>>& tutor_templates() {
  static const std::map<std::string, std::vector<std::string>> templates{
      {"inform(color)", {"it is {color}.", "this one is {color}.", "{color}.", "the color is {color}.", "that is {color}."}},
      {"inform(shape)", {"it is a {shape}.", "this is a {shape}.", "{shape}.", "the shape is {shape}.", "a {shape}."}},
      {"ask(color)", {"what color is this?", "which color is it?", "do you know what color it is?"}},
      {"ask(shape)", {"what shape is this?", "which shape is it?", "do you know what shape it is?"}},
      {"focus(color)", {"now the color.", "let's do the color.", "look at the color."}},
      {"focus(shape)", {"now the shape.", "let's do the shape.", "look at the shape."}},
      {"check()", {"okay?", "got it?", "right?"}},
      {"ack()", {"yes.", "yes, well done.", "correct.", "that's right."}},
      {"reject()", {"no.", "no, not quite.", "sorry, no."}},
      {"help()", {"do you need help?", "shall i help?", "want a hint?"}},
  };
  return templates;
}

std::string realize_tutor(const ActSequence& acts, std::mt19937_64& rng) {
  std::string out;
  for (const auto& act : acts) {
    const ActSequence single{act};
    const auto key = canonical_sequence_string(delexicalize(single));
    std::string templ;
    if (auto it = tutor_templates().find(key); it != tutor_templates().end()) {
      std::uniform_int_distribution<std::size_t> pick(0, it->second.size() - 1);
      templ = it->second[pick(rng)];
    } else {
      templ = sim::default_template(act);
    }
    if (!out.empty()) out += ' ';
    out += sim::fill_template(templ, single);
  }
  return out;
}

struct PendingTurn {
  Role speaker;
  std::string text;
  ActSequence acts;
  std::vector<std::int64_t> ticks;  // one timestamp per character
};

struct Timeline {
  std::int64_t clock = 0;  // latest character time so far
  std::map<Role, std::int64_t> last_char;
};

class Generator {
 public:
  Generator(const SynthConfig& config, std::uint64_t seed) : c_(config), rng_(derive_seed(seed, "synth")), seed_(seed) {}

  SynthOutput run() {
    std::size_t session = 0;
    std::size_t turns = 0;
    std::size_t dialogues = 0;
    auto done = [&] { return c_.dialogues > 0 ? dialogues >= c_.dialogues : turns >= c_.min_turns; };
    while (!done()) {
      char id[32];
      std::snprintf(id, sizeof id, "s%04zu", session);
      const std::string session_id = id;
      auto objects = make_object_sequence(c_.lexicon, c_.objects_per_session, derive_seed(seed_, "objects", session));
      exposure_.clear();
      Timeline time;
      std::uint64_t seq = 0;
      std::size_t used = 0;
      for (std::size_t i = 0; i < objects.size() && !done(); ++i, ++used) {
        turns += run_dialogue(session_id, static_cast<int>(i), objects[i], time, seq);
        ++dialogues;
      }
      objects.resize(used);
      out_.objects[session_id] = std::move(objects);
      ++session;
    }
    return std::move(out_);
  }

 private:
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  bool chance(double p) { return unit() < p; }
  std::int64_t between(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }

  std::optional<std::string> guess_word(const VisualObject& object, Category x) {
    const auto& correct = c_.lexicon.word_for(x, x == Category::color ? object.color : object.shape);
    int seen = exposure_[correct];
    if (seen >= 2) return correct;
    if (seen == 0) return std::nullopt;
    if (chance(c_.unsure_correct_prob)) return correct;
    std::vector<std::string> others;
    for (const auto& e : c_.lexicon.entries(x))
      if (e.word != correct) others.push_back(e.word);
    return others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng_)];
  }

  std::size_t run_dialogue(const std::string& session_id, int object_index, const VisualObject& object,
                           Timeline& time, std::uint64_t& seq) {
    Dialogue dialogue;
    dialogue.dialogue_id = session_id + ":" + std::to_string(object_index);
    dialogue.object = object;
    std::vector<PendingTurn> turns;
    std::vector<TutorDecision> decisions;

    ConditionVector conditions;
    std::map<Category, bool> rejected;
    ActSequence last_tutor;
    LearnerMove last_move = LearnerMove::silent;
    std::optional<std::string> last_guess;
    bool tutor_next = chance(c_.tutor_opens_prob);
    bool learner_spoke = false;
    bool closing = false;

    while (static_cast<int>(turns.size()) < c_.max_turns_per_dialogue && !closing) {
      if (tutor_next) {
        auto [row, x] = choose_row(conditions, last_move, turns.empty());
        auto distribution = row_distribution(row, x, conditions);
        sim::Distribution d;
        for (const auto& [seq_str, p] : distribution) d.items.emplace_back(seq_str, p);
        auto chosen = sim::sample(d, rng_);
        auto acts = sim::lexicalize(parse_sequence(chosen), c_.lexicon, object);
        decisions.push_back({dialogue.dialogue_id, static_cast<int>(turns.size()), row, x, conditions, distribution, chosen});
        turns.push_back(PendingTurn{Role::tutor, realize_tutor(acts, rng_), acts, {}});

        for (const auto& act : acts) {
          if (act.type == ActType::inform && act.word) ++exposure_[*act.word];
          if (act.type == ActType::acknowledgment && last_guess &&
              (last_move == LearnerMove::guess_color || last_move == LearnerMove::guess_shape))
            ++exposure_[*last_guess];
          if (act.type == ActType::rejection && last_move == LearnerMove::guess_color) rejected[Category::color] = true;
          if (act.type == ActType::rejection && last_move == LearnerMove::guess_shape) rejected[Category::shape] = true;
        }
        conditions = after_tutor_turn(conditions, acts);
        last_tutor = acts;
        last_move = LearnerMove::silent;
        last_guess.reset();
        tutor_next = false;
        if (both_known(conditions)) {
          if (chance(0.5)) {
            auto u = realize_learner_move(LearnerMove::acknowledge, std::nullopt, Category::color, rng_);
            turns.push_back(PendingTurn{Role::learner, u.text, u.acts, {}});
          }
          closing = true;
        }
        continue;
      }

      auto [move, word] = choose_move(object, conditions, last_tutor, rejected, learner_spoke);
      last_move = move;
      last_guess = word;
      tutor_next = true;
      learner_spoke = true;
      if (move == LearnerMove::silent) continue;
      auto context = conditions.pre_context == Context::shape ? Category::shape : Category::color;
      auto u = realize_learner_move(move, word, context, rng_);
      if (chance(c_.filler_prob)) u.text = "um... " + u.text;
      conditions = after_learner_turn(conditions, u.acts, c_.lexicon, &object);
      turns.push_back(PendingTurn{Role::learner, u.text, u.acts, {}});
      if (both_known(conditions) && move != LearnerMove::guess_color && move != LearnerMove::guess_shape) closing = true;
    }

    schedule(turns, time);
    emit(dialogue, turns, session_id, object_index, seq);
    for (auto& d : decisions) out_.decisions.push_back(std::move(d));
    dialogue.outcome.color_identified = conditions.color_state == Knowledge::known;
    dialogue.outcome.shape_identified = conditions.shape_state == Knowledge::known;
    corpus::annotate_phenomena(dialogue);
    const std::size_t count = dialogue.turns.size();
    out_.corpus.dialogues.push_back(std::move(dialogue));
    return count;
  }

  std::pair<LearnerMove, std::optional<std::string>> choose_move(const VisualObject& object,
                                                                 const ConditionVector& conditions,
                                                                 const ActSequence& tutor,
                                                                 std::map<Category, bool>& rejected,
                                                                 bool learner_spoke) {
    std::optional<Category> asked;
    std::optional<Category> informed;
    bool checked = false;
    for (const auto& act : tutor) {
      if (act.type == ActType::checking) checked = true;
      if (act.type == ActType::asking && act.category && !act.word) asked = act.category;
      if (act.type == ActType::inform && act.category && act.polarity != Polarity::neg) informed = act.category;
    }
    if (asked && *asked != Category::both) {
      if (auto w = guess_word(object, *asked))
        return {*asked == Category::color ? LearnerMove::guess_color : LearnerMove::guess_shape, w};
      return {LearnerMove::dont_know, std::nullopt};
    }
    if (informed && learner_spoke && !checked) {
      double u = unit();
      if (u < c_.repeat_prob) return {LearnerMove::repeat_request, std::nullopt};
      if (u < c_.repeat_prob + c_.listen_prob) return {LearnerMove::silent, std::nullopt};
      return {LearnerMove::acknowledge, std::nullopt};
    }
    if (informed) return {LearnerMove::acknowledge, std::nullopt};
    const Category x = focus_attribute(conditions);
    if (!rejected[x])
      if (auto w = guess_word(object, x)) return {x == Category::color ? LearnerMove::guess_color : LearnerMove::guess_shape, w};
    return {x == Category::color ? LearnerMove::ask_color : LearnerMove::ask_shape, std::nullopt};
  }

  std::pair<std::string, Category> choose_row(const ConditionVector& c, LearnerMove m, bool first) {
    if (first) return {"start", Category::color};
    switch (m) {
      case LearnerMove::ask_color: return {"ask_unknown", Category::color};
      case LearnerMove::ask_shape: return {"ask_unknown", Category::shape};
      case LearnerMove::guess_color:
      case LearnerMove::guess_shape: {
        const Category x = m == LearnerMove::guess_color ? Category::color : Category::shape;
        if (state_of(c, x) != Knowledge::known) return {"guess_wrong", x};
        return {state_of(c, other_attribute(x)) == Knowledge::known ? "guess_right_done" : "guess_right_other_open", x};
      }
      case LearnerMove::dont_know:
        return {"dont_know", c.pre_context == Context::shape ? Category::shape : Category::color};
      case LearnerMove::acknowledge: return {"ack_next", focus_attribute(c)};
      case LearnerMove::repeat_request:
        return {"repeat", c.pre_context == Context::shape ? Category::shape : Category::color};
      case LearnerMove::silent: break;
    }
    return {"silent", focus_attribute(c)};
  }

  std::map<std::string, double> row_distribution(const std::string& row, Category x, const ConditionVector& c) const {
    auto full = expand(c_.policy.at(row), x);
    bool rare = state_of(c, other_attribute(x)) == Knowledge::guessed ||
                (row != "guess_wrong" && state_of(c, x) == Knowledge::guessed);
    if (!c_.determinize_rare || !rare) return full;
    const auto* best = &*full.begin();
    for (const auto& entry : full)
      if (entry.second > best->second) best = &entry;
    return {{best->first, 1.0}};
  }

  void schedule(std::vector<PendingTurn>& turns, Timeline& time) {
    std::optional<std::int64_t> prev_start;
    std::optional<Role> prev_speaker;
    for (auto& turn : turns) {
      const std::int64_t normal = time.clock + between(c_.pause_min_ms, c_.pause_max_ms);
      std::int64_t start = normal;
      if (prev_speaker && *prev_speaker != turn.speaker && chance(c_.overlap_prob)) {
        std::int64_t lo = *prev_start + 1;
        if (auto it = time.last_char.find(turn.speaker); it != time.last_char.end())
          lo = std::max(lo, it->second + kGapGuard);
        if (lo <= time.clock) start = between(lo, time.clock);
      }
      std::int64_t t = start;
      auto chars = decode_utf8(turn.text);
      for (std::size_t i = 0; i < chars.size(); ++i) {
        if (i) t += between(c_.char_gap_min_ms, c_.char_gap_max_ms);
        turn.ticks.push_back(t);
      }
      time.last_char[turn.speaker] = t;
      time.clock = std::max(time.clock, t);
      prev_start = start;
      prev_speaker = turn.speaker;
    }
    time.last_char.clear();
  }

  void emit(Dialogue& dialogue, const std::vector<PendingTurn>& turns, const std::string& session_id,
            int object_index, std::uint64_t& seq) {
    struct Tick {
      std::int64_t ts;
      std::size_t turn;
      std::size_t index;
      char32_t ch;
    };
    std::vector<Tick> ticks;
    for (std::size_t i = 0; i < turns.size(); ++i) {
      auto chars = decode_utf8(turns[i].text);
      for (std::size_t k = 0; k < chars.size(); ++k) ticks.push_back({turns[i].ticks[k], i, k, chars[k]});
    }
    std::sort(ticks.begin(), ticks.end(), [](const Tick& a, const Tick& b) {
      return std::tie(a.ts, a.turn, a.index) < std::tie(b.ts, b.turn, b.index);
    });
    for (std::size_t i = 0; i < turns.size(); ++i) {
      Turn turn;
      turn.turn_id = static_cast<int>(i);
      turn.speaker = turns[i].speaker;
      turn.text = turns[i].text;
      turn.start_ms = turns[i].ticks.front();
      turn.end_ms = turns[i].ticks.back();
      turn.acts = turns[i].acts;
      dialogue.turns.push_back(std::move(turn));
    }
    for (const auto& tick : ticks) {
      CharEvent e;
      e.seq = ++seq;
      e.session_id = session_id;
      e.object_index = object_index;
      e.sender = turns[tick.turn].speaker;
      e.ch = tick.ch;
      e.server_ts = tick.ts;
      e.client_ts = tick.ts;
      dialogue.turns[tick.turn].events.push_back(e.seq);
      out_.events.push_back(std::move(e));
    }
    auto& pairs = out_.overlaps[dialogue.dialogue_id];
    for (std::size_t j = 1; j < turns.size(); ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (turns[i].speaker != turns[j].speaker && turns[j].ticks.front() <= turns[i].ticks.back())
          pairs.insert({static_cast<int>(i), static_cast<int>(j)});
  }

  static constexpr std::int64_t kGapGuard = 1101;

  const SynthConfig& c_;
  std::mt19937_64 rng_;
  std::uint64_t seed_;
  std::map<std::string, int> exposure_;
  SynthOutput out_;
};

}  // namespace

SynthOutput generate(const SynthConfig& config, std::uint64_t seed) {
  if (auto errors = validate_config(config); !errors.empty()) throw ValidationError(errors);
  SynthOutput out = Generator(config, seed).run();
  out.corpus.lexicon = config.lexicon;
  return out;
}

std::map<ActType, double> expected_act_frequency(const SynthOutput& output) {
  std::map<ActType, double> freq;
  for (const auto& d : output.decisions)
    for (const auto& [seq_str, p] : d.distribution)
      for (const auto& act : parse_sequence(seq_str)) freq[act.type] += p;
  for (const auto& dialogue : output.corpus.dialogues)
    for (const auto& turn : dialogue.turns)
      if (turn.speaker == Role::learner)
        for (const auto& act : turn.acts) freq[act.type] += 1.0;
  double total = 0.0;
  for (const auto& [type, v] : freq) total += v;
  for (auto& [type, v] : freq) v /= total;
  return freq;
}

std::map<ActType, double> observed_act_frequency(const Corpus& corpus) {
  std::map<ActType, double> freq;
  double total = 0.0;
  for (const auto& dialogue : corpus.dialogues)
    for (const auto& turn : dialogue.turns)
      for (const auto& act : turn.acts) {
        freq[act.type] += 1.0;
        total += 1.0;
      }
  for (auto& [type, v] : freq) v /= total;
  return freq;
}

void write_output(const SynthOutput& output, const SynthConfig& config, std::uint64_t seed,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_file(dir / "log.jsonl", io::write_log(output.events));
  io::save_corpus(dir / "corpus.json", output.corpus);

  ojson gold;
  gold["seed"] = seed;
  gold["config"] = to_json(config);
  auto& decisions = gold["decisions"] = ojson::array();
  for (const auto& d : output.decisions) {
    ojson dist = ojson::object();
    for (const auto& [seq_str, p] : d.distribution) dist[seq_str] = p;
    decisions.push_back({{"dialogue", d.dialogue_id},
                         {"turn_id", d.turn_id},
                         {"row", d.row},
                         {"focus", std::string(to_string(d.focus))},
                         {"conditions", to_string(d.conditions)},
                         {"distribution", std::move(dist)},
                         {"chosen", d.chosen}});
  }
  auto& overlaps = gold["overlaps"] = ojson::object();
  for (const auto& [id, pairs] : output.overlaps) {
    ojson list = ojson::array();
    for (const auto& [a, b] : pairs) list.push_back({a, b});
    overlaps[id] = std::move(list);
  }
  io::write_file(dir / "gold.json", io::dump(gold));

  ojson objects = ojson::object();
  for (const auto& [session, list] : output.objects) {
    ojson arr = ojson::array();
    for (const auto& o : list) arr.push_back(wordlearn::to_json(o));
    objects[session] = std::move(arr);
  }
  io::write_file(dir / "objects.json", io::dump(objects));
}

}  // namespace wordlearn::synth
