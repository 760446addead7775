#include "wordlearn/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wordlearn/text.hpp"

namespace wordlearn::corpus {

// ─── Segmentation ────────────────────────────────────────────────────────────

std::vector<Dialogue> segment_turns(const std::vector<CharEvent>& events, std::int64_t gap_ms,
                                    const std::vector<VisualObject>& objects) {
  std::map<std::string, std::uint64_t> last_seq;
  for (const auto& e : events) {
    auto [it, fresh] = last_seq.try_emplace(e.session_id, e.seq);
    if (!fresh && e.seq <= it->second)
      throw std::invalid_argument("events not seq-ordered at seq " + std::to_string(e.seq) + " of session " +
                                  e.session_id);
    it->second = e.seq;
  }

  struct Open {
    std::size_t turn;  // index into dialogue.turns
    std::int64_t last_ts;
  };
  using DialogueKey = std::pair<std::string, int>;
  std::map<DialogueKey, Dialogue> by_object;
  std::map<std::pair<DialogueKey, Role>, Open> open;

  for (const auto& e : events) {
    DialogueKey dkey{e.session_id, e.object_index};
    auto [it, fresh] = by_object.try_emplace(dkey);
    Dialogue& dialogue = it->second;
    if (fresh) {
      dialogue.dialogue_id = e.session_id + ":" + std::to_string(e.object_index);
      if (e.object_index >= 0 && static_cast<std::size_t>(e.object_index) < objects.size())
        dialogue.object = objects[static_cast<std::size_t>(e.object_index)];
    }
    auto key = std::make_pair(dkey, e.sender);
    auto found = open.find(key);
    if (found == open.end() || e.server_ts - found->second.last_ts > gap_ms) {
      Turn turn;
      turn.speaker = e.sender;
      turn.start_ms = e.server_ts;
      dialogue.turns.push_back(std::move(turn));
      open[key] = Open{dialogue.turns.size() - 1, e.server_ts};
      found = open.find(key);
    }
    Turn& turn = dialogue.turns[found->second.turn];
    turn.text += encode_utf8(e.ch);
    turn.end_ms = e.server_ts;
    turn.events.push_back(e.seq);
    found->second.last_ts = e.server_ts;
  }

  std::vector<Dialogue> out;
  out.reserve(by_object.size());
  for (auto& [key, dialogue] : by_object) {
    std::stable_sort(dialogue.turns.begin(), dialogue.turns.end(), [](const Turn& a, const Turn& b) {
      if (a.start_ms != b.start_ms) return a.start_ms < b.start_ms;
      return a.events.front() < b.events.front();
    });
    for (std::size_t i = 0; i < dialogue.turns.size(); ++i) dialogue.turns[i].turn_id = static_cast<int>(i);
    out.push_back(std::move(dialogue));
  }
  return out;
}

std::set<std::pair<int, int>> detect_overlaps(const Dialogue& dialogue) {
  std::set<std::pair<int, int>> pairs;
  const auto& turns = dialogue.turns;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    for (std::size_t j = i + 1; j < turns.size(); ++j) {
      const Turn& a = turns[i];
      const Turn& b = turns[j];
      if (a.speaker == b.speaker) continue;
      if (a.start_ms <= b.end_ms && b.start_ms <= a.end_ms)
        pairs.emplace(std::min(a.turn_id, b.turn_id), std::max(a.turn_id, b.turn_id));
    }
  }
  return pairs;
}

// ─── Phenomena ───────────────────────────────────────────────────────────────

namespace {

const std::set<std::string>& filler_words() {
  static const std::set<std::string> words{"urm", "err", "uhh", "um", "uh"};
  return words;
}

bool is_filler(const std::string& token) {
  if (filler_words().count(token)) return true;
  return is_punctuation_token(token) && token.find("...") != std::string::npos;
}

// Length of the correction marker starting at i, 0 if none.
std::size_t marker_at(const std::vector<std::string>& tokens, std::size_t i) {
  if (tokens[i] == "no" || tokens[i] == "sorry") return 1;
  if (tokens[i] == "i" && i + 1 < tokens.size() && tokens[i + 1] == "mean") return 2;
  return 0;
}

bool prefix_related(const std::string& a, const std::string& b) {
  if (a == b) return true;
  const auto& shorter = a.size() < b.size() ? a : b;
  const auto& longer = a.size() < b.size() ? b : a;
  return shorter.size() >= 2 && longer.compare(0, shorter.size(), shorter) == 0;
}

bool has_self_correction(const std::vector<std::string>& tokens) {
  std::vector<std::string> before;
  for (std::size_t i = 0; i < tokens.size();) {
    if (std::size_t len = marker_at(tokens, i)) {
      std::size_t j = i + len;
      while (j < tokens.size() &&
             (is_punctuation_token(tokens[j]) || is_filler(tokens[j]) || marker_at(tokens, j)))
        j += std::max<std::size_t>(1, marker_at(tokens, j));
      if (!before.empty() && j < tokens.size()) {
        for (const auto& prior : before)
          if (prefix_related(prior, tokens[j])) return true;
      }
      i += len;
      continue;
    }
    if (!is_punctuation_token(tokens[i]) && !is_filler(tokens[i])) before.push_back(tokens[i]);
    ++i;
  }
  return false;
}

bool has_self_repetition(const std::vector<std::string>& tokens) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < tokens.size();) {
    if (std::size_t len = marker_at(tokens, i)) {
      i += len;
      continue;
    }
    if (!is_punctuation_token(tokens[i]) && !is_filler(tokens[i])) words.push_back(tokens[i]);
    ++i;
  }
  for (std::size_t n = 1; 2 * n <= words.size(); ++n)
    for (std::size_t i = 0; i + 2 * n <= words.size(); ++i)
      if (std::equal(words.begin() + i, words.begin() + i + n, words.begin() + i + n)) return true;
  return false;
}

bool ends_incomplete(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return true;
  if (text.size() >= 3 && text.substr(text.size() - 3) == "...") return true;
  if (text.size() >= 3 && text.substr(text.size() - 3) == "\xE2\x80\xA6") return true;
  char last = text.back();
  return last != '.' && last != '?' && last != '!';
}

bool starts_uncapitalized(std::string_view text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return !(c >= 'A' && c <= 'Z');
  }
  return false;
}

}  // namespace

std::vector<Phenomenon> detect_phenomena(const Turn& turn, const Turn* previous) {
  const auto tokens = tokenize(turn.text);
  std::vector<Phenomenon> tags;
  if (has_self_correction(tokens)) tags.push_back(Phenomenon::self_correction);
  if (has_self_repetition(tokens)) tags.push_back(Phenomenon::self_repetition);
  if (previous && !tokens.empty() && ends_incomplete(previous->text) && starts_uncapitalized(turn.text))
    tags.push_back(Phenomenon::continuation);
  if (std::any_of(tokens.begin(), tokens.end(), is_filler)) tags.push_back(Phenomenon::filler);
  std::sort(tags.begin(), tags.end());
  return tags;
}

void annotate_phenomena(Dialogue& dialogue) {
  std::set<int> overlapping;
  for (const auto& [a, b] : detect_overlaps(dialogue)) {
    overlapping.insert(a);
    overlapping.insert(b);
  }
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    Turn& turn = dialogue.turns[i];
    turn.phenomena = detect_phenomena(turn, i ? &dialogue.turns[i - 1] : nullptr);
    if (overlapping.count(turn.turn_id)) {
      turn.phenomena.push_back(Phenomenon::overlap);
      std::sort(turn.phenomena.begin(), turn.phenomena.end());
    }
  }
}

// ─── Cleaning ────────────────────────────────────────────────────────────────

std::vector<std::string> default_emoticon_patterns() {
  return {R"(:\))", R"(:\()", R"(:D)", R"(;\))", R"(:P)"};
}

CleaningRules CleaningRules::defaults() {
  CleaningRules rules;
  rules.emoticon_patterns = default_emoticon_patterns();
  return rules;
}

std::string_view to_string(Change::Kind kind) {
  switch (kind) {
    case Change::Kind::substitution: return "substitution";
    case Change::Kind::emoticon: return "emoticon";
    case Change::Kind::excluded: return "excluded";
  }
  return "?";
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || (static_cast<unsigned char>(c) & 0x80);
}

struct Substitution {
  std::string from;
  std::string to;
};

// Keys sorted longest first, ties lexicographic.
std::vector<Substitution> ordered_substitutions(const CleaningRules& rules) {
  std::vector<Substitution> out;
  for (const auto& [from, to] : rules.substitutions) out.push_back({from, to});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.from.size() > b.from.size(); });
  return out;
}

// Whole-word, left to right, longest key first at each position.
std::string substitute(const std::string& text, const std::vector<Substitution>& subs,
                       std::vector<std::pair<std::string, std::string>>* applied) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    bool at_boundary = i == 0 || !is_word_char(text[i - 1]);
    bool replaced = false;
    if (at_boundary) {
      for (const auto& sub : subs) {
        if (sub.from.empty() || text.compare(i, sub.from.size(), sub.from) != 0) continue;
        std::size_t end = i + sub.from.size();
        if (end < text.size() && is_word_char(text[end])) continue;
        out += sub.to;
        if (applied) applied->emplace_back(sub.from, sub.to);
        i = end;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += text[i++];
  }
  return out;
}

struct CompiledEmoticons {
  std::vector<std::regex> patterns;
  bool matches(const std::string& token) const {
    return std::any_of(patterns.begin(), patterns.end(),
                       [&](const std::regex& re) { return std::regex_match(token, re); });
  }
};

std::string strip_emoticons(const std::string& text, const CompiledEmoticons& emoticons,
                            std::vector<std::string>* removed) {
  std::vector<std::string> kept;
  bool any = false;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    if (emoticons.matches(token)) {
      any = true;
      if (removed) removed->push_back(token);
    } else {
      kept.push_back(token);
    }
  }
  if (!any) return text;
  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out += ' ';
    out += kept[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> validate_rules(const CleaningRules& rules) {
  std::vector<std::string> errors;
  for (const auto& [from, to] : rules.substitutions) {
    if (from.empty()) errors.push_back("empty substitution key");
    std::vector<std::pair<std::string, std::string>> hits;
    substitute(to, ordered_substitutions(rules), &hits);
    if (!hits.empty()) errors.push_back("substitution output '" + to + "' re-triggers '" + hits.front().first + "'");
  }
  for (const auto& pattern : rules.emoticon_patterns) {
    try {
      std::regex re(pattern);
    } catch (const std::regex_error&) {
      errors.push_back("invalid emoticon pattern: " + pattern);
    }
  }
  for (std::size_t i = 0; i < rules.excluded.size(); ++i) {
    const auto& a = rules.excluded[i];
    if (a.first_turn > a.last_turn) errors.push_back("empty exclusion span in " + a.dialogue_id);
    for (std::size_t j = i + 1; j < rules.excluded.size(); ++j) {
      const auto& b = rules.excluded[j];
      if (a.dialogue_id == b.dialogue_id && a.first_turn <= b.last_turn && b.first_turn <= a.last_turn)
        errors.push_back("overlapping exclusion spans in " + a.dialogue_id);
    }
  }
  return errors;
}

CleanResult clean(const Corpus& corpus, const CleaningRules& rules) {
  if (auto errors = validate_rules(rules); !errors.empty()) throw ValidationError(std::move(errors));
  const auto subs = ordered_substitutions(rules);
  CompiledEmoticons emoticons;
  for (const auto& p : rules.emoticon_patterns) emoticons.patterns.emplace_back(p);

  CleanResult result;
  result.corpus.lexicon = corpus.lexicon;
  for (const auto& dialogue : corpus.dialogues) {
    Dialogue cleaned = dialogue;
    cleaned.turns.clear();
    for (const auto& turn : dialogue.turns) {
      bool excluded = std::any_of(rules.excluded.begin(), rules.excluded.end(), [&](const ExcludedSpan& s) {
        return s.dialogue_id == dialogue.dialogue_id && turn.turn_id >= s.first_turn && turn.turn_id <= s.last_turn;
      });
      if (excluded) {
        result.report.push_back({Change::Kind::excluded, dialogue.dialogue_id, turn.turn_id, turn.text, ""});
        continue;
      }
      Turn t = turn;
      std::vector<std::pair<std::string, std::string>> applied;
      t.text = substitute(t.text, subs, &applied);
      for (const auto& [from, to] : applied)
        result.report.push_back({Change::Kind::substitution, dialogue.dialogue_id, t.turn_id, from, to});
      std::vector<std::string> removed;
      t.text = strip_emoticons(t.text, emoticons, &removed);
      for (const auto& e : removed)
        result.report.push_back({Change::Kind::emoticon, dialogue.dialogue_id, t.turn_id, e, ""});
      cleaned.turns.push_back(std::move(t));
    }
    result.corpus.dialogues.push_back(std::move(cleaned));
  }
  return result;
}

// ─── Statistics ──────────────────────────────────────────────────────────────

CorpusStats compute_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.dialogue_count = corpus.dialogues.size();
  for (const auto& dialogue : corpus.dialogues) {
    stats.turn_count += dialogue.turns.size();
    ++stats.turns_per_dialogue[dialogue.turns.size()];
    stats.overlap_count += detect_overlaps(dialogue).size();
    for (const auto& turn : dialogue.turns) {
      if (!turn.acts.empty()) ++stats.acts_per_turn[turn.speaker][turn.acts.size()];
      for (const auto& act : turn.acts) ++stats.act_frequency[act.type];
      for (auto tag : turn.phenomena) ++stats.phenomenon_frequency[tag];
    }
  }
  if (stats.dialogue_count) {
    stats.mean_turns_per_dialogue =
        static_cast<double>(stats.turn_count) / static_cast<double>(stats.dialogue_count);
    stats.overlaps_per_dialogue =
        static_cast<double>(stats.overlap_count) / static_cast<double>(stats.dialogue_count);
  }
  return stats;
}

std::string format_mean(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string stats_csv(const CorpusStats& stats) {
  std::ostringstream out;
  out << "section,key,value\n";
  out << "summary,dialogues," << stats.dialogue_count << "\n";
  out << "summary,turns," << stats.turn_count << "\n";
  out << "summary,mean_turns_per_dialogue," << format_mean(stats.mean_turns_per_dialogue) << "\n";
  out << "summary,overlaps," << stats.overlap_count << "\n";
  out << "summary,overlaps_per_dialogue," << format_mean(stats.overlaps_per_dialogue) << "\n";
  for (const auto& [length, count] : stats.turns_per_dialogue)
    out << "turns_per_dialogue," << length << "," << count << "\n";
  for (const auto& [role, hist] : stats.acts_per_turn)
    for (const auto& [acts, count] : hist)
      out << "acts_per_turn_" << to_string(role) << "," << acts << "," << count << "\n";
  for (const auto& [type, count] : stats.act_frequency) out << "act_frequency," << to_string(type) << "," << count << "\n";
  for (const auto& [tag, count] : stats.phenomenon_frequency)
    out << "phenomenon_frequency," << to_string(tag) << "," << count << "\n";
  return out.str();
}

}  // namespace wordlearn::corpus
