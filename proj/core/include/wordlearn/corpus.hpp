#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wordlearn/model.hpp"

namespace wordlearn::corpus {

inline constexpr std::int64_t kDefaultGapMs = 1100;

// ─── Segmentation ────────────────────────────────────────────────────────────

// Groups a seq-ordered event stream into one dialogue per (session, object
// index), ordered by session then object index, and each speaker's
// characters into turns. A speaker's turn continues while the
// gap to that speaker's previous character is <= gap_ms. Turns are ordered by
// start time (ties by first seq) and numbered from 0 within their dialogue.
//
// `objects[i]`, when present, is attached to the dialogue of object index i.
// Throws std::invalid_argument if seq is not strictly increasing within a
// session.
std::vector<Dialogue> segment_turns(const std::vector<CharEvent>& events,
                                    std::int64_t gap_ms = kDefaultGapMs,
                                    const std::vector<VisualObject>& objects = {});

// Pairs of turn ids (first < second) whose closed [start, end] intervals
// intersect and whose speakers differ. Touching endpoints count as overlap.
std::set<std::pair<int, int>> detect_overlaps(const Dialogue& dialogue);

// ─── Phenomena ───────────────────────────────────────────────────────────────

// Assistive keyword heuristics, not gold annotation. `previous` is the turn
// immediately before `turn` in the dialogue (either speaker), if any.
std::vector<Phenomenon> detect_phenomena(const Turn& turn, const Turn* previous);

// Runs detect_phenomena on every turn and adds `overlap` to turns involved in
// an overlap pair.
void annotate_phenomena(Dialogue& dialogue);

// ─── Cleaning ────────────────────────────────────────────────────────────────

struct ExcludedSpan {
  std::string dialogue_id;
  int first_turn = 0;  // turn ids, inclusive
  int last_turn = 0;
};

struct CleaningRules {
  std::map<std::string, std::string> substitutions;
  std::vector<std::string> emoticon_patterns;  // ECMAScript regexes matched against whole tokens
  std::vector<ExcludedSpan> excluded;

  // Default emoticon inventory, no substitutions or exclusions.
  static CleaningRules defaults();
};

std::vector<std::string> default_emoticon_patterns();

// Empty result means the rules are usable: exclusions do not overlap and no
// substitution output re-triggers a substitution.
std::vector<std::string> validate_rules(const CleaningRules& rules);

struct Change {
  enum class Kind { substitution, emoticon, excluded };
  Kind kind;
  std::string dialogue_id;
  int turn_id;
  std::string before;
  std::string after;
};

std::string_view to_string(Change::Kind kind);

struct CleanResult {
  Corpus corpus;
  std::vector<Change> report;
};

// Substitutions are whole-word, longest key first. Timing and seq data are
// never touched. Idempotent. Throws ValidationError for invalid rules.
CleanResult clean(const Corpus& corpus, const CleaningRules& rules);

// ─── Statistics ──────────────────────────────────────────────────────────────

struct CorpusStats {
  std::size_t dialogue_count = 0;
  std::size_t turn_count = 0;
  std::map<std::size_t, std::size_t> turns_per_dialogue;  // length -> dialogues
  double mean_turns_per_dialogue = 0.0;
  std::map<Role, std::map<std::size_t, std::size_t>> acts_per_turn;  // role -> (#acts -> turns)
  std::map<ActType, std::size_t> act_frequency;
  std::map<Phenomenon, std::size_t> phenomenon_frequency;
  std::size_t overlap_count = 0;
  double overlaps_per_dialogue = 0.0;
};

CorpusStats compute_stats(const Corpus& corpus);

// Mean rounded to two decimals, e.g. "13.86".
std::string format_mean(double value);

// Rows of (section, key, value).
std::string stats_csv(const CorpusStats& stats);

}  // namespace wordlearn::corpus
