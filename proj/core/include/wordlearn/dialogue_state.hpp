#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wordlearn/model.hpp"

namespace wordlearn {

// Condition updates, seen from the tutor's side of the task.
//
//   learner act                       effect
//   ask(X=w), w correct for object    X -> known,   context -> X
//   ask(X=w), w wrong                 X -> guessed, context -> X
//   ask(X) / repeat(X)                context -> X
//   anything else                     no change
//
//   tutor act                         effect
//   inform(X)                         X -> known,   context -> X
//   ask(X) / focus(X) / clarify(X)    context -> X
//   anything else                     no change
//
// X = both applies to both attributes. A turn that touches both colour and
// shape sets the context to `both` when its last category-bearing act is an
// inform or a guess; otherwise the last mentioned category wins.
ConditionVector after_learner_turn(ConditionVector conditions, const ActSequence& acts,
                                   const AttributeLexicon& lexicon, const VisualObject* object);
ConditionVector after_tutor_turn(ConditionVector conditions, const ActSequence& acts);

bool both_known(const ConditionVector& conditions);

Knowledge state_of(const ConditionVector& conditions, Category category);

// Attribute the conversation is about: the context if it names a single
// attribute that is not known yet, else the first attribute not known
// (colour before shape), else colour.
Category focus_attribute(const ConditionVector& conditions);

// ─── Learner surface forms ───────────────────────────────────────────────────

// What a learner turn does. Shared by the synthetic corpus generator and the
// learning agent so both speak the same surface language.
enum class LearnerMove {
  ask_color,
  ask_shape,
  guess_color,
  guess_shape,
  dont_know,
  acknowledge,
  repeat_request,
  silent,
};

std::string_view to_string(LearnerMove move);

struct LearnerUtterance {
  std::string text;
  ActSequence acts;
};

// `word` is required for guesses. Every template of a move ends in the same
// two tokens, so the last two tokens of an utterance identify its move.
LearnerUtterance realize_learner_move(LearnerMove move, const std::optional<std::string>& word,
                                      Category context, std::mt19937_64& rng);

}  // namespace wordlearn
