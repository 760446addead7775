#include "wordlearn/dialogue_state.hpp"

#include <array>

namespace wordlearn {

namespace {

Knowledge& slot(ConditionVector& c, Category category) {
  return category == Category::color ? c.color_state : c.shape_state;
}

// Tracks the context a turn leaves behind.
struct ContextTracker {
  bool color = false;
  bool shape = false;
  std::optional<Context> last;
  bool last_is_assertion = false;

  void mention(Category category, bool assertion) {
    if (category != Category::shape) color = true;
    if (category != Category::color) shape = true;
    last = to_context(category);
    last_is_assertion = assertion;
  }

  Context result(Context previous) const {
    if (!last) return previous;
    if (last_is_assertion && color && shape) return Context::both;
    return *last;
  }
};

}  // namespace

Knowledge state_of(const ConditionVector& c, Category category) {
  return category == Category::color ? c.color_state : c.shape_state;
}

ConditionVector after_learner_turn(ConditionVector c, const ActSequence& acts,
                                   const AttributeLexicon& lexicon, const VisualObject* object) {
  ContextTracker tracker;
  for (const auto& act : acts) {
    if (act.type == ActType::asking && act.word) {
      auto category = act.category ? act.category : lexicon.category_of(*act.word);
      if (!category || *category == Category::both) continue;
      bool correct = false;
      if (object) {
        const auto& label = *category == Category::color ? object->color : object->shape;
        correct = lexicon.word_for(*category, label) == *act.word;
      }
      slot(c, *category) = correct ? Knowledge::known : Knowledge::guessed;
      tracker.mention(*category, true);
    } else if ((act.type == ActType::asking || act.type == ActType::repetition) && act.category) {
      tracker.mention(*act.category, false);
    }
  }
  c.pre_context = tracker.result(c.pre_context);
  return c;
}

ConditionVector after_tutor_turn(ConditionVector c, const ActSequence& acts) {
  ContextTracker tracker;
  for (const auto& act : acts) {
    if (!act.category) continue;
    if (act.type == ActType::inform) {
      if (*act.category != Category::shape) c.color_state = Knowledge::known;
      if (*act.category != Category::color) c.shape_state = Knowledge::known;
      tracker.mention(*act.category, true);
    } else if (act.type == ActType::asking || act.type == ActType::focus ||
               act.type == ActType::clarification) {
      tracker.mention(*act.category, false);
    }
  }
  c.pre_context = tracker.result(c.pre_context);
  return c;
}

bool both_known(const ConditionVector& c) {
  return c.color_state == Knowledge::known && c.shape_state == Knowledge::known;
}

Category focus_attribute(const ConditionVector& c) {
  if (c.pre_context == Context::color && c.color_state != Knowledge::known) return Category::color;
  if (c.pre_context == Context::shape && c.shape_state != Knowledge::known) return Category::shape;
  if (c.color_state != Knowledge::known) return Category::color;
  if (c.shape_state != Knowledge::known) return Category::shape;
  return Category::color;
}

// ─── Learner surface forms ───────────────────────────────────────────────────

std::string_view to_string(LearnerMove move) {
  switch (move) {
    case LearnerMove::ask_color: return "ask_color";
    case LearnerMove::ask_shape: return "ask_shape";
    case LearnerMove::guess_color: return "guess_color";
    case LearnerMove::guess_shape: return "guess_shape";
    case LearnerMove::dont_know: return "dont_know";
    case LearnerMove::acknowledge: return "acknowledge";
    case LearnerMove::repeat_request: return "repeat_request";
    case LearnerMove::silent: return "silent";
  }
  return "?";
}

namespace {

template <std::size_t N>
std::string pick(const std::array<const char*, N>& options, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, N - 1);
  return options[dist(rng)];
}

std::string fill_word(std::string templ, const std::string& word) {
  auto pos = templ.find("{w}");
  if (pos != std::string::npos) templ.replace(pos, 3, word);
  return templ;
}

}  // namespace

LearnerUtterance realize_learner_move(LearnerMove move, const std::optional<std::string>& word,
                                      Category context, std::mt19937_64& rng) {
  static constexpr std::array<const char*, 3> kAskColor{"what is the color?", "and the color?",
                                                        "so what color?"};
  static constexpr std::array<const char*, 3> kAskShape{"what is the shape?", "and the shape?",
                                                        "so what shape?"};
  static constexpr std::array<const char*, 4> kGuess{"is it {w}?", "{w}?", "is this {w}?",
                                                     "so it is {w}?"};
  static constexpr std::array<const char*, 3> kDontKnow{"i don't know.", "sorry, i don't know.",
                                                        "hmm... i don't know."};
  static constexpr std::array<const char*, 3> kAck{"okay, i see.", "i see.", "ah okay, i see."};
  static constexpr std::array<const char*, 3> kRepeat{"can you say that again?", "sorry, again?",
                                                      "say it again?"};

  auto attribute = context == Category::both ? Category::color : context;
  LearnerUtterance out;
  switch (move) {
    case LearnerMove::ask_color:
      out.text = pick(kAskColor, rng);
      out.acts = {{ActType::asking, Category::color, std::nullopt, std::nullopt}};
      break;
    case LearnerMove::ask_shape:
      out.text = pick(kAskShape, rng);
      out.acts = {{ActType::asking, Category::shape, std::nullopt, std::nullopt}};
      break;
    case LearnerMove::guess_color:
    case LearnerMove::guess_shape: {
      if (!word) throw std::invalid_argument("a guess needs a word");
      auto category = move == LearnerMove::guess_color ? Category::color : Category::shape;
      out.text = fill_word(pick(kGuess, rng), *word);
      out.acts = {{ActType::asking, category, *word, std::nullopt}};
      break;
    }
    case LearnerMove::dont_know:
      out.text = pick(kDontKnow, rng);
      out.acts = {{ActType::inform, attribute, std::nullopt, Polarity::neg}};
      break;
    case LearnerMove::acknowledge:
      out.text = pick(kAck, rng);
      out.acts = {{ActType::acknowledgment, std::nullopt, std::nullopt, std::nullopt}};
      break;
    case LearnerMove::repeat_request:
      out.text = pick(kRepeat, rng);
      out.acts = {{ActType::repetition, attribute, std::nullopt, std::nullopt}};
      break;
    case LearnerMove::silent:
      break;
  }
  return out;
}

}  // namespace wordlearn
