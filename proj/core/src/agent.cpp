#include "wordlearn/agent.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "wordlearn/dialogue_state.hpp"
#include "wordlearn/random.hpp"

namespace wordlearn::agent {

// ─── State ───────────────────────────────────────────────────────────────────

std::uint8_t tutor_act_mask(const ActSequence& acts) {
  std::uint8_t mask = 0;
  for (const auto& act : acts) {
    switch (act.type) {
      case ActType::asking: mask |= kTutorAsked; break;
      case ActType::inform:
        if (act.polarity != Polarity::neg) mask |= kTutorInformed;
        break;
      case ActType::checking: mask |= kTutorChecked; break;
      case ActType::offer_help: mask |= kTutorOfferedHelp; break;
      default: break;
    }
  }
  return mask;
}

std::uint64_t AgentState::key() const {
  return ((static_cast<std::uint64_t>(c_status) * 3 + static_cast<std::uint64_t>(s_status)) * 16 + prev_tutor_acts) * 4 +
         static_cast<std::uint64_t>(pre_context);
}

AgentState AgentState::from_key(std::uint64_t key) {
  if (key >= kCount) throw std::out_of_range("agent state key out of range");
  AgentState s;
  s.pre_context = static_cast<Context>(key % 4);
  key /= 4;
  s.prev_tutor_acts = static_cast<std::uint8_t>(key % 16);
  key /= 16;
  s.s_status = static_cast<int>(key % 3);
  s.c_status = static_cast<int>(key / 3);
  return s;
}

std::string to_string(const AgentState& s) {
  std::string acts;
  if (s.prev_tutor_acts & kTutorAsked) acts += "ask|";
  if (s.prev_tutor_acts & kTutorInformed) acts += "inform|";
  if (s.prev_tutor_acts & kTutorChecked) acts += "check|";
  if (s.prev_tutor_acts & kTutorOfferedHelp) acts += "help|";
  if (!acts.empty()) acts.pop_back();
  return "(" + std::to_string(s.c_status) + "," + std::to_string(s.s_status) + ",{" + acts + "}," +
         std::string(wordlearn::to_string(s.pre_context)) + ")";
}

int status_for(double confidence, bool explicit_known, double threshold) {
  if (explicit_known || confidence >= threshold) return 2;
  if (confidence > 0.5) return 1;
  return 0;
}

AgentState encode_state(double color_confidence, double shape_confidence, bool color_explicit, bool shape_explicit,
                        const ActSequence& prev_tutor_acts, Context pre_context, double threshold) {
  AgentState s;
  s.c_status = status_for(color_confidence, color_explicit, threshold);
  s.s_status = status_for(shape_confidence, shape_explicit, threshold);
  s.prev_tutor_acts = tutor_act_mask(prev_tutor_acts);
  s.pre_context = pre_context;
  return s;
}

// ─── Actions ─────────────────────────────────────────────────────────────────

std::string_view to_string(AgentAction action) {
  switch (action) {
    case AgentAction::ask_wh_color: return "ask_wh(color)";
    case AgentAction::ask_wh_shape: return "ask_wh(shape)";
    case AgentAction::guess_polar_color: return "guess_polar(color)";
    case AgentAction::guess_polar_shape: return "guess_polar(shape)";
    case AgentAction::dont_know: return "dont_know";
    case AgentAction::acknowledge: return "acknowledge";
    case AgentAction::listen: return "listen";
    case AgentAction::request_repetition: return "request_repetition";
  }
  return "?";
}

AgentAction action_from_string(std::string_view text) {
  for (auto a : kActions)
    if (to_string(a) == text) return a;
  throw std::invalid_argument("unknown agent action: " + std::string(text));
}

namespace {

std::size_t index_of(AgentAction a) { return static_cast<std::size_t>(a); }

}  // namespace

// ─── Q table and SARSA ───────────────────────────────────────────────────────

std::vector<std::string> validate(const LearningParams& p) {
  std::vector<std::string> errors;
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) errors.push_back("alpha must lie in [0, 1]");
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) errors.push_back("gamma must lie in [0, 1]");
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) errors.push_back("epsilon must lie in [0, 1]");
  return errors;
}

QTable::QTable(std::size_t num_actions, double initial_value)
    : num_actions_(num_actions), initial_value_(initial_value) {
  if (num_actions == 0) throw std::invalid_argument("a Q table needs at least one action");
}

double QTable::value(std::uint64_t state, std::size_t action) const {
  if (action >= num_actions_) throw std::out_of_range("action index out of range");
  auto it = values_.find(state);
  return it == values_.end() ? initial_value_ : it->second[action];
}

void QTable::set(std::uint64_t state, std::size_t action, double value) {
  if (action >= num_actions_) throw std::out_of_range("action index out of range");
  auto [it, fresh] = values_.try_emplace(state, std::vector<double>(num_actions_, initial_value_));
  it->second[action] = value;
}

std::size_t QTable::best(std::uint64_t state) const {
  auto it = values_.find(state);
  if (it == values_.end()) return 0;
  return static_cast<std::size_t>(std::max_element(it->second.begin(), it->second.end()) - it->second.begin());
}

std::size_t select_action(const QTable& q, std::uint64_t state, double epsilon, std::mt19937_64& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < epsilon) return std::uniform_int_distribution<std::size_t>(0, q.num_actions() - 1)(rng);
  return q.best(state);
}

void sarsa_update(QTable& q, std::uint64_t s, std::size_t a, double reward,
                  std::optional<std::pair<std::uint64_t, std::size_t>> next, double alpha, double gamma) {
  const double target = reward + (next ? gamma * q.value(next->first, next->second) : 0.0);
  const double current = q.value(s, a);
  q.set(s, a, current + alpha * (target - current));
}

nlohmann::ordered_json to_json(const QTable& q, const LearningParams& params) {
  nlohmann::ordered_json out;
  out["format"] = "wordlearn-q";
  out["version"] = 1;
  out["num_actions"] = q.num_actions();
  out["initial_value"] = q.initial_value();
  out["params"] = {{"alpha", params.alpha}, {"gamma", params.gamma}, {"epsilon", params.epsilon}};
  const bool agent_shaped = q.num_actions() == kNumActions;
  if (agent_shaped) {
    auto& names = out["actions"] = nlohmann::ordered_json::array();
    for (auto a : kActions) names.push_back(std::string(to_string(a)));
  }
  auto& states = out["states"] = nlohmann::ordered_json::array();
  for (const auto& [key, values] : q.entries()) {
    nlohmann::ordered_json entry;
    entry["key"] = key;
    if (agent_shaped && key < AgentState::kCount) entry["state"] = to_string(AgentState::from_key(key));
    entry["values"] = values;
    states.push_back(std::move(entry));
  }
  return out;
}

QTable qtable_from_json(const nlohmann::json& json, LearningParams* params) {
  if (json.value("format", "") != "wordlearn-q") throw std::invalid_argument("not a Q table file");
  if (json.value("version", 0) != 1) throw std::invalid_argument("unsupported Q table version");
  QTable q(json.at("num_actions").get<std::size_t>(), json.value("initial_value", 0.0));
  for (const auto& entry : json.at("states")) {
    auto values = entry.at("values").get<std::vector<double>>();
    if (values.size() != q.num_actions()) throw std::invalid_argument("Q table row has the wrong width");
    for (std::size_t a = 0; a < values.size(); ++a) q.set(entry.at("key").get<std::uint64_t>(), a, values[a]);
  }
  if (params && json.contains("params")) {
    params->alpha = json.at("params").value("alpha", params->alpha);
    params->gamma = json.at("params").value("gamma", params->gamma);
    params->epsilon = json.at("params").value("epsilon", params->epsilon);
  }
  return q;
}

// ─── Tutoring cost ───────────────────────────────────────────────────────────

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::inform: return "inform";
    case CostKind::confirmation: return "confirmation";
    case CostKind::rejection: return "rejection";
    case CostKind::correction: return "correction";
  }
  return "?";
}

double CostLedger::charge(CostKind kind, std::size_t count) {
  double unit = 0.0;
  switch (kind) {
    case CostKind::inform: unit = schedule_.c_inf; break;
    case CostKind::confirmation:
    case CostKind::rejection: unit = schedule_.c_ack_rej; break;
    case CostKind::correction: unit = schedule_.c_crt; break;
  }
  counts_[kind] += count;
  const double amount = unit * static_cast<double>(count);
  total_ += amount;
  history_.push_back(total_);
  return amount;
}

std::size_t CostLedger::count(CostKind kind) const {
  auto it = counts_.find(kind);
  return it == counts_.end() ? 0 : it->second;
}

std::map<CostKind, std::size_t> classify_tutor_acts(const ActSequence& acts, std::optional<Category> wrong_guess) {
  std::map<CostKind, std::size_t> out;
  for (const auto& act : acts) {
    switch (act.type) {
      case ActType::inform: {
        if (act.polarity == Polarity::neg || !act.category) break;
        std::vector<Category> attributes;
        if (*act.category != Category::shape) attributes.push_back(Category::color);
        if (*act.category != Category::color) attributes.push_back(Category::shape);
        for (auto attribute : attributes) ++out[wrong_guess == attribute ? CostKind::correction : CostKind::inform];
        break;
      }
      case ActType::acknowledgment: ++out[CostKind::confirmation]; break;
      case ActType::rejection: ++out[CostKind::rejection]; break;
      default: break;
    }
  }
  return out;
}

namespace {

double price(const std::map<CostKind, std::size_t>& counts, const CostSchedule& schedule) {
  CostLedger ledger(schedule);
  for (const auto& [kind, n] : counts) ledger.charge(kind, n);
  return ledger.total();
}

}  // namespace

double max_turn_cost(const sim::SimModel& tutor, const CostSchedule& schedule) {
  std::vector<std::string> sequences;
  if (tutor.level == sim::Level::act) {
    for (const auto& [item, count] : tutor.global) sequences.push_back(item);
  } else {
    for (const auto& [templ, seqs] : tutor.utterance_acts)
      for (const auto& [item, count] : seqs) sequences.push_back(item);
  }
  const double inform = std::max(schedule.c_inf, schedule.c_crt);
  double worst = 0.0;
  for (const auto& item : sequences) {
    auto counts = classify_tutor_acts(parse_sequence(item), std::nullopt);
    double cost = inform * static_cast<double>(counts[CostKind::inform] + counts[CostKind::correction]) +
                  schedule.c_ack_rej * static_cast<double>(counts[CostKind::confirmation] + counts[CostKind::rejection]);
    worst = std::max(worst, cost);
  }
  return worst;
}

// ─── Episodes ────────────────────────────────────────────────────────────────

namespace {

std::optional<Category> asked_category(const ActSequence& acts) {
  std::optional<Category> out;
  for (const auto& act : acts)
    if (act.type == ActType::asking) out = act.category.value_or(Category::both);
  return out;
}

Category attribute_of(AgentAction a) {
  return a == AgentAction::ask_wh_color || a == AgentAction::guess_polar_color ? Category::color : Category::shape;
}


Category context_category(Context c) { return c == Context::shape ? Category::shape : Category::color; }

}  // namespace

bool is_incoherent(AgentAction action, const AgentState& state, const ActSequence& prev, bool has_candidate_word) {
  const auto asked = asked_category(prev);
  const bool informed = (tutor_act_mask(prev) & kTutorInformed) != 0;
  switch (action) {
    case AgentAction::acknowledge: return prev.empty() || asked.has_value();
    case AgentAction::ask_wh_color:
    case AgentAction::ask_wh_shape: return state.status(attribute_of(action)) == 2;
    case AgentAction::guess_polar_color:
    case AgentAction::guess_polar_shape: {
      if (!has_candidate_word) return true;
      const Category x = attribute_of(action);
      return state.status(x) == 2 && !(asked && (*asked == x || *asked == Category::both));
    }
    case AgentAction::dont_know: return !asked.has_value();
    case AgentAction::listen: return asked.has_value();
    case AgentAction::request_repetition: return !informed;
  }
  return false;
}

EpisodeResult run_episode(const Policy& policy, const sim::SimModel& tutor, const VisualObject& object,
                          GroundingModel& grounding, const EpisodeConfig& config, std::mt19937_64& rng,
                          const TransitionHook& hook) {
  if (config.max_turns < 1) throw std::invalid_argument("max_turns must be positive");
  const AttributeLexicon& lexicon = tutor.lexicon;
  sim::DialogueState dialogue{object, {}, {}, false};
  ActSequence prev_tutor;
  std::map<Category, bool> explicit_known{{Category::color, false}, {Category::shape, false}};

  auto encode = [&] {
    return encode_state(grounding.classify(Category::color, object).confidence,
                        grounding.classify(Category::shape, object).confidence, explicit_known[Category::color],
                        explicit_known[Category::shape], prev_tutor, dialogue.conditions.pre_context, config.threshold);
  };
  auto label_of = [&](Category c) { return feature_label(lexicon, object, c); };

  EpisodeResult result;
  AgentState s = encode();
  if (s.c_status == 2 && s.s_status == 2) {
    result.success = true;
    result.reward = config.success_reward;
    return result;
  }
  AgentAction a = policy(s, rng);
  for (int turn = 0;; ++turn) {
    EpisodeStep step;
    step.state = s;
    step.action = a;

    std::optional<std::string> guess_word;
    bool has_candidate = true;
    LearnerUtterance utterance;
    const Category ctx = context_category(dialogue.conditions.pre_context);
    switch (a) {
      case AgentAction::ask_wh_color:
        utterance = realize_learner_move(LearnerMove::ask_color, std::nullopt, ctx, rng);
        break;
      case AgentAction::ask_wh_shape:
        utterance = realize_learner_move(LearnerMove::ask_shape, std::nullopt, ctx, rng);
        break;
      case AgentAction::guess_polar_color:
      case AgentAction::guess_polar_shape: {
        const Category x = attribute_of(a);
        guess_word = grounding.classify(x, object).word;
        if (guess_word) {
          utterance = realize_learner_move(x == Category::color ? LearnerMove::guess_color : LearnerMove::guess_shape,
                                           guess_word, ctx, rng);
        } else {
          has_candidate = false;
          utterance.text = "hmm...";
        }
        break;
      }
      case AgentAction::dont_know: utterance = realize_learner_move(LearnerMove::dont_know, std::nullopt, ctx, rng); break;
      case AgentAction::acknowledge:
        utterance = realize_learner_move(LearnerMove::acknowledge, std::nullopt, ctx, rng);
        break;
      case AgentAction::listen: break;
      case AgentAction::request_repetition:
        utterance = realize_learner_move(LearnerMove::repeat_request, std::nullopt, ctx, rng);
        break;
    }
    step.learner_text = utterance.text;
    step.learner_acts = utterance.acts;
    step.incoherent = is_incoherent(a, s, prev_tutor, has_candidate);

    auto reply = sim::respond(tutor, sim::LearnerTurn{utterance.text, utterance.acts}, dialogue, rng);
    step.tutor_text = reply.utterance;
    step.tutor_acts = reply.acts;

    std::optional<Category> wrong_guess;
    if (guess_word) {
      const Category x = attribute_of(a);
      if (*guess_word != lexicon.word_for(x, label_of(x))) wrong_guess = x;
    }
    auto counts = classify_tutor_acts(reply.acts, wrong_guess);
    step.cost = price(counts, config.costs);
    for (const auto& [kind, n] : counts) result.cost_counts[kind] += n;
    result.cost += step.cost;

    for (const auto& act : reply.acts) {
      if (act.type == ActType::inform && act.polarity != Polarity::neg && act.word && act.category &&
          *act.category != Category::both) {
        grounding.update(*act.word, *act.category, label_of(*act.category), Polarity::pos);
        explicit_known[*act.category] = true;
      } else if (act.type == ActType::acknowledgment && guess_word) {
        grounding.update(*guess_word, attribute_of(a), label_of(attribute_of(a)), Polarity::pos);
        explicit_known[attribute_of(a)] = true;
      } else if (act.type == ActType::rejection && guess_word) {
        grounding.update(*guess_word, attribute_of(a), label_of(attribute_of(a)), Polarity::neg);
      }
    }
    prev_tutor = reply.acts;

    const AgentState next = encode();
    const bool success = next.c_status == 2 && next.s_status == 2;
    const bool capped = !success && turn + 1 >= config.max_turns;
    step.reward = -step.cost - (step.incoherent ? config.incoherence_penalty : 0.0) +
                  (success ? config.success_reward : 0.0);
    result.reward += step.reward;
    result.incoherent_actions += step.incoherent;
    result.transcript.push_back(step);

    if (success || capped) {
      result.success = success;
      result.capped = capped;
      if (hook) hook(s, a, step.reward, std::nullopt);
      break;
    }
    const AgentAction next_action = policy(next, rng);
    if (hook) hook(s, a, step.reward, std::make_pair(next, next_action));
    s = next;
    a = next_action;
  }
  return result;
}

// ─── Policies ────────────────────────────────────────────────────────────────

AgentAction rule_based_policy(const AgentState& s) {
  if (s.c_status == 2 && s.s_status == 2) return AgentAction::acknowledge;
  const bool single_context = s.pre_context == Context::color || s.pre_context == Context::shape;
  const Category ctx = context_category(s.pre_context);
  const Category first_open = s.c_status != 2 ? Category::color : Category::shape;
  if (s.prev_tutor_acts & kTutorAsked) {
    const Category x = single_context ? ctx : first_open;
    if (s.status(x) >= 1) return x == Category::color ? AgentAction::guess_polar_color : AgentAction::guess_polar_shape;
    return AgentAction::dont_know;
  }
  const Category x = single_context && s.status(ctx) != 2 ? ctx : first_open;
  if (s.status(x) == 0) return x == Category::color ? AgentAction::ask_wh_color : AgentAction::ask_wh_shape;
  return x == Category::color ? AgentAction::guess_polar_color : AgentAction::guess_polar_shape;
}

Policy rule_policy() {
  return [](const AgentState& s, std::mt19937_64&) { return rule_based_policy(s); };
}

Policy greedy_policy(const QTable& q) {
  return [&q](const AgentState& s, std::mt19937_64&) { return kActions[q.best(s.key())]; };
}

Policy epsilon_greedy_policy(const QTable& q, double epsilon) {
  return [&q, epsilon](const AgentState& s, std::mt19937_64& rng) {
    return kActions[select_action(q, s.key(), epsilon, rng)];
  };
}

// ─── Learning runs ───────────────────────────────────────────────────────────

double perf_ratio(const PerfCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("empty performance curve");
  const auto& last = curve.points.back();
  if (!(last.cumulative_cost > 0.0)) throw std::invalid_argument("performance ratio undefined at zero tutoring cost");
  return (last.accuracy - curve.points.front().accuracy) / last.cumulative_cost;
}

double heldout_accuracy(const GroundingModel& grounding, const AttributeLexicon& lexicon,
                        const std::vector<VisualObject>& objects) {
  if (objects.empty()) throw std::invalid_argument("empty held-out set");
  std::size_t correct = 0;
  for (const auto& object : objects) {
    for (auto category : kAttributeCategories) {
      const auto judgement = grounding.classify(category, object);
      const auto& label = category == Category::color ? object.color : object.shape;
      correct += judgement.word && *judgement.word == lexicon.word_for(category, label);
    }
  }
  return static_cast<double>(correct) / static_cast<double>(2 * objects.size());
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::rule: return "rule";
    case PolicyKind::sarsa: return "sarsa";
    case PolicyKind::greedy: return "greedy";
  }
  return "?";
}

LearningResult run_learning(PolicyKind kind, const sim::SimModel& tutor, const AttributeLexicon& lexicon,
                            const LearningConfig& config, std::uint64_t seed, const QTable& initial) {
  if (auto errors = validate(config.params); !errors.empty()) throw ValidationError(errors);
  if (config.instances == 0 || config.eval_every == 0 || config.heldout_objects == 0)
    throw std::invalid_argument("instances, eval_every and heldout_objects must be positive");
  if (initial.num_actions() != kNumActions) throw std::invalid_argument("Q table width does not match the agent");

  LearningResult result;
  result.q = initial;
  const auto training = make_object_sequence(lexicon, config.instances, derive_seed(seed, "train-objects"));
  const auto heldout = make_object_sequence(lexicon, config.heldout_objects, derive_seed(seed, "heldout-objects"));
  std::mt19937_64 rng(derive_seed(seed, "episodes"));
  GroundingModel grounding(lexicon);

  Policy policy;
  TransitionHook hook;
  switch (kind) {
    case PolicyKind::rule: policy = rule_policy(); break;
    case PolicyKind::greedy: policy = greedy_policy(result.q); break;
    case PolicyKind::sarsa:
      policy = epsilon_greedy_policy(result.q, config.params.epsilon);
      hook = [&](const AgentState& s, AgentAction a, double r,
                 const std::optional<std::pair<AgentState, AgentAction>>& next) {
        std::optional<std::pair<std::uint64_t, std::size_t>> n;
        if (next) n = std::make_pair(next->first.key(), index_of(next->second));
        sarsa_update(result.q, s.key(), index_of(a), r, n, config.params.alpha, config.params.gamma);
      };
      break;
  }

  double cost = 0.0;
  result.curve.points.push_back({0, 0.0, heldout_accuracy(grounding, lexicon, heldout)});
  for (std::size_t i = 0; i < config.instances; ++i) {
    if (config.reset_grounding_every && i > 0 && i % config.reset_grounding_every == 0)
      grounding = GroundingModel(lexicon);
    auto episode = run_episode(policy, tutor, training[i], grounding, config.episode, rng, hook);
    cost += episode.cost;
    result.total_reward += episode.reward;
    result.successes += episode.success;
    result.incoherent_actions += static_cast<std::size_t>(episode.incoherent_actions);
    if ((i + 1) % config.eval_every == 0 || i + 1 == config.instances)
      result.curve.points.push_back({i + 1, cost, heldout_accuracy(grounding, lexicon, heldout)});
  }
  result.final_accuracy = result.curve.points.back().accuracy;
  result.r_perf = cost > 0.0 ? perf_ratio(result.curve) : 0.0;
  return result;
}

LearningConfig training_config() {
  LearningConfig config;
  config.reset_grounding_every = 100;
  return config;
}

LearningResult train_policy(const sim::SimModel& tutor, const AttributeLexicon& lexicon, const LearningConfig& config,
                            std::uint64_t seed) {
  return run_learning(PolicyKind::sarsa, tutor, lexicon, config, seed, QTable(kNumActions, config.q_init));
}

PerfCurve mean_curve(const std::vector<PerfCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("no curves to average");
  PerfCurve out = curves.front();
  for (std::size_t c = 1; c < curves.size(); ++c) {
    if (curves[c].points.size() != out.points.size()) throw std::invalid_argument("curves differ in length");
    for (std::size_t i = 0; i < out.points.size(); ++i) {
      if (curves[c].points[i].instances != out.points[i].instances)
        throw std::invalid_argument("curves sampled at different instances");
      out.points[i].cumulative_cost += curves[c].points[i].cumulative_cost;
      out.points[i].accuracy += curves[c].points[i].accuracy;
    }
  }
  for (auto& p : out.points) {
    p.cumulative_cost /= static_cast<double>(curves.size());
    p.accuracy /= static_cast<double>(curves.size());
  }
  return out;
}

Comparison compare_policies(const QTable& q, const sim::SimModel& tutor, const AttributeLexicon& lexicon,
                            const LearningConfig& config, std::size_t folds, std::uint64_t seed) {
  if (folds == 0) throw std::invalid_argument("folds must be positive");
  Comparison out;
  std::vector<PerfCurve> learned, baseline;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::uint64_t fold_seed = derive_seed(seed, "fold", f);
    out.learned.push_back(run_learning(PolicyKind::greedy, tutor, lexicon, config, fold_seed, q));
    out.baseline.push_back(run_learning(PolicyKind::rule, tutor, lexicon, config, fold_seed));
    learned.push_back(out.learned.back().curve);
    baseline.push_back(out.baseline.back().curve);
    out.learned_r_perf += out.learned.back().r_perf;
    out.baseline_r_perf += out.baseline.back().r_perf;
    out.learned_accuracy += out.learned.back().final_accuracy;
    out.baseline_accuracy += out.baseline.back().final_accuracy;
  }
  const double n = static_cast<double>(folds);
  out.learned_r_perf /= n;
  out.baseline_r_perf /= n;
  out.learned_accuracy /= n;
  out.baseline_accuracy /= n;
  out.ratio = out.baseline_r_perf > 0.0 ? out.learned_r_perf / out.baseline_r_perf : 0.0;
  out.learned_mean = mean_curve(learned);
  out.baseline_mean = mean_curve(baseline);
  return out;
}

std::string curve_csv(const std::vector<std::pair<std::string, PerfCurve>>& curves) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "policy,instances,cumulative_cost,accuracy\n";
  for (const auto& [name, curve] : curves)
    for (const auto& p : curve.points) out << name << ',' << p.instances << ',' << p.cumulative_cost << ',' << p.accuracy << '\n';
  return out.str();
}

}  // namespace wordlearn::agent
