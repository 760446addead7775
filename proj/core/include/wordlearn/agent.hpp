#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlearn/grounding.hpp"
#include "wordlearn/model.hpp"
#include "wordlearn/tutor_sim.hpp"

namespace wordlearn::agent {

// ─── State ───────────────────────────────────────────────────────────────────

inline constexpr double kPositiveThreshold = 0.9;

// Tutor act types the state remembers from the previous tutor turn.
enum TutorActBit : std::uint8_t {
  kTutorAsked = 1,
  kTutorInformed = 2,
  kTutorChecked = 4,
  kTutorOfferedHelp = 8,
};

std::uint8_t tutor_act_mask(const ActSequence& acts);

struct AgentState {
  int c_status = 0;  // 0 unknown, 1 mid confidence, 2 known
  int s_status = 0;
  std::uint8_t prev_tutor_acts = 0;  // TutorActBit mask
  Context pre_context = Context::none;

  static constexpr std::size_t kCount = 3 * 3 * 16 * 4;

  // Dense key in [0, kCount); inverse of from_key.
  std::uint64_t key() const;
  static AgentState from_key(std::uint64_t key);

  int status(Category category) const { return category == Category::color ? c_status : s_status; }

  bool operator==(const AgentState&) const = default;
};

std::string to_string(const AgentState& state);

// 2 when explicitly informed or confident, 1 when 0.5 < confidence < threshold, else 0.
int status_for(double confidence, bool explicit_known, double threshold = kPositiveThreshold);

AgentState encode_state(double color_confidence, double shape_confidence, bool color_explicit, bool shape_explicit,
                        const ActSequence& prev_tutor_acts, Context pre_context,
                        double threshold = kPositiveThreshold);

// ─── Actions ─────────────────────────────────────────────────────────────────

enum class AgentAction {
  ask_wh_color,
  ask_wh_shape,
  guess_polar_color,
  guess_polar_shape,
  dont_know,
  acknowledge,
  listen,
  request_repetition,
};

inline constexpr std::size_t kNumActions = 8;
inline constexpr std::array<AgentAction, kNumActions> kActions{
    AgentAction::ask_wh_color,      AgentAction::ask_wh_shape, AgentAction::guess_polar_color,
    AgentAction::guess_polar_shape, AgentAction::dont_know,    AgentAction::acknowledge,
    AgentAction::listen,            AgentAction::request_repetition};

std::string_view to_string(AgentAction action);
AgentAction action_from_string(std::string_view text);

// ─── Q table and SARSA ───────────────────────────────────────────────────────

struct LearningParams {
  double alpha = 0.1;
  double gamma = 1.0;
  double epsilon = 0.2;
};

std::vector<std::string> validate(const LearningParams& params);

// Tabular action values over integer state keys; unseen entries read as
// `initial_value`.
class QTable {
 public:
  explicit QTable(std::size_t num_actions = kNumActions, double initial_value = 0.0);

  std::size_t num_actions() const { return num_actions_; }
  double initial_value() const { return initial_value_; }
  double value(std::uint64_t state, std::size_t action) const;
  void set(std::uint64_t state, std::size_t action, double value);
  // Highest value, ties to the lowest action index.
  std::size_t best(std::uint64_t state) const;
  const std::map<std::uint64_t, std::vector<double>>& entries() const { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  std::size_t num_actions_;
  double initial_value_;
  std::map<std::uint64_t, std::vector<double>> values_;
};

// One uniform draw u: u < epsilon explores uniformly, otherwise the argmax.
std::size_t select_action(const QTable& q, std::uint64_t state, double epsilon, std::mt19937_64& rng);

// Q(s,a) += alpha * (r + gamma * Q(s',a') - Q(s,a)); a missing (s', a') is terminal.
void sarsa_update(QTable& q, std::uint64_t s, std::size_t a, double reward,
                  std::optional<std::pair<std::uint64_t, std::size_t>> next, double alpha, double gamma);

nlohmann::ordered_json to_json(const QTable& q, const LearningParams& params);
QTable qtable_from_json(const nlohmann::json& json, LearningParams* params = nullptr);

// ─── Tutoring cost ───────────────────────────────────────────────────────────

struct CostSchedule {
  double c_inf = 5.0;
  double c_ack_rej = 0.5;
  double c_crt = 5.0;
};

enum class CostKind { inform, confirmation, rejection, correction };

std::string_view to_string(CostKind kind);

class CostLedger {
 public:
  explicit CostLedger(CostSchedule schedule = {}) : schedule_(schedule) {}

  double charge(CostKind kind, std::size_t count = 1);
  double total() const { return total_; }
  std::size_t count(CostKind kind) const;
  const CostSchedule& schedule() const { return schedule_; }
  // Running totals after each charge.
  const std::vector<double>& history() const { return history_; }

 private:
  CostSchedule schedule_;
  double total_ = 0.0;
  std::map<CostKind, std::size_t> counts_;
  std::vector<double> history_;
};

// Cost-bearing units of a tutor turn. An inform on the attribute the learner
// just guessed wrong is a correction; inform(both) counts two attributes.
std::map<CostKind, std::size_t> classify_tutor_acts(const ActSequence& acts, std::optional<Category> wrong_guess);

// Largest cost any single tutor turn the model can produce may carry, with
// every inform priced as the dearer of inform and correction.
double max_turn_cost(const sim::SimModel& tutor, const CostSchedule& schedule);

// ─── Episodes ────────────────────────────────────────────────────────────────

struct EpisodeConfig {
  int max_turns = 30;
  double success_reward = 10.0;
  double incoherence_penalty = 1.0;
  double threshold = kPositiveThreshold;
  CostSchedule costs;
};

struct EpisodeStep {
  AgentState state;
  AgentAction action = AgentAction::listen;
  std::string learner_text;
  ActSequence learner_acts;
  std::string tutor_text;
  ActSequence tutor_acts;
  double cost = 0.0;
  bool incoherent = false;
  double reward = 0.0;
};

struct EpisodeResult {
  std::vector<EpisodeStep> transcript;
  double cost = 0.0;
  std::map<CostKind, std::size_t> cost_counts;
  double reward = 0.0;
  int incoherent_actions = 0;
  bool success = false;
  bool capped = false;
};

// True when the action breaks a coherence rule given the previous tutor acts
// and the current state.
bool is_incoherent(AgentAction action, const AgentState& state, const ActSequence& prev_tutor_acts,
                   bool has_candidate_word);

using Policy = std::function<AgentAction(const AgentState&, std::mt19937_64&)>;
// Called after each step with (s, a, r, next); next is empty on the final step.
using TransitionHook = std::function<void(const AgentState&, AgentAction, double,
                                          const std::optional<std::pair<AgentState, AgentAction>>&)>;

// Learner/tutor loop until both statuses reach 2 or the turn cap. Rewards per
// step are -(tutor cost + penalties), plus the success reward on the step that
// completes the task, so an episode's return is 10 - cost - penalties on
// success. Grounding is updated from the tutor's informs, confirmations and
// rejections.
EpisodeResult run_episode(const Policy& policy, const sim::SimModel& tutor, const VisualObject& object,
                          GroundingModel& grounding, const EpisodeConfig& config, std::mt19937_64& rng,
                          const TransitionHook& hook = {});

// ─── Policies ────────────────────────────────────────────────────────────────

AgentAction rule_based_policy(const AgentState& state);
Policy rule_policy();
Policy greedy_policy(const QTable& q);
Policy epsilon_greedy_policy(const QTable& q, double epsilon);

// ─── Learning runs ───────────────────────────────────────────────────────────

struct CurvePoint {
  std::size_t instances = 0;
  double cumulative_cost = 0.0;
  double accuracy = 0.0;
};

struct PerfCurve {
  std::vector<CurvePoint> points;
};

// (final accuracy - initial accuracy) / final cumulative cost. Throws
// std::invalid_argument for an empty curve or zero final cost.
double perf_ratio(const PerfCurve& curve);

// Share of (object, attribute) pairs whose best word is the lexicon's word.
double heldout_accuracy(const GroundingModel& grounding, const AttributeLexicon& lexicon,
                        const std::vector<VisualObject>& objects);

enum class PolicyKind { rule, sarsa, greedy };

std::string_view to_string(PolicyKind kind);

struct LearningConfig {
  std::size_t instances = 500;
  std::size_t eval_every = 10;
  std::size_t heldout_objects = 18;
  // Fresh grounding model every this many instances; 0 keeps one model for
  // the whole run.
  std::size_t reset_grounding_every = 0;
  // Value of unvisited Q entries when training starts from scratch.
  double q_init = 10.0;
  LearningParams params;
  EpisodeConfig episode;
};

struct LearningResult {
  PerfCurve curve;
  QTable q;
  double total_reward = 0.0;
  std::size_t successes = 0;
  std::size_t incoherent_actions = 0;
  double final_accuracy = 0.0;
  double r_perf = 0.0;
};

// Runs `instances` training episodes on fresh objects with a fresh grounding
// model, scoring a fixed held-out object set before the first episode and
// after every `eval_every` episodes. `sarsa` learns `initial` in place of a
// copy; `greedy` acts on it frozen; `rule` ignores it.
LearningResult run_learning(PolicyKind kind, const sim::SimModel& tutor, const AttributeLexicon& lexicon,
                            const LearningConfig& config, std::uint64_t seed, const QTable& initial = QTable());

// Defaults for policy training: grounding restarts every 100 instances so the
// agent keeps meeting unknown and half-known words.
LearningConfig training_config();

// SARSA from a table filled with config.q_init.
LearningResult train_policy(const sim::SimModel& tutor, const AttributeLexicon& lexicon, const LearningConfig& config,
                            std::uint64_t seed);

struct Comparison {
  std::vector<LearningResult> learned;
  std::vector<LearningResult> baseline;
  PerfCurve learned_mean;
  PerfCurve baseline_mean;
  double learned_r_perf = 0.0;  // mean over folds
  double baseline_r_perf = 0.0;
  double learned_accuracy = 0.0;
  double baseline_accuracy = 0.0;
  // learned_r_perf / baseline_r_perf
  double ratio = 0.0;
};

// Runs the frozen greedy policy of `q` and the rule baseline on the same
// objects for each fold, each fold with a fresh grounding model.
Comparison compare_policies(const QTable& q, const sim::SimModel& tutor, const AttributeLexicon& lexicon,
                            const LearningConfig& config, std::size_t folds, std::uint64_t seed);

// Pointwise mean of curves sampled at the same instances.
PerfCurve mean_curve(const std::vector<PerfCurve>& curves);

std::string curve_csv(const std::vector<std::pair<std::string, PerfCurve>>& curves);

}  // namespace wordlearn::agent
