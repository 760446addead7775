#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "wordlearn/model.hpp"
#include "wordlearn/tutor_sim.hpp"

namespace wordlearn::eval {

inline constexpr double kDefaultEpsilon = 1e-9;
inline constexpr double kDistributionTolerance = 1e-9;

// Throws std::invalid_argument unless every probability is >= 0 and they sum
// to 1 within kDistributionTolerance.
void validate(const sim::Distribution& distribution);

// D(P || Q) in nats over the union of supports (items with probability > 0). Q is floored at epsilon and
// renormalized when any floor applied; terms with p = 0 contribute nothing.
double kld(const sim::Distribution& p, const sim::Distribution& q, double epsilon = kDefaultEpsilon);

struct KeyResult {
  sim::NGramKey key;
  sim::Distribution empirical;
  sim::Distribution predicted;
  std::string predicted_item;
  bool correct = false;
  double kld = 0.0;
  sim::PredictTrace::Stage stage = sim::PredictTrace::Stage::exact;
};

struct ConditionBreakdown {
  std::size_t keys = 0;
  std::size_t correct = 0;
  double kld_sum = 0.0;
};

struct EvalReport {
  sim::Level level = sim::Level::act;
  std::size_t total_keys = 0;
  std::size_t correct_keys = 0;
  double accuracy = 0.0;  // correct_keys / total_keys
  double mean_kld = 0.0;
  std::map<ConditionVector, ConditionBreakdown> by_condition;
  std::vector<KeyResult> keys;  // in key order
};

// Scores every distinct full-order key of the corpus. Throws
// std::invalid_argument for an empty corpus or a level other than the
// model's.
EvalReport evaluate(const sim::SimModel& model, const Corpus& corpus, sim::Level level);
double accuracy(const sim::SimModel& model, const Corpus& corpus);

// Per-key rows: key, conditions, empirical, predicted, argmax, correct, kld, stage.
std::string eval_csv(const EvalReport& report);
// One row per condition vector seen, plus an "all" row.
std::string summary_csv(const EvalReport& report);

}  // namespace wordlearn::eval
