#include "wordlearn/sim_eval.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "wordlearn/text.hpp"

namespace wordlearn::eval {

using sim::Distribution;

void validate(const Distribution& distribution) {
  if (distribution.items.empty()) throw std::invalid_argument("distribution has empty support");
  double sum = 0.0;
  for (const auto& [item, p] : distribution.items) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative probability for '" + item + "'");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance)
    throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
}

double kld(const Distribution& p, const Distribution& q, double epsilon) {
  validate(p);
  validate(q);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  std::set<std::string> support;
  for (const auto& entry : p.items)
    if (entry.second > 0.0) support.insert(entry.first);
  for (const auto& entry : q.items)
    if (entry.second > 0.0) support.insert(entry.first);

  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(support.size());
  bool floored = false;
  for (const auto& item : support) {
    double qi = q.probability(item);
    if (qi < epsilon) {
      qi = epsilon;
      floored = true;
    }
    pairs.emplace_back(p.probability(item), qi);
  }
  double norm = 1.0;
  if (floored) {
    norm = 0.0;
    for (const auto& [pi, qi] : pairs) norm += qi;
  }
  double sum = 0.0;
  for (const auto& [pi, qi] : pairs)
    if (pi > 0.0) sum += pi * std::log(pi / (qi / norm));
  return sum > 0.0 ? sum : 0.0;
}

EvalReport evaluate(const sim::SimModel& model, const Corpus& corpus, sim::Level level) {
  if (level != model.level)
    throw std::invalid_argument("level mismatch: model is " + std::string(sim::to_string(model.level)) +
                                ", evaluation asked for " + std::string(sim::to_string(level)));
  if (corpus.dialogues.empty()) throw std::invalid_argument("empty corpus");
  auto examples = sim::extract_examples(corpus, model.lexicon, level);
  if (examples.empty()) throw std::invalid_argument("corpus has no tutor turns to evaluate");

  struct Observed {
    std::vector<std::string> context;
    sim::Counts counts;
  };
  std::map<sim::NGramKey, Observed> observed;
  for (auto& ex : examples) {
    auto& slot = observed[sim::NGramKey{sim::key_words(ex.context, model.n), ex.conditions}];
    if (slot.counts.empty()) slot.context = ex.context;
    ++slot.counts[ex.item];
  }

  EvalReport report;
  report.level = level;
  double kld_sum = 0.0;
  for (const auto& [key, obs] : observed) {
    KeyResult row;
    row.key = key;
    row.empirical = Distribution::from_counts(obs.counts);
    sim::PredictTrace trace;
    row.predicted = sim::predict(model, obs.context, key.conditions, &trace);
    row.stage = trace.stage;
    row.predicted_item = row.predicted.argmax();
    row.correct = obs.counts.count(row.predicted_item) > 0;
    row.kld = kld(row.empirical, row.predicted);

    ++report.total_keys;
    report.correct_keys += row.correct;
    kld_sum += row.kld;
    auto& breakdown = report.by_condition[key.conditions];
    ++breakdown.keys;
    breakdown.correct += row.correct;
    breakdown.kld_sum += row.kld;
    report.keys.push_back(std::move(row));
  }
  report.accuracy = static_cast<double>(report.correct_keys) / static_cast<double>(report.total_keys);
  report.mean_kld = kld_sum / static_cast<double>(report.total_keys);
  return report;
}

double accuracy(const sim::SimModel& model, const Corpus& corpus) {
  return evaluate(model, corpus, model.level).accuracy;
}

namespace {

std::string format_distribution(const Distribution& d) {
  std::ostringstream out;
  out << std::setprecision(10);
  bool first = true;
  for (const auto& [item, p] : d.items) {
    if (!first) out << ';';
    first = false;
    out << item << '=' << p;
  }
  return out.str();
}

std::string words_of(const sim::NGramKey& key) {
  std::string out;
  for (std::size_t i = 0; i < key.words.size(); ++i) {
    if (i) out += ' ';
    out += key.words[i];
  }
  return out;
}

}  // namespace

std::string eval_csv(const EvalReport& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "key,conditions,empirical,predicted,argmax,correct,kld,stage\n";
  for (const auto& row : report.keys) {
    out << csv_field(words_of(row.key)) << ',' << csv_field(to_string(row.key.conditions)) << ','
        << csv_field(format_distribution(row.empirical)) << ',' << csv_field(format_distribution(row.predicted))
        << ',' << csv_field(row.predicted_item) << ',' << (row.correct ? 1 : 0) << ',' << row.kld << ','
        << sim::to_string(row.stage) << '\n';
  }
  return out.str();
}

std::string summary_csv(const EvalReport& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "level,conditions,keys,correct,accuracy,mean_kld\n";
  const auto level = sim::to_string(report.level);
  for (const auto& [conditions, b] : report.by_condition)
    out << level << ',' << csv_field(to_string(conditions)) << ',' << b.keys << ',' << b.correct << ','
        << static_cast<double>(b.correct) / static_cast<double>(b.keys) << ','
        << b.kld_sum / static_cast<double>(b.keys) << '\n';
  out << level << ",all," << report.total_keys << ',' << report.correct_keys << ',' << report.accuracy << ','
      << report.mean_kld << '\n';
  return out.str();
}

}  // namespace wordlearn::eval
