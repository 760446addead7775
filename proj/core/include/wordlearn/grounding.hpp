#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wordlearn/model.hpp"

namespace wordlearn::agent {

// Words-as-classifiers over discrete labels. Each (category, word) keeps an
// evidence count per ground label; probabilities are Laplace smoothed:
//   P(label | word) = (e[label] + alpha) / (sum(e) + K * alpha)
class GroundingModel {
 public:
  explicit GroundingModel(const AttributeLexicon& lexicon, double alpha = 1.0);

  // Positive evidence adds 1 to `label`; negative evidence spreads 1 over the
  // other labels. Unseen words are added. Throws std::invalid_argument for the
  // `both` category or a label outside the category.
  void update(const std::string& word, Category category, const std::string& label, Polarity polarity);

  // 1/K for a word without evidence.
  double probability(Category category, const std::string& word, const std::string& label) const;
  double evidence(Category category, const std::string& word, const std::string& label) const;

  struct Judgement {
    std::optional<std::string> word;  // empty when no word of the category is known
    double confidence = 0.0;
  };

  // Best word for the object's feature-indicated label and its posterior for
  // that label. Ties go to the word learned first.
  Judgement classify(Category category, const VisualObject& object) const;
  Judgement classify_label(Category category, const std::string& label) const;

  // Words in the order they were first seen.
  const std::vector<std::string>& words(Category category) const;
  const std::vector<std::string>& labels(Category category) const;
  double alpha() const { return alpha_; }

  nlohmann::ordered_json to_json() const;

 private:
  struct Slot {
    std::vector<std::string> labels;
    std::vector<std::string> words;
    std::map<std::string, std::vector<double>> evidence;
  };
  const Slot& slot(Category category) const;
  Slot& slot(Category category);
  std::size_t label_index(const Slot& s, const std::string& label) const;

  AttributeLexicon lexicon_;
  double alpha_;
  Slot color_;
  Slot shape_;
};

}  // namespace wordlearn::agent
