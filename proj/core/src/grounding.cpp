#include "wordlearn/grounding.hpp"

#include <algorithm>

namespace wordlearn::agent {

GroundingModel::GroundingModel(const AttributeLexicon& lexicon, double alpha) : lexicon_(lexicon), alpha_(alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("smoothing alpha must be positive");
  for (const auto& e : lexicon.colors) color_.labels.push_back(e.label);
  for (const auto& e : lexicon.shapes) shape_.labels.push_back(e.label);
  if (color_.labels.size() < 2 || shape_.labels.size() < 2)
    throw std::invalid_argument("grounding needs at least two labels per category");
}

const GroundingModel::Slot& GroundingModel::slot(Category category) const {
  if (category == Category::color) return color_;
  if (category == Category::shape) return shape_;
  throw std::invalid_argument("unknown category for grounding: both");
}

GroundingModel::Slot& GroundingModel::slot(Category category) {
  return const_cast<Slot&>(static_cast<const GroundingModel&>(*this).slot(category));
}

std::size_t GroundingModel::label_index(const Slot& s, const std::string& label) const {
  auto it = std::find(s.labels.begin(), s.labels.end(), label);
  if (it == s.labels.end()) throw std::invalid_argument("unknown label '" + label + "'");
  return static_cast<std::size_t>(it - s.labels.begin());
}

void GroundingModel::update(const std::string& word, Category category, const std::string& label, Polarity polarity) {
  Slot& s = slot(category);
  const std::size_t index = label_index(s, label);
  auto [it, fresh] = s.evidence.try_emplace(word, std::vector<double>(s.labels.size(), 0.0));
  if (fresh) s.words.push_back(word);
  auto& counts = it->second;
  if (polarity == Polarity::pos) {
    counts[index] += 1.0;
  } else {
    const double share = 1.0 / static_cast<double>(s.labels.size() - 1);
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (i != index) counts[i] += share;
  }
}

double GroundingModel::probability(Category category, const std::string& word, const std::string& label) const {
  const Slot& s = slot(category);
  const std::size_t index = label_index(s, label);
  const double k = static_cast<double>(s.labels.size());
  auto it = s.evidence.find(word);
  if (it == s.evidence.end()) return 1.0 / k;
  double total = 0.0;
  for (double e : it->second) total += e;
  return (it->second[index] + alpha_) / (total + k * alpha_);
}

double GroundingModel::evidence(Category category, const std::string& word, const std::string& label) const {
  const Slot& s = slot(category);
  const std::size_t index = label_index(s, label);
  auto it = s.evidence.find(word);
  return it == s.evidence.end() ? 0.0 : it->second[index];
}

GroundingModel::Judgement GroundingModel::classify_label(Category category, const std::string& label) const {
  const Slot& s = slot(category);
  Judgement out;
  out.confidence = 1.0 / static_cast<double>(s.labels.size());
  for (const auto& word : s.words) {
    double p = probability(category, word, label);
    if (!out.word || p > out.confidence) {
      out.word = word;
      out.confidence = p;
    }
  }
  return out;
}

GroundingModel::Judgement GroundingModel::classify(Category category, const VisualObject& object) const {
  return classify_label(category, feature_label(lexicon_, object, category));
}

const std::vector<std::string>& GroundingModel::words(Category category) const { return slot(category).words; }

const std::vector<std::string>& GroundingModel::labels(Category category) const { return slot(category).labels; }

nlohmann::ordered_json GroundingModel::to_json() const {
  nlohmann::ordered_json out;
  out["alpha"] = alpha_;
  for (auto category : kAttributeCategories) {
    const Slot& s = slot(category);
    nlohmann::ordered_json words = nlohmann::ordered_json::object();
    for (const auto& word : s.words) {
      nlohmann::ordered_json row = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < s.labels.size(); ++i) row[s.labels[i]] = s.evidence.at(word)[i];
      words[word] = std::move(row);
    }
    out[std::string(wordlearn::to_string(category))] = std::move(words);
  }
  return out;
}

}  // namespace wordlearn::agent
