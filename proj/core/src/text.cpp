#include "wordlearn/text.hpp"

#include <algorithm>
#include <cctype>

namespace wordlearn {

namespace {

bool is_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// Replace the unicode ellipsis with three dots so it tokenizes like "...".
std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  static constexpr std::string_view kEllipsis = "\xE2\x80\xA6";
  for (std::size_t i = 0; i < text.size();) {
    if (text.substr(i, kEllipsis.size()) == kEllipsis) {
      out += "...";
      i += kEllipsis.size();
    } else {
      out += text[i++];
    }
  }
  return lower(out);
}

}  // namespace

bool is_punctuation_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_punct);
}

std::vector<std::string> tokenize(std::string_view raw) {
  const std::string text = normalize(raw);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (start == i) break;
    std::string_view word(text.data() + start, i - start);
    std::size_t cut = word.size();
    while (cut > 0 && is_punct(word[cut - 1])) --cut;
    if (cut > 0) tokens.emplace_back(word.substr(0, cut));
    if (cut < word.size()) tokens.emplace_back(word.substr(cut));
  }
  return tokens;
}

std::vector<std::string> delexicalize_tokens(const std::vector<std::string>& tokens,
                                             const AttributeLexicon& lexicon) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (auto category = lexicon.category_of(token))
      out.push_back("<" + std::string(to_string(*category)) + ">");
    else
      out.push_back(token);
  }
  return out;
}

std::string template_from_text(std::string_view raw, const AttributeLexicon& lexicon) {
  const std::string text = normalize(raw);
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      while (i < text.size() && is_space(text[i])) ++i;
      if (!out.empty() && i < text.size()) out += ' ';
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i]) && !is_punct(text[i])) ++i;
    if (start == i) {
      out += text[i++];
      continue;
    }
    std::string word = text.substr(start, i - start);
    if (auto category = lexicon.category_of(word))
      out += "{" + std::string(to_string(*category)) + "}";
    else
      out += word;
  }
  return out;
}

std::vector<std::string> template_slots(std::string_view templ) {
  std::vector<std::string> slots;
  std::size_t pos = 0;
  while ((pos = templ.find('{', pos)) != std::string_view::npos) {
    auto close = templ.find('}', pos);
    if (close == std::string_view::npos) break;
    slots.emplace_back(templ.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return slots;
}

}  // namespace wordlearn

namespace wordlearn {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace wordlearn
