#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wordlearn/model.hpp"

namespace wordlearn {

// Lowercases ASCII, splits on whitespace and peels a run of trailing
// punctuation (. , ! ? ; :) off each token into a token of its own, so
// "um..." becomes {"um", "..."} and "sako?" becomes {"sako", "?"}.
std::vector<std::string> tokenize(std::string_view text);

bool is_punctuation_token(std::string_view token);

// Lexicon words become "<color>" / "<shape>".
std::vector<std::string> delexicalize_tokens(const std::vector<std::string>& tokens,
                                             const AttributeLexicon& lexicon);

// Utterance template: lowercased, whitespace-collapsed text with lexicon
// words replaced by "{color}" / "{shape}" slot markers.
std::string template_from_text(std::string_view text, const AttributeLexicon& lexicon);

// Slot names referenced by a template ("color", "shape", "word").
std::vector<std::string> template_slots(std::string_view templ);

}  // namespace wordlearn

namespace wordlearn {

// RFC 4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

}  // namespace wordlearn
