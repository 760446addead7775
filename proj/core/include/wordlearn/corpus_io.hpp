#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlearn/model.hpp"

namespace wordlearn::io {

// Keystroke log line:
// {"seq":N,"server_ts":T,"session":S,"object_index":I,"sender":R,"ch":C}
std::string log_line(const CharEvent& event);
CharEvent parse_log_line(std::string_view line);

std::string write_log(const std::vector<CharEvent>& events);
std::vector<CharEvent> parse_log(std::string_view text);

nlohmann::ordered_json to_json(const Turn& turn);
Turn turn_from_json(const nlohmann::json& json);

nlohmann::ordered_json to_json(const Dialogue& dialogue);
Dialogue dialogue_from_json(const nlohmann::json& json);

// {"lexicon":...?, "dialogues":[...]}
nlohmann::ordered_json to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& json);

std::string read_file(const std::filesystem::path& path);
// Creates parent directories; replaces any existing file.
void write_file(const std::filesystem::path& path, std::string_view content);

Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

// Two-space indented dump followed by a newline.
std::string dump(const nlohmann::ordered_json& json);

}  // namespace wordlearn::io
