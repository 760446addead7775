#include "wordlearn/corpus_io.hpp"

#include <fstream>
#include <sstream>

namespace wordlearn::io {

using ojson = nlohmann::ordered_json;

std::string log_line(const CharEvent& e) {
  ojson line;
  line["seq"] = e.seq;
  line["server_ts"] = e.server_ts;
  line["session"] = e.session_id;
  line["object_index"] = e.object_index;
  line["sender"] = std::string(to_string(e.sender));
  line["ch"] = encode_utf8(e.ch);
  return line.dump();
}

CharEvent parse_log_line(std::string_view line) {
  auto json = nlohmann::json::parse(line);
  CharEvent e;
  e.seq = json.at("seq").get<std::uint64_t>();
  e.server_ts = json.at("server_ts").get<std::int64_t>();
  e.session_id = json.at("session").get<std::string>();
  e.object_index = json.at("object_index").get<int>();
  e.sender = role_from_string(json.at("sender").get<std::string>());
  e.ch = decode_single_utf8(json.at("ch").get<std::string>());
  if (json.contains("client_ts")) e.client_ts = json.at("client_ts").get<std::int64_t>();
  return e;
}

std::string write_log(const std::vector<CharEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += log_line(e);
    out += '\n';
  }
  return out;
}

std::vector<CharEvent> parse_log(std::string_view text) {
  std::vector<CharEvent> events;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty()) events.push_back(parse_log_line(line));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return events;
}

ojson to_json(const Turn& turn) {
  ojson out;
  out["turn_id"] = turn.turn_id;
  out["speaker"] = std::string(to_string(turn.speaker));
  out["start_ms"] = turn.start_ms;
  out["end_ms"] = turn.end_ms;
  out["text"] = turn.text;
  auto& acts = out["acts"] = ojson::array();
  for (const auto& act : turn.acts) acts.push_back(canonical_act_string(act));
  auto& tags = out["phenomena"] = ojson::array();
  for (auto tag : turn.phenomena) tags.push_back(std::string(to_string(tag)));
  if (!turn.events.empty()) out["events"] = turn.events;
  return out;
}

Turn turn_from_json(const nlohmann::json& json) {
  Turn turn;
  turn.turn_id = json.value("turn_id", 0);
  turn.speaker = role_from_string(json.at("speaker").get<std::string>());
  turn.start_ms = json.at("start_ms").get<std::int64_t>();
  turn.end_ms = json.at("end_ms").get<std::int64_t>();
  turn.text = json.at("text").get<std::string>();
  if (turn.end_ms < turn.start_ms) throw std::invalid_argument("turn ends before it starts");
  if (json.contains("acts"))
    for (const auto& act : json.at("acts")) turn.acts.push_back(parse_act(act.get<std::string>()));
  if (json.contains("phenomena"))
    for (const auto& tag : json.at("phenomena")) turn.phenomena.push_back(phenomenon_from_string(tag.get<std::string>()));
  if (json.contains("events")) turn.events = json.at("events").get<std::vector<std::uint64_t>>();
  return turn;
}

ojson to_json(const Dialogue& dialogue) {
  ojson out;
  out["id"] = dialogue.dialogue_id;
  out["object"] = dialogue.object ? wordlearn::to_json(*dialogue.object) : ojson();
  out["outcome"] = {{"color_identified", dialogue.outcome.color_identified},
                    {"shape_identified", dialogue.outcome.shape_identified}};
  auto& turns = out["turns"] = ojson::array();
  for (const auto& turn : dialogue.turns) turns.push_back(to_json(turn));
  return out;
}

Dialogue dialogue_from_json(const nlohmann::json& json) {
  Dialogue dialogue;
  dialogue.dialogue_id = json.at("id").get<std::string>();
  if (json.contains("object") && !json.at("object").is_null()) dialogue.object = object_from_json(json.at("object"));
  if (json.contains("outcome")) {
    dialogue.outcome.color_identified = json.at("outcome").value("color_identified", false);
    dialogue.outcome.shape_identified = json.at("outcome").value("shape_identified", false);
  }
  int next_id = 0;
  for (const auto& t : json.at("turns")) {
    Turn turn = turn_from_json(t);
    if (!t.contains("turn_id")) turn.turn_id = next_id;
    next_id = turn.turn_id + 1;
    dialogue.turns.push_back(std::move(turn));
  }
  return dialogue;
}

ojson to_json(const Corpus& corpus) {
  ojson out;
  if (corpus.lexicon) out["lexicon"] = wordlearn::to_json(*corpus.lexicon);
  auto& dialogues = out["dialogues"] = ojson::array();
  for (const auto& d : corpus.dialogues) dialogues.push_back(to_json(d));
  return out;
}

Corpus corpus_from_json(const nlohmann::json& json) {
  Corpus corpus;
  if (json.contains("lexicon")) corpus.lexicon = lexicon_from_json(json.at("lexicon"));
  for (const auto& d : json.at("dialogues")) corpus.dialogues.push_back(dialogue_from_json(d));
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

Corpus load_corpus(const std::filesystem::path& path) {
  return corpus_from_json(nlohmann::json::parse(read_file(path)));
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  write_file(path, dump(to_json(corpus)));
}

std::string dump(const ojson& json) { return json.dump(2) + "\n"; }

}  // namespace wordlearn::io
