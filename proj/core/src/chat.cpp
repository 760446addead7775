#include "wordlearn/chat.hpp"

#include <algorithm>
#include <chrono>
#include <regex>

#include "wordlearn/corpus_io.hpp"

namespace wordlearn::chat {

using ojson = nlohmann::ordered_json;

// ─── Configuration ───────────────────────────────────────────────────────────

namespace {

bool valid_session_id(const std::string& id) {
  static const std::regex pattern("[A-Za-z0-9_.-]{1,64}");
  return std::regex_match(id, pattern) && id != "." && id != "..";
}

}  // namespace

std::vector<std::string> validate(const SessionConfig& config) {
  std::vector<std::string> errors;
  if (!valid_session_id(config.session_id))
    errors.push_back("session id must be 1-64 characters from [A-Za-z0-9_.-]");
  if (config.fade_ms <= 0) errors.push_back("fade_ms must be positive");
  if (config.gap_ms <= 0) errors.push_back("gap_ms must be positive");
  if (config.time_limit_ms <= 0) errors.push_back("time_limit_ms must be positive");
  if (config.objects.empty()) errors.push_back("a session needs at least one object");
  for (const auto& e : validate_lexicon(config.lexicon)) errors.push_back("lexicon: " + e);
  for (const auto& object : config.objects) {
    bool known = true;
    for (auto category : kAttributeCategories) {
      const auto& label = category == Category::color ? object.color : object.shape;
      const auto& entries = config.lexicon.entries(category);
      known &= std::any_of(entries.begin(), entries.end(), [&](const LexiconEntry& e) { return e.label == label; });
    }
    if (!known) errors.push_back("object " + object.color + " " + object.shape + " is not in the lexicon");
  }
  return errors;
}

SessionConfig session_config_from_json(const nlohmann::json& json) {
  static const std::vector<std::string> known{"session",       "fade_ms", "gap_ms",     "time_limit_ms",
                                              "lexicon",       "objects", "object_seed"};
  for (const auto& [key, value] : json.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown session config field '" + key + "'");
  SessionConfig config;
  config.session_id = json.at("session").get<std::string>();
  config.fade_ms = json.value("fade_ms", config.fade_ms);
  config.gap_ms = json.value("gap_ms", config.gap_ms);
  config.time_limit_ms = json.value("time_limit_ms", config.time_limit_ms);
  if (json.contains("lexicon")) config.lexicon = lexicon_from_json(json.at("lexicon"));
  if (json.contains("objects") && json.contains("object_seed"))
    throw std::invalid_argument("give either objects or object_seed, not both");
  if (json.contains("objects")) {
    for (const auto& o : json.at("objects")) config.objects.push_back(object_from_json(o));
  } else {
    config.objects =
        make_object_sequence(config.lexicon, kDefaultObjectCount, json.value("object_seed", std::uint64_t{1}));
  }
  if (auto errors = validate(config); !errors.empty()) throw ValidationError(errors);
  return config;
}

ojson to_json(const SessionConfig& config) {
  ojson out;
  out["session"] = config.session_id;
  out["fade_ms"] = config.fade_ms;
  out["gap_ms"] = config.gap_ms;
  out["time_limit_ms"] = config.time_limit_ms;
  out["lexicon"] = to_json(config.lexicon);
  auto& objects = out["objects"] = ojson::array();
  for (const auto& o : config.objects) objects.push_back(to_json(o));
  return out;
}

std::vector<SessionConfig> session_configs_from_json(const nlohmann::json& json) {
  std::vector<SessionConfig> out;
  if (json.contains("sessions")) {
    for (const auto& s : json.at("sessions")) out.push_back(session_config_from_json(s));
  } else {
    out.push_back(session_config_from_json(json));
  }
  return out;
}

// ─── Wire protocol ───────────────────────────────────────────────────────────

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_message: return "bad-message";
    case ErrorCode::unknown_session: return "unknown-session";
    case ErrorCode::role_taken: return "role-taken";
    case ErrorCode::not_joined: return "not-joined";
    case ErrorCode::already_joined: return "already-joined";
    case ErrorCode::session_inactive: return "session-inactive";
    case ErrorCode::session_ended: return "session-ended";
    case ErrorCode::deletion_not_permitted: return "deletion-not-permitted";
    case ErrorCode::invalid_char: return "invalid-char";
    case ErrorCode::multi_char: return "multi-char";
    case ErrorCode::permission_denied: return "permission-denied";
  }
  return "?";
}

ClientMessage parse_client_message(std::string_view text) {
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw ChatError(ErrorCode::bad_message, "message is not valid JSON");
  }
  if (!json.is_object() || !json.contains("type") || !json.at("type").is_string())
    throw ChatError(ErrorCode::bad_message, "message needs a string 'type'");
  const auto type = json.at("type").get<std::string>();
  try {
    if (type == "join") {
      JoinMsg m;
      m.session = json.at("session").get<std::string>();
      m.role = role_from_string(json.at("role").get<std::string>());
      if (json.contains("last_seq")) m.last_seq = json.at("last_seq").get<std::uint64_t>();
      return m;
    }
    if (type == "key") {
      KeyMsg m;
      m.ch = json.at("ch").get<std::string>();
      m.client_ts = json.value("client_ts", std::int64_t{0});
      return m;
    }
    if (type == "advance") return AdvanceMsg{};
  } catch (const ChatError&) {
    throw;
  } catch (const std::exception& e) {
    throw ChatError(ErrorCode::bad_message, std::string("malformed ") + type + " message: " + e.what());
  }
  throw ChatError(ErrorCode::bad_message, "unknown message type '" + type + "'");
}

std::string encode(const ClientMessage& message) {
  ojson out;
  if (const auto* j = std::get_if<JoinMsg>(&message)) {
    out["type"] = "join";
    out["session"] = j->session;
    out["role"] = std::string(to_string(j->role));
    if (j->last_seq) out["last_seq"] = *j->last_seq;
  } else if (const auto* k = std::get_if<KeyMsg>(&message)) {
    out["type"] = "key";
    out["ch"] = k->ch;
    out["client_ts"] = k->client_ts;
  } else {
    out["type"] = "advance";
  }
  return out.dump();
}

std::string joined_message(Role role, std::int64_t fade_ms, const VisualObject& object,
                           const AttributeLexicon* dictionary, std::string_view status) {
  ojson out;
  out["type"] = "joined";
  out["role"] = std::string(to_string(role));
  out["fade_ms"] = fade_ms;
  out["object"] = to_json(object);
  if (dictionary) out["dictionary"] = dictionary_json(*dictionary);
  out["status"] = std::string(status);
  return out.dump();
}

std::string key_message(const CharEvent& event) {
  ojson out;
  out["type"] = "key";
  out["seq"] = event.seq;
  out["sender"] = std::string(to_string(event.sender));
  out["ch"] = encode_utf8(event.ch);
  out["server_ts"] = event.server_ts;
  return out.dump();
}

std::string object_message(int index, const VisualObject& object) {
  ojson out;
  out["type"] = "object";
  out["index"] = index;
  out["object"] = to_json(object);
  return out.dump();
}

std::string end_message(std::string_view reason) {
  ojson out;
  out["type"] = "end";
  out["reason"] = std::string(reason);
  return out.dump();
}

std::string error_message(ErrorCode code, std::string_view detail) {
  ojson out;
  out["type"] = "error";
  out["code"] = std::string(to_string(code));
  if (!detail.empty()) out["message"] = std::string(detail);
  return out.dump();
}

namespace {

std::string status_message(SessionStatus status) {
  ojson out;
  out["type"] = "status";
  out["status"] = std::string(to_string(status));
  return out.dump();
}

}  // namespace

// ─── Session hub ─────────────────────────────────────────────────────────────

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::waiting: return "waiting";
    case SessionStatus::active: return "active";
    case SessionStatus::ended: return "ended";
  }
  return "?";
}

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

struct Hub::Session {
  std::mutex mutex;
  SessionConfig config;
  SessionStatus status = SessionStatus::waiting;
  int object_index = 0;
  std::uint64_t next_seq = 1;
  std::int64_t last_ts = 0;
  std::optional<std::int64_t> started_at;
  std::optional<std::string> end_reason;
  struct Holder {
    ClientId client;
    Sink sink;
  };
  std::map<Role, Holder> holders;
  std::vector<CharEvent> events;
  std::string log_text;
  std::ofstream log;
};

Hub::Hub(std::optional<std::filesystem::path> log_dir, Clock clock)
    : log_dir_(std::move(log_dir)), clock_(std::move(clock)) {
  if (!clock_) throw std::invalid_argument("hub needs a clock");
  if (log_dir_) std::filesystem::create_directories(*log_dir_);
}

Hub::~Hub() = default;

void Hub::add_session(SessionConfig config) {
  if (auto errors = validate(config); !errors.empty()) throw ValidationError(errors);
  auto session = std::make_shared<Session>();
  if (log_dir_) {
    const auto path = *log_dir_ / (config.session_id + ".jsonl");
    if (std::filesystem::exists(path)) {
      session->events = io::parse_log(io::read_file(path));
      for (const auto& e : session->events) {
        if (e.session_id != config.session_id)
          throw std::invalid_argument("log " + path.string() + " belongs to another session");
        session->log_text += io::log_line(e) + "\n";
      }
      if (!session->events.empty()) {
        session->next_seq = session->events.back().seq + 1;
        session->last_ts = session->events.back().server_ts;
        session->object_index = session->events.back().object_index;
      }
    }
    session->log.open(path, std::ios::app | std::ios::binary);
    if (!session->log) throw std::runtime_error("cannot open log file " + path.string());
  }
  session->config = std::move(config);
  std::lock_guard lock(mutex_);
  const auto id = session->config.session_id;
  if (!sessions_.emplace(id, std::move(session)).second) throw std::invalid_argument("duplicate session id " + id);
}

ClientId Hub::connect(Sink sink) {
  std::lock_guard lock(mutex_);
  const ClientId id = next_client_++;
  clients_[id] = Client{std::move(sink), {}, std::nullopt};
  return id;
}

void Hub::disconnect(ClientId client) {
  std::shared_ptr<Session> session;
  std::optional<Role> role;
  {
    std::lock_guard lock(mutex_);
    auto it = clients_.find(client);
    if (it == clients_.end()) return;
    role = it->second.role;
    if (role) session = sessions_.at(it->second.session);
    clients_.erase(it);
  }
  if (!session) return;
  std::lock_guard lock(session->mutex);
  auto it = session->holders.find(*role);
  if (it != session->holders.end() && it->second.client == client) session->holders.erase(it);
}

std::shared_ptr<Hub::Session> Hub::find(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ChatError(ErrorCode::unknown_session, "unknown session '" + session_id + "'");
  return it->second;
}

std::shared_ptr<Hub::Session> Hub::session_of(ClientId client, Role* role) const {
  std::lock_guard lock(mutex_);
  auto it = clients_.find(client);
  if (it == clients_.end() || !it->second.role) throw ChatError(ErrorCode::not_joined, "join a session first");
  *role = *it->second.role;
  return sessions_.at(it->second.session);
}

void Hub::send(ClientId client, const std::string& message) const {
  Sink sink;
  {
    std::lock_guard lock(mutex_);
    auto it = clients_.find(client);
    if (it == clients_.end()) return;
    sink = it->second.sink;
  }
  if (sink) sink(message);
}

void Hub::broadcast(Session& session, const std::string& message) const {
  for (const auto& [role, holder] : session.holders)
    if (holder.sink) holder.sink(message);
}

void Hub::end_locked(Session& session, std::string_view reason) {
  if (session.status == SessionStatus::ended) return;
  session.status = SessionStatus::ended;
  session.end_reason = std::string(reason);
  broadcast(session, end_message(reason));
}

bool Hub::expire_locked(Session& session) {
  if (session.status == SessionStatus::active && session.started_at &&
      clock_() - *session.started_at >= session.config.time_limit_ms) {
    end_locked(session, "time_limit");
    return true;
  }
  return false;
}

void Hub::join(ClientId client, const JoinMsg& message) {
  Sink sink;
  {
    std::lock_guard lock(mutex_);
    auto it = clients_.find(client);
    if (it == clients_.end()) throw ChatError(ErrorCode::not_joined, "unknown client");
    if (it->second.role) throw ChatError(ErrorCode::already_joined, "client already joined a session");
    sink = it->second.sink;
  }
  auto session = find(message.session);
  std::lock_guard lock(session->mutex);
  expire_locked(*session);
  if (session->status == SessionStatus::ended) throw ChatError(ErrorCode::session_ended, "session has ended");
  if (session->holders.count(message.role))
    throw ChatError(ErrorCode::role_taken, std::string(to_string(message.role)) + " is already taken");
  {
    std::lock_guard hub_lock(mutex_);
    auto it = clients_.find(client);
    if (it == clients_.end()) throw ChatError(ErrorCode::not_joined, "unknown client");
    it->second.session = message.session;
    it->second.role = message.role;
  }
  session->holders[message.role] = Session::Holder{client, sink};
  const bool activates = session->status == SessionStatus::waiting && session->holders.size() == 2;
  if (activates) {
    session->status = SessionStatus::active;
    if (!session->started_at) session->started_at = clock_();
  }
  const auto& object = session->config.objects.at(static_cast<std::size_t>(session->object_index));
  const AttributeLexicon* dictionary = message.role == Role::tutor ? &session->config.lexicon : nullptr;
  if (sink) {
    sink(joined_message(message.role, session->config.fade_ms, object, dictionary, to_string(session->status)));
    if (message.last_seq)
      for (const auto& e : session->events)
        if (e.seq > *message.last_seq) sink(key_message(e));
  }
  if (activates) broadcast(*session, status_message(SessionStatus::active));
}

CharEvent Hub::relay_key(ClientId client, const KeyMsg& message) {
  Role role;
  auto session = session_of(client, &role);
  std::lock_guard lock(session->mutex);
  auto holder = session->holders.find(role);
  if (holder == session->holders.end() || holder->second.client != client)
    throw ChatError(ErrorCode::not_joined, "client no longer holds its role");
  expire_locked(*session);
  if (session->status == SessionStatus::ended) throw ChatError(ErrorCode::session_ended, "session has ended");
  if (session->status != SessionStatus::active) throw ChatError(ErrorCode::session_inactive, "waiting for both roles");

  std::u32string decoded;
  try {
    decoded = decode_utf8(message.ch);
  } catch (const std::exception&) {
    throw ChatError(ErrorCode::invalid_char, "character is not valid UTF-8");
  }
  if (decoded.size() != 1) throw ChatError(ErrorCode::multi_char, "send exactly one character per message");
  const char32_t ch = decoded.front();
  if (ch == 0x08 || ch == 0x7F) throw ChatError(ErrorCode::deletion_not_permitted, "deletion is not permitted");
  if (!is_storable_char(ch)) throw ChatError(ErrorCode::invalid_char, "control characters are not accepted");

  CharEvent event;
  event.seq = session->next_seq;
  event.session_id = session->config.session_id;
  event.object_index = session->object_index;
  event.sender = role;
  event.ch = ch;
  event.client_ts = message.client_ts;
  event.server_ts = clock_();
  if (!session->events.empty() && event.server_ts <= session->last_ts) event.server_ts = session->last_ts + 1;

  const std::string line = io::log_line(event) + "\n";
  if (session->log.is_open()) {
    session->log.write(line.data(), static_cast<std::streamsize>(line.size()));
    session->log.flush();
    if (!session->log) throw std::runtime_error("log write failed for session " + event.session_id);
  }
  session->log_text += line;
  session->events.push_back(event);
  session->next_seq += 1;
  session->last_ts = event.server_ts;
  broadcast(*session, key_message(event));
  return event;
}

void Hub::advance(ClientId client) {
  Role role;
  auto session = session_of(client, &role);
  std::lock_guard lock(session->mutex);
  if (role != Role::tutor) throw ChatError(ErrorCode::permission_denied, "only the tutor can advance");
  expire_locked(*session);
  if (session->status == SessionStatus::ended) throw ChatError(ErrorCode::session_ended, "session has ended");
  if (session->status != SessionStatus::active) throw ChatError(ErrorCode::session_inactive, "waiting for both roles");
  const auto next = static_cast<std::size_t>(session->object_index) + 1;
  if (next >= session->config.objects.size()) {
    end_locked(*session, "completed");
    return;
  }
  session->object_index = static_cast<int>(next);
  broadcast(*session, object_message(session->object_index, session->config.objects[next]));
}

void Hub::handle(ClientId client, std::string_view text) {
  try {
    auto message = parse_client_message(text);
    if (auto* j = std::get_if<JoinMsg>(&message)) {
      join(client, *j);
    } else if (auto* k = std::get_if<KeyMsg>(&message)) {
      relay_key(client, *k);
    } else {
      advance(client);
    }
  } catch (const ChatError& e) {
    send(client, error_message(e.code(), e.what()));
  }
}

void Hub::tick() {
  std::vector<std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, s] : sessions_) sessions.push_back(s);
  }
  for (auto& s : sessions) {
    std::lock_guard lock(s->mutex);
    expire_locked(*s);
  }
}

std::string Hub::export_log(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return session->log_text;
}

std::vector<CharEvent> Hub::events(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return session->events;
}

SessionSnapshot Hub::snapshot(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  SessionSnapshot out;
  out.status = session->status;
  out.object_index = session->object_index;
  out.next_seq = session->next_seq;
  for (const auto& [role, holder] : session->holders) out.joined.push_back(role);
  out.end_reason = session->end_reason;
  return out;
}

std::vector<std::string> Hub::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace wordlearn::chat
