#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "wordlearn/model.hpp"

namespace wordlearn::chat {

// ─── Configuration ───────────────────────────────────────────────────────────

struct SessionConfig {
  std::string session_id;
  std::int64_t fade_ms = 1000;
  std::int64_t gap_ms = 1100;
  AttributeLexicon lexicon = default_lexicon();
  std::vector<VisualObject> objects;
  std::int64_t time_limit_ms = 1'800'000;
};

inline constexpr std::size_t kDefaultObjectCount = 9;

std::vector<std::string> validate(const SessionConfig& config);

// Fields: session (required), fade_ms, gap_ms, time_limit_ms, lexicon
// (inline object), objects (list) or object_seed (nine objects drawn from the
// lexicon).
SessionConfig session_config_from_json(const nlohmann::json& json);
nlohmann::ordered_json to_json(const SessionConfig& config);

// A single session object or {"sessions": [...]}.
std::vector<SessionConfig> session_configs_from_json(const nlohmann::json& json);

// ─── Wire protocol ───────────────────────────────────────────────────────────

enum class ErrorCode {
  bad_message,
  unknown_session,
  role_taken,
  not_joined,
  already_joined,
  session_inactive,
  session_ended,
  deletion_not_permitted,
  invalid_char,
  multi_char,
  permission_denied,
};

std::string_view to_string(ErrorCode code);

class ChatError : public std::runtime_error {
 public:
  ChatError(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct JoinMsg {
  std::string session;
  Role role = Role::tutor;
  std::optional<std::uint64_t> last_seq;  // resume: replay events after this seq
};

struct KeyMsg {
  std::string ch;  // raw text, validated by the hub
  std::int64_t client_ts = 0;
};

struct AdvanceMsg {};

using ClientMessage = std::variant<JoinMsg, KeyMsg, AdvanceMsg>;

// Throws ChatError(bad_message) on malformed JSON or an unknown type.
ClientMessage parse_client_message(std::string_view text);
std::string encode(const ClientMessage& message);

std::string joined_message(Role role, std::int64_t fade_ms, const VisualObject& object,
                           const AttributeLexicon* dictionary, std::string_view status);
std::string key_message(const CharEvent& event);
std::string object_message(int index, const VisualObject& object);
std::string end_message(std::string_view reason);
std::string error_message(ErrorCode code, std::string_view detail);

// ─── Session hub ─────────────────────────────────────────────────────────────

enum class SessionStatus { waiting, active, ended };

std::string_view to_string(SessionStatus status);

using ClientId = std::uint64_t;
// Receives encoded server messages, one per call, in the order they are sent.
using Sink = std::function<void(const std::string&)>;
using Clock = std::function<std::int64_t()>;

// Milliseconds since the Unix epoch.
std::int64_t system_clock_ms();

struct SessionSnapshot {
  SessionStatus status = SessionStatus::waiting;
  int object_index = 0;
  std::uint64_t next_seq = 1;
  std::vector<Role> joined;
  std::optional<std::string> end_reason;
};

// Serializes all events of a session behind one lock, so every client sees
// the same seq order. server_ts is the hub clock, bumped by 1 ms when needed
// to stay strictly increasing within a session.
class Hub {
 public:
  explicit Hub(std::optional<std::filesystem::path> log_dir = std::nullopt, Clock clock = system_clock_ms);
  ~Hub();
  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  // Throws std::invalid_argument for an invalid config or a duplicate id.
  void add_session(SessionConfig config);

  ClientId connect(Sink sink);
  // Frees the client's role for a later rejoin; the session keeps running.
  void disconnect(ClientId client);

  // Dispatches one client message; failures are reported to the client as an
  // error message and leave all state unchanged.
  void handle(ClientId client, std::string_view text);

  // Typed entry points; these throw ChatError.
  void join(ClientId client, const JoinMsg& message);
  CharEvent relay_key(ClientId client, const KeyMsg& message);
  void advance(ClientId client);

  // Ends sessions past their time limit.
  void tick();

  // JSONL, one event per line in seq order. Throws ChatError(unknown_session).
  std::string export_log(const std::string& session_id) const;
  std::vector<CharEvent> events(const std::string& session_id) const;
  SessionSnapshot snapshot(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;

 private:
  struct Session;
  struct Client {
    Sink sink;
    std::string session;
    std::optional<Role> role;
  };

  std::shared_ptr<Session> find(const std::string& session_id) const;
  std::shared_ptr<Session> session_of(ClientId client, Role* role) const;
  void send(ClientId client, const std::string& message) const;
  void broadcast(Session& session, const std::string& message) const;
  void end_locked(Session& session, std::string_view reason);
  bool expire_locked(Session& session);

  std::optional<std::filesystem::path> log_dir_;
  Clock clock_;
  mutable std::mutex mutex_;  // guards sessions_, clients_, next_client_
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<ClientId, Client> clients_;
  ClientId next_client_ = 1;
};

}  // namespace wordlearn::chat
