#include <gtest/gtest.h>

#include <filesystem>

#include "wordlearn/chat.hpp"
#include "wordlearn/corpus_io.hpp"

using namespace wordlearn;
using namespace wordlearn::chat;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Inbox {
  std::vector<json> messages;
  Sink sink() {
    return [this](const std::string& m) { messages.push_back(json::parse(m)); };
  }
  std::vector<json> of_type(const std::string& type) const {
    std::vector<json> out;
    for (const auto& m : messages)
      if (m.at("type") == type) out.push_back(m);
    return out;
  }
  const json& last() const { return messages.back(); }
};

SessionConfig session(const std::string& id = "s1") {
  SessionConfig c;
  c.session_id = id;
  c.objects = make_object_sequence(c.lexicon, kDefaultObjectCount, 1);
  return c;
}

std::string join(const std::string& s, const std::string& role) {
  return json{{"type", "join"}, {"session", s}, {"role", role}}.dump();
}

std::string key(const std::string& ch, std::int64_t ts = 0) {
  return json{{"type", "key"}, {"ch", ch}, {"client_ts", ts}}.dump();
}

struct Fixture {
  std::int64_t now = 1000;
  Hub hub;
  Inbox tutor_box, learner_box;
  ClientId tutor = 0, learner = 0;

  explicit Fixture(std::optional<fs::path> dir = std::nullopt) : hub(dir, [this] { return now; }) {
    hub.add_session(session());
    tutor = hub.connect(tutor_box.sink());
    learner = hub.connect(learner_box.sink());
  }
  void join_both() {
    hub.handle(tutor, join("s1", "tutor"));
    hub.handle(learner, join("s1", "learner"));
  }
};

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Protocol, ClientMessagesRoundTrip) {
  const ClientMessage join_msg = JoinMsg{"s1", Role::learner, 7};
  const auto back = std::get<JoinMsg>(parse_client_message(encode(join_msg)));
  EXPECT_EQ(back.session, "s1");
  EXPECT_EQ(back.role, Role::learner);
  EXPECT_EQ(back.last_seq, 7u);
  const auto k = std::get<KeyMsg>(parse_client_message(encode(ClientMessage{KeyMsg{"a", 120}})));
  EXPECT_EQ(k.ch, "a");
  EXPECT_EQ(k.client_ts, 120);
  EXPECT_TRUE(std::holds_alternative<AdvanceMsg>(parse_client_message(R"({"type":"advance"})")));
}

TEST(Protocol, MalformedMessages) {
  for (const char* text : {"not json", "[]", R"({"type":"wave"})", R"({"type":"join","session":"s1"})",
                           R"({"type":"key"})", R"({"type":3})"}) {
    try {
      parse_client_message(text);
      ADD_FAILURE() << text;
    } catch (const ChatError& e) {
      EXPECT_EQ(e.code(), ErrorCode::bad_message) << text;
    }
  }
}

TEST(Protocol, ErrorCodesAreKebabCase) {
  EXPECT_EQ(to_string(ErrorCode::role_taken), "role-taken");
  EXPECT_EQ(to_string(ErrorCode::deletion_not_permitted), "deletion-not-permitted");
  EXPECT_EQ(json::parse(error_message(ErrorCode::multi_char, "x")).at("code"), "multi-char");
}

TEST(SessionConfigJson, Parsing) {
  const auto c = session_config_from_json(json{{"session", "room-1"}, {"object_seed", 4}, {"fade_ms", 900}});
  EXPECT_EQ(c.session_id, "room-1");
  EXPECT_EQ(c.objects.size(), kDefaultObjectCount);
  EXPECT_EQ(c.fade_ms, 900);
  EXPECT_THROW(session_config_from_json(json{{"session", "x"}, {"colour", 1}}), std::exception);
  EXPECT_THROW(session_config_from_json(json{{"session", "bad id!"}}), std::exception);
  const auto many = session_configs_from_json(json{{"sessions", {{{"session", "a"}}, {{"session", "b"}}}}});
  EXPECT_EQ(many.size(), 2u);
  const auto back = session_config_from_json(json::parse(to_json(c).dump()));
  EXPECT_EQ(back.objects, c.objects);
}

TEST(Join, TutorGetsDictionaryAndWaits) {
  Fixture f;
  f.hub.handle(f.tutor, join("s1", "tutor"));
  const auto& ack = f.tutor_box.last();
  EXPECT_EQ(ack.at("type"), "joined");
  EXPECT_EQ(ack.at("status"), "waiting");
  EXPECT_EQ(ack.at("fade_ms"), 1000);
  std::size_t words = 0;
  for (const auto& [cat, entries] : ack.at("dictionary").items()) words += entries.size();
  EXPECT_EQ(words, 6u);
  EXPECT_EQ(f.hub.snapshot("s1").status, SessionStatus::waiting);
}

TEST(Join, LearnerSeesNoWords) {
  Fixture f;
  f.join_both();
  const auto ack = f.learner_box.of_type("joined").at(0);
  EXPECT_FALSE(ack.contains("dictionary"));
  EXPECT_TRUE(ack.contains("object"));
  EXPECT_EQ(ack.dump().find("sako"), std::string::npos);
}

TEST(Join, SecondTutorIsRejected) {
  Fixture f;
  f.hub.handle(f.tutor, join("s1", "tutor"));
  Inbox other;
  const auto c = f.hub.connect(other.sink());
  f.hub.handle(c, join("s1", "tutor"));
  EXPECT_EQ(other.last().at("type"), "error");
  EXPECT_EQ(other.last().at("code"), "role-taken");
}

TEST(Join, BothJoinedActivates) {
  Fixture f;
  f.join_both();
  const auto snap = f.hub.snapshot("s1");
  EXPECT_EQ(snap.status, SessionStatus::active);
  EXPECT_EQ(snap.object_index, 0);
  EXPECT_EQ(f.tutor_box.of_type("joined").size(), 1u);
  EXPECT_EQ(f.learner_box.of_type("joined").size(), 1u);
  EXPECT_EQ(f.tutor_box.of_type("status").at(0).at("status"), "active");
  EXPECT_EQ(f.learner_box.of_type("status").at(0).at("status"), "active");
}

TEST(Join, UnknownSessionAndDoubleJoin) {
  Fixture f;
  f.hub.handle(f.tutor, join("nope", "tutor"));
  EXPECT_EQ(f.tutor_box.last().at("code"), "unknown-session");
  f.hub.handle(f.tutor, join("s1", "tutor"));
  f.hub.handle(f.tutor, join("s1", "learner"));
  EXPECT_EQ(f.tutor_box.last().at("code"), "already-joined");
}

TEST(Relay, FirstKeyReachesBoth) {
  Fixture f;
  f.join_both();
  f.hub.handle(f.tutor, key("a", 120));
  for (auto* box : {&f.tutor_box, &f.learner_box}) {
    const auto k = box->of_type("key").at(0);
    EXPECT_EQ(k.at("seq"), 1);
    EXPECT_EQ(k.at("sender"), "tutor");
    EXPECT_EQ(k.at("ch"), "a");
  }
}

TEST(Relay, BackspaceIsRejected) {
  Fixture f;
  f.join_both();
  f.hub.handle(f.tutor, key("a"));
  const auto before = f.hub.export_log("s1");
  f.hub.handle(f.learner, key("\b", 200));
  EXPECT_EQ(f.learner_box.last().at("code"), "deletion-not-permitted");
  f.hub.handle(f.learner, key("\x7f", 210));
  EXPECT_EQ(f.learner_box.last().at("code"), "deletion-not-permitted");
  EXPECT_EQ(f.hub.export_log("s1"), before);
  EXPECT_EQ(f.tutor_box.of_type("key").size(), 1u);
}

TEST(Relay, PasteAndControlCharsAreRejected) {
  Fixture f;
  f.join_both();
  f.hub.handle(f.learner, key("hello"));
  EXPECT_EQ(f.learner_box.last().at("code"), "multi-char");
  f.hub.handle(f.learner, key("\n"));
  EXPECT_EQ(f.learner_box.last().at("code"), "invalid-char");
  f.hub.handle(f.learner, std::string("{\"type\":\"key\",\"ch\":\"\xC3\"}"));
  EXPECT_EQ(f.learner_box.last().at("type"), "error");
  EXPECT_TRUE(f.hub.events("s1").empty());
}

TEST(Relay, KeysBeforeActivationAreRejected) {
  Fixture f;
  f.hub.handle(f.tutor, join("s1", "tutor"));
  f.hub.handle(f.tutor, key("a"));
  EXPECT_EQ(f.tutor_box.last().at("code"), "session-inactive");
  Inbox stranger;
  const auto c = f.hub.connect(stranger.sink());
  f.hub.handle(c, key("a"));
  EXPECT_EQ(stranger.last().at("code"), "not-joined");
}

TEST(Relay, ServerTimestampsStrictlyIncrease) {
  Fixture f;
  f.join_both();
  for (int i = 0; i < 20; ++i) f.hub.handle(i % 2 ? f.learner : f.tutor, key("x"));  // clock frozen
  const auto events = f.hub.events("s1");
  ASSERT_EQ(events.size(), 20u);
  for (std::size_t i = 1; i < events.size(); ++i) {
    EXPECT_EQ(events[i].seq, events[i - 1].seq + 1);
    EXPECT_GT(events[i].server_ts, events[i - 1].server_ts);
  }
}

TEST(Relay, UnicodeCharacters) {
  Fixture f;
  f.join_both();
  f.hub.handle(f.learner, key("é"));
  EXPECT_EQ(f.hub.events("s1").at(0).ch, U'é');
}

TEST(Advance, LearnerMayNotAdvance) {
  Fixture f;
  f.join_both();
  f.hub.handle(f.learner, R"({"type":"advance"})");
  EXPECT_EQ(f.learner_box.last().at("code"), "permission-denied");
  EXPECT_EQ(f.hub.snapshot("s1").object_index, 0);
}

TEST(Advance, NineAdvancesGiveEightObjectsThenEnd) {
  Fixture f;
  f.join_both();
  for (int i = 0; i < 9; ++i) f.hub.handle(f.tutor, R"({"type":"advance"})");
  for (auto* box : {&f.tutor_box, &f.learner_box}) {
    const auto objects = box->of_type("object");
    ASSERT_EQ(objects.size(), 8u);
    for (int i = 0; i < 8; ++i) EXPECT_EQ(objects[static_cast<std::size_t>(i)].at("index"), i + 1);
    const auto ends = box->of_type("end");
    ASSERT_EQ(ends.size(), 1u);
    EXPECT_EQ(ends[0].at("reason"), "completed");
    EXPECT_EQ(box->last().at("type"), "end");
  }
  EXPECT_EQ(f.hub.snapshot("s1").status, SessionStatus::ended);
  f.hub.handle(f.tutor, key("a"));
  EXPECT_EQ(f.tutor_box.last().at("type"), "error");
}

TEST(Advance, KeysCarryObjectIndex) {
  Fixture f;
  f.join_both();
  f.hub.handle(f.tutor, key("a"));
  f.hub.handle(f.tutor, R"({"type":"advance"})");
  f.hub.handle(f.tutor, key("b"));
  const auto events = f.hub.events("s1");
  EXPECT_EQ(events[0].object_index, 0);
  EXPECT_EQ(events[1].object_index, 1);
}

TEST(TimeLimit, TickEndsExpiredSessions) {
  Fixture f;
  f.join_both();
  f.now += 1'800'001;
  f.hub.tick();
  EXPECT_EQ(f.hub.snapshot("s1").status, SessionStatus::ended);
  EXPECT_EQ(f.hub.snapshot("s1").end_reason, "time_limit");
  EXPECT_EQ(f.learner_box.last().at("type"), "end");
}

TEST(Rejoin, DisconnectFreesRoleAndReplays) {
  Fixture f;
  f.join_both();
  for (const char* c : {"a", "b", "c"}) f.hub.handle(f.tutor, key(c));
  f.hub.disconnect(f.learner);
  Inbox again;
  const auto c = f.hub.connect(again.sink());
  f.hub.handle(c, json{{"type", "join"}, {"session", "s1"}, {"role", "learner"}, {"last_seq", 1}}.dump());
  const auto keys = again.of_type("key");
  ASSERT_EQ(keys.size(), 2u);
  EXPECT_EQ(keys[0].at("seq"), 2);
  EXPECT_EQ(keys[1].at("seq"), 3);
}

TEST(Export, EmptySessionExportsNothing) {
  Fixture f;
  EXPECT_EQ(f.hub.export_log("s1"), "");
  EXPECT_THROW(f.hub.export_log("zz"), ChatError);
}

TEST(Export, RepeatableAndParsable) {
  Fixture f;
  f.join_both();
  for (int i = 0; i < 50; ++i) f.hub.handle(i % 3 ? f.learner : f.tutor, key(std::string(1, static_cast<char>('a' + i % 26))));
  const auto a = f.hub.export_log("s1");
  EXPECT_EQ(a, f.hub.export_log("s1"));
  EXPECT_EQ(io::parse_log(a), f.hub.events("s1"));
}

TEST(Log, WrittenToDiskAndResumed) {
  const auto dir = temp_dir("wordlearn_chat_log");
  {
    Fixture f(dir);
    f.join_both();
    for (const char* c : {"h", "i"}) f.hub.handle(f.tutor, key(c));
    f.hub.handle(f.tutor, R"({"type":"advance"})");
    f.hub.handle(f.learner, key("?"));
    EXPECT_EQ(io::read_file(dir / "s1.jsonl"), f.hub.export_log("s1"));
  }
  Fixture g(dir);
  EXPECT_EQ(g.hub.snapshot("s1").next_seq, 4u);
  EXPECT_EQ(g.hub.snapshot("s1").object_index, 1);
  g.join_both();
  g.hub.handle(g.learner, key("!"));
  const auto events = io::parse_log(io::read_file(dir / "s1.jsonl"));
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[3].seq, 4u);
  EXPECT_EQ(events[3].object_index, 1);
  EXPECT_GT(events[3].server_ts, events[2].server_ts);
  fs::remove_all(dir);
}

TEST(Hub, DuplicateSessionRejected) {
  Hub hub;
  hub.add_session(session());
  EXPECT_THROW(hub.add_session(session()), std::invalid_argument);
  EXPECT_EQ(hub.session_ids(), std::vector<std::string>{"s1"});
}
