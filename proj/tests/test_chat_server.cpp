#include <gtest/gtest.h>

#include "bots.hpp"
#include "wordlearn/corpus_io.hpp"

using namespace wordlearn;
using namespace std::chrono_literals;

namespace {

chat::SessionConfig session(const std::string& id) {
  chat::SessionConfig c;
  c.session_id = id;
  c.objects = make_object_sequence(c.lexicon, chat::kDefaultObjectCount, 3);
  return c;
}

}  // namespace

TEST(Server, TwoBotsRelayTenThousandCharacters) {
  const auto r = bots::run_relay(5000);
  EXPECT_TRUE(r.completed) << r.detail;
  EXPECT_TRUE(r.contiguous);
  EXPECT_TRUE(r.scripts_match);
  EXPECT_TRUE(r.timestamps_increase);
  EXPECT_TRUE(r.same_order_for_both);
  EXPECT_LT(r.seconds, 30.0);
  EXPECT_TRUE(r.detail.empty()) << r.detail;
}

TEST(Server, WebSocketAndLineClientsShareASession) {
  chat::Hub hub;
  hub.add_session(session("mixed"));
  chat::Server server(hub, "127.0.0.1", 0);
  server.start();
  {
    bots::SocketBot tutor(server.port());
    bots::LineBot learner(server.port());
    tutor.send(bots::join("mixed", "tutor"));
    ASSERT_TRUE(tutor.wait_type("joined"));
    EXPECT_TRUE(tutor.of_type("joined").at(0).contains("dictionary"));
    learner.send(bots::join("mixed", "learner"));
    ASSERT_TRUE(tutor.wait_active());
    ASSERT_TRUE(learner.wait_active());
    tutor.send(bots::key("s", 1));
    learner.send(bots::key("?", 2));
    ASSERT_TRUE(tutor.wait_keys(2, 5s));
    ASSERT_TRUE(learner.wait_keys(2, 5s));
    EXPECT_EQ(tutor.of_type("key"), learner.of_type("key"));
    tutor.send(bots::key("\b", 3));
    ASSERT_TRUE(tutor.wait_type("error"));
    EXPECT_EQ(tutor.of_type("error").at(0).at("code"), "deletion-not-permitted");
    tutor.send(nlohmann::json{{"type", "advance"}});
    ASSERT_TRUE(learner.wait_type("object"));
    EXPECT_EQ(learner.of_type("object").at(0).at("index"), 1);
  }
  server.stop();
  EXPECT_EQ(hub.events("mixed").size(), 2u);
}

TEST(Server, MalformedLineGetsError) {
  chat::Hub hub;
  hub.add_session(session("bad"));
  chat::Server server(hub, "127.0.0.1", 0);
  server.start();
  {
    bots::LineBot bot(server.port());
    bots::json garbage = "not an object";
    bot.send(garbage);
    ASSERT_TRUE(bot.wait_type("error"));
    EXPECT_EQ(bot.of_type("error").at(0).at("code"), "bad-message");
  }
  server.stop();
}

TEST(Server, DisconnectFreesRole) {
  chat::Hub hub;
  hub.add_session(session("re"));
  chat::Server server(hub, "127.0.0.1", 0);
  server.start();
  {
    bots::LineBot first(server.port());
    first.send(bots::join("re", "tutor"));
    ASSERT_TRUE(first.wait_type("joined"));
  }
  bool rejoined = false;
  for (int attempt = 0; attempt < 50 && !rejoined; ++attempt) {
    bots::LineBot second(server.port());
    second.send(bots::join("re", "tutor"));
    second.wait_any(2s);
    rejoined = !second.of_type("joined").empty();
    if (!rejoined) std::this_thread::sleep_for(20ms);
  }
  EXPECT_TRUE(rejoined);
  server.stop();
}

TEST(Server, StopIsIdempotent) {
  chat::Hub hub;
  chat::Server server(hub, "127.0.0.1", 0);
  server.start();
  EXPECT_GT(server.port(), 0);
  server.stop();
  server.stop();
}
