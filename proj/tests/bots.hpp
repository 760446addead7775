#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "wordlearn/chat.hpp"
#include "wordlearn/chat_server.hpp"
#include "wordlearn/model.hpp"

namespace bots {

namespace asio = boost::asio;
namespace websocket = boost::beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

// Collects server messages on a background thread.
class Receiver {
 public:
  void push(const std::string& text) {
    auto message = json::parse(text);
    std::lock_guard lock(mutex_);
    if (message.at("type") == "key") ++keys_;
    if (message.at("type") == "status" && message.at("status") == "active") active_ = true;
    messages_.push_back(std::move(message));
    cv_.notify_all();
  }

  template <class Pred>
  bool wait(Pred pred, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, timeout, [&] { return pred(*this); });
  }

  bool wait_active(std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    return wait([](const Receiver& r) { return r.active_; }, timeout);
  }
  bool wait_keys(std::size_t n, std::chrono::milliseconds timeout) {
    return wait([n](const Receiver& r) { return r.keys_ >= n; }, timeout);
  }
  bool wait_type(const std::string& type, std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    return wait(
        [&type](const Receiver& r) {
          for (const auto& m : r.messages_)
            if (m.at("type") == type) return true;
          return false;
        },
        timeout);
  }

  bool wait_any(std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    return wait([](const Receiver& r) { return !r.messages_.empty(); }, timeout);
  }

  std::vector<json> messages() const {
    std::lock_guard lock(mutex_);
    return messages_;
  }
  std::vector<json> of_type(const std::string& type) const {
    std::vector<json> out;
    for (const auto& m : messages())
      if (m.at("type") == type) out.push_back(m);
    return out;
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<json> messages_;
  std::size_t keys_ = 0;
  bool active_ = false;
};

// Newline-delimited JSON over plain TCP.
class LineBot : public Receiver {
 public:
  LineBot(std::uint16_t port) : socket_(io_) {
    socket_.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    socket_.set_option(tcp::no_delay(true));
    reader_ = std::thread([this] {
      std::string buffer;
      boost::system::error_code ec;
      while (true) {
        const auto n = asio::read_until(socket_, asio::dynamic_buffer(buffer), '\n', ec);
        if (ec) break;
        push(buffer.substr(0, n - 1));
        buffer.erase(0, n);
      }
    });
  }
  ~LineBot() {
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
    if (reader_.joinable()) reader_.join();
  }

  void send(const json& message) {
    const std::string line = message.dump() + "\n";
    asio::write(socket_, asio::buffer(line));
  }

 private:
  asio::io_context io_;
  tcp::socket socket_;
  std::thread reader_;
};

// One JSON message per web socket text frame.
class SocketBot : public Receiver {
 public:
  SocketBot(std::uint16_t port) : ws_(io_) {
    ws_.next_layer().connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws_.handshake("127.0.0.1:" + std::to_string(port), "/");
    ws_.text(true);
    reader_ = std::thread([this] {
      boost::beast::flat_buffer buffer;
      boost::system::error_code ec;
      while (true) {
        ws_.read(buffer, ec);
        if (ec) break;
        push(boost::beast::buffers_to_string(buffer.data()));
        buffer.consume(buffer.size());
      }
    });
  }
  ~SocketBot() {
    boost::system::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
    if (reader_.joinable()) reader_.join();
  }

  void send(const json& message) {
    std::lock_guard lock(write_mutex_);
    ws_.write(asio::buffer(message.dump()));
  }

 private:
  asio::io_context io_;
  websocket::stream<tcp::socket> ws_;
  std::thread reader_;
  std::mutex write_mutex_;
};

inline json join(const std::string& session, const std::string& role) {
  return json{{"type", "join"}, {"session", session}, {"role", role}};
}

inline json key(const std::string& ch, std::int64_t client_ts) {
  return json{{"type", "key"}, {"ch", ch}, {"client_ts", client_ts}};
}

// Deterministic script of single characters, some of them multi-byte.
inline std::vector<std::string> script(std::size_t n, std::uint64_t salt) {
  static const std::vector<std::string> alphabet{"a", "b", "c", "s", "k", "o", " ", "?", ".", "é", "ü", "!",
                                                 "z", "1", "w", "中"};
  std::vector<std::string> out;
  std::uint64_t state = salt;
  for (std::size_t i = 0; i < n; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    out.push_back(alphabet[(state >> 33) % alphabet.size()]);
  }
  return out;
}

struct RelayResult {
  bool completed = false;
  bool contiguous = false;
  bool scripts_match = false;
  bool timestamps_increase = false;
  bool same_order_for_both = false;
  double seconds = 0.0;
  std::string detail;
};

// Two bots on one session type `per_bot` characters each, concurrently.
inline RelayResult run_relay(std::size_t per_bot) {
  using namespace wordlearn;
  RelayResult result;
  const auto start = std::chrono::steady_clock::now();
  chat::Hub hub;
  chat::SessionConfig config;
  config.session_id = "relay";
  config.objects = make_object_sequence(config.lexicon, chat::kDefaultObjectCount, 1);
  hub.add_session(config);
  chat::Server server(hub, "127.0.0.1", 0);
  server.start();
  const auto scripts = std::vector{script(per_bot, 1), script(per_bot, 2)};
  {
    LineBot tutor(server.port());
    LineBot learner(server.port());
    tutor.send(join("relay", "tutor"));
    learner.send(join("relay", "learner"));
    if (!tutor.wait_active() || !learner.wait_active()) {
      result.detail = "session never became active";
      return result;
    }
    std::thread t1([&] {
      for (std::size_t i = 0; i < per_bot; ++i) tutor.send(key(scripts[0][i], static_cast<std::int64_t>(i)));
    });
    std::thread t2([&] {
      for (std::size_t i = 0; i < per_bot; ++i) learner.send(key(scripts[1][i], static_cast<std::int64_t>(i)));
    });
    t1.join();
    t2.join();
    const auto total = 2 * per_bot;
    result.completed =
        tutor.wait_keys(total, std::chrono::seconds(30)) && learner.wait_keys(total, std::chrono::seconds(30));
    std::vector<std::uint64_t> a, b;
    for (const auto& m : tutor.of_type("key")) a.push_back(m.at("seq").get<std::uint64_t>());
    for (const auto& m : learner.of_type("key")) b.push_back(m.at("seq").get<std::uint64_t>());
    result.same_order_for_both = a == b && a.size() == total;
    if (!tutor.of_type("error").empty() || !learner.of_type("error").empty()) result.detail = "server reported errors";
  }
  server.stop();

  const auto events = hub.events("relay");
  result.contiguous = events.size() == 2 * per_bot;
  result.timestamps_increase = true;
  std::string rebuilt[2];
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].seq != i + 1) result.contiguous = false;
    if (i > 0 && events[i].server_ts <= events[i - 1].server_ts) result.timestamps_increase = false;
    rebuilt[events[i].sender == Role::tutor ? 0 : 1] += encode_utf8(events[i].ch);
  }
  std::string expected[2];
  for (int s = 0; s < 2; ++s)
    for (const auto& ch : scripts[static_cast<std::size_t>(s)]) expected[s] += ch;
  result.scripts_match = rebuilt[0] == expected[0] && rebuilt[1] == expected[1];
  // The export must parse back into the same events.
  const auto exported = hub.export_log("relay");
  if (std::count(exported.begin(), exported.end(), '\n') != static_cast<long>(events.size()))
    result.detail += " export line count differs";
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace bots
