#include "wordlearn/chat_server.hpp"

#include <chrono>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace wordlearn::chat {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using error_code = boost::system::error_code;

namespace {

inline constexpr std::size_t kMaxLine = 64 * 1024;

// Outgoing queue and hub registration shared by both transports. All socket
// work happens on the connection's strand.
class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(Hub& hub, asio::any_io_executor strand) : hub_(hub), strand_(std::move(strand)) {}
  virtual ~Connection() = default;

  void register_with_hub() {
    std::weak_ptr<Connection> weak = shared_from_this();
    client_ = hub_.connect([weak](const std::string& message) {
      if (auto self = weak.lock()) self->send(message);
    });
  }

  void send(std::string message) {
    asio::post(strand_, [self = shared_from_this(), message = std::move(message)]() mutable {
      if (self->closed_) return;
      self->queue_.push_back(std::move(message));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    hub_.disconnect(client_);
    shutdown();
  }

 protected:
  virtual void write_next() = 0;
  virtual void shutdown() = 0;

  void on_written(const error_code& ec) {
    if (ec) return close();
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  Hub& hub_;
  asio::any_io_executor strand_;  // the socket's strand
  ClientId client_ = 0;
  std::deque<std::string> queue_;
  bool closed_ = false;
};

class LineConnection : public Connection {
 public:
  LineConnection(Hub& hub, tcp::socket socket, std::string pending)
      : Connection(hub, socket.get_executor()),
        socket_(std::move(socket)),
        buffer_(std::move(pending)) {}

  void run() {
    register_with_hub();
    asio::dispatch(strand_, [self = std::static_pointer_cast<LineConnection>(shared_from_this())] { self->read(); });
  }

 private:
  void read() {
    asio::async_read_until(socket_, asio::dynamic_buffer(buffer_, kMaxLine), '\n',
                           [self = std::static_pointer_cast<LineConnection>(
                                                             shared_from_this())](const error_code& ec, std::size_t n) {
                             self->on_read(ec, n);
                           });
  }

  void on_read(const error_code& ec, std::size_t n) {
    if (ec) return close();
    std::string line = buffer_.substr(0, n - 1);
    buffer_.erase(0, n);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) hub_.handle(client_, line);
    read();
  }

  void write_next() override {
    out_ = queue_.front() + "\n";
    asio::async_write(socket_, asio::buffer(out_),
                      [self = shared_from_this()](const error_code& ec, std::size_t) {
                        static_cast<LineConnection*>(self.get())->on_written(ec);
                      });
  }

  void shutdown() override {
    error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  tcp::socket socket_;
  std::string buffer_;
  std::string out_;
};

class SocketConnection : public Connection {
 public:
  SocketConnection(Hub& hub, tcp::socket socket, beast::flat_buffer buffer)
      : Connection(hub, socket.get_executor()),
        ws_(std::move(socket)),
        buffer_(std::move(buffer)) {}

  void run() {
    asio::dispatch(strand_, [self = std::static_pointer_cast<SocketConnection>(shared_from_this())] {
      http::async_read(self->ws_.next_layer(), self->buffer_, self->request_, [self](const error_code& ec, std::size_t) {
        if (ec) return self->close_quietly();
        self->ws_.async_accept(self->request_, [self](const error_code& ec2) {
          if (ec2) return self->close_quietly();
          self->ws_.text(true);
          self->register_with_hub();
          self->read();
        });
      });
    });
  }

 private:
  void close_quietly() {
    closed_ = true;
    error_code ignored;
    ws_.next_layer().close(ignored);
  }

  void read() {
    ws_.async_read(buffer_, [self = std::static_pointer_cast<SocketConnection>(
                                                             shared_from_this())](const error_code& ec, std::size_t) {
                     if (ec) return self->close();
                     const std::string text = beast::buffers_to_string(self->buffer_.data());
                     self->buffer_.consume(self->buffer_.size());
                     self->hub_.handle(self->client_, text);
                     self->read();
                   });
  }

  void write_next() override {
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](const error_code& ec, std::size_t) {
                      static_cast<SocketConnection*>(self.get())->on_written(ec);
                    });
  }

  void shutdown() override {
    error_code ignored;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ignored);
    ws_.next_layer().close(ignored);
  }

  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
};

// Reads until the transport can be told apart, then hands the socket over.
class Detector : public std::enable_shared_from_this<Detector> {
 public:
  Detector(Hub& hub, tcp::socket socket) : hub_(hub), socket_(std::move(socket)) {}

  void run() { read(); }

 private:
  void read() {
    auto space = buffer_.prepare(512);
    socket_.async_read_some(space, [self = shared_from_this()](const error_code& ec, std::size_t n) {
      if (ec) return;
      self->buffer_.commit(n);
      self->decide();
    });
  }

  void decide() {
    const std::string head = beast::buffers_to_string(buffer_.data());
    const std::string_view get = "GET ";
    const std::size_t k = std::min(head.size(), get.size());
    const bool maybe_get = head.compare(0, k, get.substr(0, k)) == 0;
    if (maybe_get && head.size() < get.size()) return read();
    if (maybe_get) {
      std::make_shared<SocketConnection>(hub_, std::move(socket_), std::move(buffer_))->run();
    } else {
      std::make_shared<LineConnection>(hub_, std::move(socket_), head)->run();
    }
  }

  Hub& hub_;
  tcp::socket socket_;
  beast::flat_buffer buffer_;
};

}  // namespace

struct Server::Impl {
  Hub& hub;
  std::string address;
  std::uint16_t requested_port;
  std::size_t thread_count;
  asio::io_context io;
  tcp::acceptor acceptor{io};
  asio::steady_timer ticker{io};
  asio::signal_set signals{io};
  std::vector<std::thread> threads;
  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
  bool stop_requested = false;

  void request_stop() {
    std::lock_guard lock(mutex);
    stop_requested = true;
    stopped_cv.notify_all();
  }

  Impl(Hub& h, std::string a, std::uint16_t p, std::size_t t)
      : hub(h), address(std::move(a)), requested_port(p), thread_count(std::max<std::size_t>(1, t)) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](const error_code& ec, tcp::socket socket) {
      if (ec == asio::error::operation_aborted) return;
      if (!ec) {
        socket.set_option(tcp::no_delay(true));
        std::make_shared<Detector>(hub, std::move(socket))->run();
      }
      accept();
    });
  }

  void tick() {
    ticker.expires_after(std::chrono::milliseconds(250));
    ticker.async_wait([this](const error_code& ec) {
      if (ec) return;
      hub.tick();
      tick();
    });
  }
};

Server::Server(Hub& hub, std::string address, std::uint16_t port, std::size_t threads)
    : impl_(std::make_unique<Impl>(hub, std::move(address), port, threads)) {}

Server::~Server() { stop(); }

void Server::start() {
  const tcp::endpoint endpoint(asio::ip::make_address(impl_->address), impl_->requested_port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
  impl_->accept();
  impl_->tick();
  for (std::size_t i = 0; i < impl_->thread_count; ++i) impl_->threads.emplace_back([this] { impl_->io.run(); });
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  asio::post(impl_->io, [this] {
    error_code ignored;
    impl_->acceptor.close(ignored);
    impl_->ticker.cancel();
    impl_->signals.cancel(ignored);
  });
  impl_->io.stop();
  for (auto& t : impl_->threads)
    if (t.joinable()) t.join();
  impl_->request_stop();
}

void Server::stop_on_signals() {
  impl_->signals.add(SIGINT);
  impl_->signals.add(SIGTERM);
  impl_->signals.async_wait([this](const error_code& ec, int) {
    if (!ec) impl_->request_stop();
  });
}

void Server::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stop_requested; });
}

}  // namespace wordlearn::chat
