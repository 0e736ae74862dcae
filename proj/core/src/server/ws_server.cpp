#include "collision_ik/server/ws_server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <list>
#include <map>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace cik::server {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class Client;

}  // namespace

struct StreamServer::Impl {
  Impl(Session& s, ServerOptions o) : session(s), options(std::move(o)), acceptor(ioc) {}

  Session& session;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::map<ClientId, std::shared_ptr<Client>> clients;  // network thread only
  ClientId next_id = 1;

  std::thread net_thread;
  std::thread loop_thread;
  std::mutex loop_mutex;
  std::condition_variable loop_cv;
  bool stopping = false;
  bool started = false;
  std::function<void(const TickOutput&)> hook;

  std::atomic<std::uint64_t> ticks{0}, frames_in{0}, errors_out{0}, dropped{0};
  std::atomic<std::size_t> client_count{0};
  std::atomic<bool> loop_running{false};

  void accept();
  void loop();
  void fan_out(const TickOutput& out);
  void forget(ClientId id);
};

namespace {

class Client : public std::enable_shared_from_this<Client> {
 public:
  Client(tcp::socket socket, StreamServer::Impl& server, ClientId id)
      : ws_(std::move(socket)), server_(server), id_(id) {}

  void start() {
    beast::get_lowest_layer(ws_).socket().set_option(tcp::no_delay(true));
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(server_.options.max_frame_bytes);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      self->server_.clients[self->id_] = self;
      self->server_.client_count = self->server_.clients.size();
      self->server_.session.connect(self->id_);
      self->read();
    });
  }

  void send(OutFrame frame) {
    if (!open_) return;
    if (queue_.size() >= server_.options.hard_queue_limit) {
      // A client that reads nothing while provoking errors.
      close();
      return;
    }
    if (frame.droppable && droppable_ >= server_.options.queue_limit) {
      // Oldest droppable frame that is not being written right now.
      auto it = queue_.begin();
      if (writing_) ++it;
      while (it != queue_.end() && !it->droppable) ++it;
      if (it != queue_.end()) {
        queue_.erase(it);
        --droppable_;
        ++server_.dropped;
      }
    }
    if (frame.droppable) ++droppable_;
    queue_.push_back(std::move(frame));
    if (!writing_) write();
  }

  void close() {
    if (!open_) return;
    open_ = false;
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
    beast::get_lowest_layer(ws_).close();
    server_.forget(id_);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      close();
      return;
    }
    ++server_.frames_in;
    std::optional<std::string> reply;
    if (ws_.got_text())
      reply = server_.session.submit(id_, beast::buffers_to_string(buffer_.data()));
    else
      reply = protocol::encode_error(protocol::code::kMalformed, "binary frames are not supported");
    buffer_.consume(buffer_.size());
    if (reply) {
      ++server_.errors_out;
      send({std::move(*reply), false, true});
    }
    if (open_) read();
  }

  void write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front().text), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      if (self->queue_.front().droppable) --self->droppable_;
      self->queue_.pop_front();
      if (self->queue_.empty())
        self->writing_ = false;
      else
        self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  StreamServer::Impl& server_;
  ClientId id_;
  beast::flat_buffer buffer_;
  std::list<OutFrame> queue_;  // stable while the front is being written
  std::size_t droppable_ = 0;
  bool writing_ = false;
  bool open_ = false;
};

}  // namespace

void StreamServer::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Client>(std::move(socket), *this, next_id++)->start();
    accept();
  });
}

void StreamServer::Impl::forget(ClientId id) {
  clients.erase(id);
  client_count = clients.size();
}

void StreamServer::Impl::fan_out(const TickOutput& out) {
  // Copy: sending may close a client and erase it from the map.
  std::vector<std::shared_ptr<Client>> all;
  all.reserve(clients.size());
  for (auto& [id, c] : clients) all.push_back(c);
  for (const auto& [to, frame] : out.replies) {
    if (frame.error) ++errors_out;
    if (to == kEveryone) {
      for (auto& c : all) c->send(frame);
    } else if (auto it = clients.find(to); it != clients.end()) {
      it->second->send(frame);
    }
  }
  for (auto& c : all) {
    if (out.scene_frame) c->send(*out.scene_frame);
    c->send(out.solution_frame);
  }
}

void StreamServer::Impl::loop() {
  using Clock = std::chrono::steady_clock;
  const double period_s = 1.0 / options.rate_hz;
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(period_s));
  auto origin = Clock::now();
  loop_running = true;
  for (std::uint64_t k = 1;; ++k) {
    const auto due = origin + static_cast<Clock::rep>(k) * period;
    {
      std::unique_lock lock(loop_mutex);
      if (loop_cv.wait_until(lock, due, [this] { return stopping; })) break;
    }
    // After a long stall start a fresh schedule instead of bursting.
    if (Clock::now() - due > 5 * period) origin = Clock::now() - static_cast<Clock::rep>(k) * period;
    TickOutput out;
    try {
      out = session.tick(static_cast<double>(k) * period_s);
    } catch (const std::exception&) {
      continue;
    }
    ++ticks;
    if (hook) hook(out);
    net::post(ioc, [this, out = std::move(out)] { fan_out(out); });
  }
  loop_running = false;
}

StreamServer::StreamServer(Session& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {
  if (!(impl_->options.rate_hz > 0.0)) throw ValidationError("rate_hz", "must be positive");
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->options.address, ec);
  if (ec) throw ValidationError("address", "not an IP address: " + impl_->options.address);
  const tcp::endpoint endpoint(address, impl_->options.port);
  auto& a = impl_->acceptor;
  a.open(endpoint.protocol(), ec);
  if (!ec) a.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) a.bind(endpoint, ec);
  if (!ec) a.listen(net::socket_base::max_listen_connections, ec);
  if (ec)
    throw Error("cannot listen on " + impl_->options.address + ":" + std::to_string(impl_->options.port) + ": " +
                ec.message());
}

StreamServer::~StreamServer() { stop(); }

unsigned short StreamServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void StreamServer::on_tick(std::function<void(const TickOutput&)> hook) { impl_->hook = std::move(hook); }

void StreamServer::start() {
  if (impl_->started) return;
  impl_->started = true;
  impl_->accept();
  impl_->net_thread = std::thread([this] { impl_->ioc.run(); });
  impl_->loop_thread = std::thread([this] { impl_->loop(); });
}

void StreamServer::stop() {
  if (!impl_ || !impl_->started) return;
  {
    std::lock_guard lock(impl_->loop_mutex);
    impl_->stopping = true;
  }
  impl_->loop_cv.notify_all();
  if (impl_->loop_thread.joinable()) impl_->loop_thread.join();
  net::post(impl_->ioc, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
    auto clients = impl_->clients;
    for (auto& [id, c] : clients) c->close();
    impl_->ioc.stop();
  });
  if (impl_->net_thread.joinable()) impl_->net_thread.join();
  impl_->started = false;
}

ServerStats StreamServer::stats() const {
  return {impl_->ticks, impl_->frames_in, impl_->errors_out, impl_->dropped, impl_->client_count, impl_->loop_running};
}

}  // namespace cik::server
