#include "balloonscope/teleop/server.hpp"

#include <chrono>
#include <deque>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "balloonscope/teleop/command_gate.hpp"
#include "balloonscope/teleop/protocol.hpp"

namespace balloonscope::teleop {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

constexpr auto kPumpInterval = std::chrono::milliseconds(10);
/// Frames are skipped while this many messages wait to be written.
constexpr std::size_t kFrameBacklogLimit = 8;

std::string_view mime_type(std::string_view path) {
  const auto dot = path.rfind('.');
  const auto ext = dot == std::string_view::npos ? std::string_view{} : path.substr(dot);
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".ico") return "image/vnd.microsoft.icon";
  return "application/octet-stream";
}

}  // namespace

struct TeleopServer::Impl {
  class Session;

  Impl(LiveLoop& l, ServerOptions o) : loop(l), options(std::move(o)), gate(options.command_rate_hz) {}

  double now_s() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin).count(); }
  std::int64_t now_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - origin).count();
  }

  void accept();

  LiveLoop& loop;
  ServerOptions options;
  CommandGate gate;
  std::chrono::steady_clock::time_point origin = std::chrono::steady_clock::now();
  ClientId next_client = 1;
  std::set<std::shared_ptr<Session>> sessions;
  unsigned short bound_port = 0;
  // Declared last so pending handlers die before the state they use.
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::thread thread;
};

class TeleopServer::Impl::Session : public std::enable_shared_from_this<Session> {
 public:
  Session(Impl& server, tcp::socket socket) : server_(server), stream_(std::move(socket)), timer_(server.ioc) {}

  ~Session() {
    if (sub_) server_.loop.unsubscribe(sub_);
  }

  void run() {
    http::async_read(stream_, buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void close() {
    beast::error_code ignored;
    timer_.cancel();
    if (ws_) ws_->next_layer().socket().close(ignored);
    else stream_.socket().close(ignored);
  }

 private:
  struct Outgoing {
    std::string text;
    bool frame = false;
  };

  void on_request(beast::error_code ec) {
    if (ec) return finish();
    if (websocket::is_upgrade(request_)) {
      ws_.emplace(std::move(stream_));
      ws_->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws_->async_accept(request_, [self = shared_from_this()](beast::error_code e) { self->on_accept(e); });
      return;
    }
    serve_static();
  }

  void serve_static() {
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(request_.version());
    res->keep_alive(false);
    const std::string target(request_.target());
    const auto& dir = server_.options.static_dir;
    bool found = false;
    if (!dir.empty() && request_.method() == http::verb::get && target.find("..") == std::string::npos) {
      std::string path = target.substr(0, target.find('?'));
      if (path.empty() || path.back() == '/') path += "index.html";
      beast::error_code fec;
      http::file_body::value_type file;
      file.open((dir + path).c_str(), beast::file_mode::scan, fec);
      if (!fec) {
        std::string body(file.size(), '\0');
        beast::error_code rec;
        file.file().read(body.data(), body.size(), rec);
        if (!rec) {
          res->result(http::status::ok);
          res->set(http::field::content_type, std::string(mime_type(path)));
          res->body() = std::move(body);
          found = true;
        }
      }
    }
    if (!found) {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    }
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      self->finish();
    });
  }

  void on_accept(beast::error_code ec) {
    if (ec) return finish();
    id_ = server_.next_client++;
    sub_ = server_.loop.subscribe();
    read();
    pump();
  }

  void read() {
    ws_->async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) return finish();
    const std::string text = beast::buffers_to_string(in_.data());
    in_.consume(in_.size());
    auto outcome = server_.gate.handle_text(id_, text, server_.now_s());
    if (outcome.reply.kind == MessageKind::Hello) {
      const auto& s = server_.loop.settings();
      outcome.reply.payload["state_rate_hz"] = s.state_rate_hz;
      outcome.reply.payload["frame_rate_hz"] = s.frame_rate_hz;
    }
    if (outcome.command) server_.loop.post(*outcome.command);
    send(outcome.reply.kind, std::move(outcome.reply.payload));
    read();
  }

  void pump() {
    timer_.expires_after(kPumpInterval);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      for (const auto& s : self->sub_->take_states()) {
        auto payload = record_to_json(s.record);
        payload["phase"] = std::string(to_string(s.phase));
        payload["estopped"] = s.estopped;
        payload["syringe_limit"] = s.syringe_limit;
        payload["tick"] = s.tick;
        self->send(MessageKind::State, std::move(payload));
      }
      if (auto f = self->sub_->take_frame()) {
        if (self->queue_.size() < kFrameBacklogLimit) {
          auto payload = frame_to_json(*f->frame);
          payload["time_s"] = f->time_s;
          payload["tick"] = f->tick;
          self->send(MessageKind::Frame, std::move(payload));
        }
      }
      self->pump();
    });
  }

  void send(MessageKind kind, nlohmann::json payload) {
    if (closed_) return;
    const bool is_frame = kind == MessageKind::Frame;
    if (is_frame) {
      // Latest wins: a frame still waiting behind the in-flight write is
      // replaced rather than queued behind.
      for (auto it = queue_.begin() + (writing_ ? 1 : 0); it != queue_.end(); ++it) {
        if (it->frame) {
          queue_.erase(it);
          break;
        }
      }
    }
    WireMessage msg{kind, ++out_seq_, server_.now_ms(), std::move(payload)};
    queue_.push_back({encode_message(msg), is_frame});
    if (!writing_) write_next();
  }

  void write_next() {
    if (queue_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_->text(true);
    ws_->async_write(asio::buffer(queue_.front().text), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->queue_.pop_front();
      self->write_next();
    });
  }

  void finish() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    if (id_ != 0) server_.gate.disconnect(id_);
    if (sub_) {
      server_.loop.unsubscribe(sub_);
      sub_.reset();
    }
    server_.sessions.erase(shared_from_this());
  }

  Impl& server_;
  beast::tcp_stream stream_;
  std::optional<websocket::stream<beast::tcp_stream>> ws_;
  beast::flat_buffer buffer_;
  beast::flat_buffer in_;
  http::request<http::string_body> request_;
  asio::steady_timer timer_;
  ClientId id_ = 0;
  std::shared_ptr<TelemetrySubscription> sub_;
  std::deque<Outgoing> queue_;
  bool writing_ = false;
  bool closed_ = false;
  std::uint64_t out_seq_ = 0;
};

void TeleopServer::Impl::accept() {
  acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    auto session = std::make_shared<Session>(*this, std::move(socket));
    sessions.insert(session);
    session->run();
    accept();
  });
}

TeleopServer::TeleopServer(LiveLoop& loop, ServerOptions options)
    : impl_(std::make_unique<Impl>(loop, std::move(options))) {}

TeleopServer::~TeleopServer() { stop(); }

void TeleopServer::start() {
  auto& im = *impl_;
  if (im.thread.joinable()) return;
  try {
    const tcp::endpoint ep(asio::ip::make_address(im.options.address), im.options.port);
    im.acceptor.open(ep.protocol());
    im.acceptor.set_option(asio::socket_base::reuse_address(true));
    im.acceptor.bind(ep);
    im.acceptor.listen(asio::socket_base::max_listen_connections);
    im.bound_port = im.acceptor.local_endpoint().port();
  } catch (const boost::system::system_error& e) {
    throw Error("cannot listen on " + im.options.address + ":" + std::to_string(im.options.port) + ": " + e.what());
  }
  im.accept();
  im.thread = std::thread([&im] { im.ioc.run(); });
}

void TeleopServer::stop() {
  auto& im = *impl_;
  if (!im.thread.joinable()) return;
  asio::post(im.ioc, [&im] {
    beast::error_code ignored;
    im.acceptor.close(ignored);
    for (const auto& s : std::set(im.sessions)) s->close();
  });
  // Give sessions a moment to unwind, then stop regardless.
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  im.ioc.stop();
  im.thread.join();
  im.sessions.clear();
}

unsigned short TeleopServer::port() const { return impl_->bound_port; }

}  // namespace balloonscope::teleop
