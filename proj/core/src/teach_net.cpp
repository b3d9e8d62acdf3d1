// Copyright 2026 The PAC Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pac/teach_net.hpp"

#include <chrono>
#include <deque>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace pac {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

// Everything runs on one io thread, so handlers never race each other.
constexpr auto kPollInterval = std::chrono::milliseconds(15);
constexpr std::size_t kBatch = 64;

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

class StreamConnection : public std::enable_shared_from_this<StreamConnection> {
 public:
  StreamConnection(tcp::socket socket, std::shared_ptr<Session> session, std::uint64_t from)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        session_(std::move(session)),
        cursor_(from) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->read();
      self->pump();
    });
  }

 private:
  void read() {
    ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      const std::string text = beast::buffers_to_string(self->in_.data());
      self->in_.consume(self->in_.size());
      self->send(handle_client_message(*self->session_, text));
      self->read();
    });
  }

  void pump() {
    if (closed_) return;
    if (!drained_) {
      StreamBatch batch = session_->read(cursor_, kBatch, std::chrono::milliseconds(0));
      cursor_ = batch.next;
      for (auto& item : batch.items) send(std::move(item.json));
      drained_ = batch.finished;
    }
    if (drained_ && out_.empty() && !writing_) {
      closed_ = true;
      ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
      return;
    }
    timer_.expires_after(kPollInterval);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->pump();
    });
  }

  void send(std::string text) {
    out_.push_back(std::move(text));
    if (!writing_) write();
  }

  void write() {
    if (out_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(out_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        self->timer_.cancel();
                        return;
                      }
                      self->out_.pop_front();
                      self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer in_;
  std::shared_ptr<Session> session_;
  std::uint64_t cursor_;
  std::deque<std::string> out_;
  bool writing_ = false;
  bool drained_ = false;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, SessionManager& manager)
      : stream_(std::move(socket)), manager_(manager) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->dispatch();
                     });
  }

  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      const auto target = parse_stream_target(sv(req_.target()));
      std::shared_ptr<Session> session;
      if (target) {
        try {
          session = manager_.get(target->id);
        } catch (const UnknownSession&) {
        }
      }
      if (session) {
        stream_.expires_never();
        std::make_shared<StreamConnection>(stream_.release_socket(), std::move(session),
                                           target->from)
            ->run(std::move(req_));
        return;
      }
      return reply({404, error_message("unknown stream target")});
    }
    if (req_.method() == http::verb::options) return reply({204, ""});
    reply(route_request(manager_, sv(req_.method_string()), sv(req_.target()), req_.body()));
  }

  void reply(const HttpReply& r) {
    auto res = std::make_shared<http::response<http::string_body>>(
        static_cast<http::status>(r.status), req_.version());
    res->set(http::field::server, "pac-teach");
    res->set(http::field::access_control_allow_origin, "*");
    res->set(http::field::access_control_allow_headers, "Content-Type");
    res->set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
    if (!r.body.empty()) res->set(http::field::content_type, "application/json");
    res->body() = r.body;
    res->keep_alive(req_.keep_alive());
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream_;
  SessionManager& manager_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct TeachServer::Impl {
  SessionManager& manager;
  asio::io_context io{1};
  tcp::acceptor acceptor{io};
  std::thread thread;
  std::uint16_t port = 0;

  explicit Impl(SessionManager& m) : manager(m) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (!acceptor.is_open()) return;
      if (!ec) std::make_shared<HttpConnection>(std::move(socket), manager)->run();
      accept();
    });
  }
};

TeachServer::TeachServer(SessionManager& manager, const std::string& address, std::uint16_t port)
    : impl_(std::make_unique<Impl>(manager)) {
  beast::error_code ec;
  const auto addr = asio::ip::make_address(address, ec);
  if (ec) throw std::runtime_error("bad address '" + address + "': " + ec.message());
  const tcp::endpoint ep(addr, port);
  auto& a = impl_->acceptor;
  a.open(ep.protocol(), ec);
  if (!ec) a.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) a.bind(ep, ec);
  if (!ec) a.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw std::runtime_error("cannot listen on " + address + ":" + std::to_string(port) +
                                   ": " + ec.message());
  impl_->port = a.local_endpoint().port();
  impl_->accept();
}

TeachServer::~TeachServer() { stop(); }

std::uint16_t TeachServer::port() const { return impl_->port; }

void TeachServer::start() {
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void TeachServer::run() { impl_->io.run(); }

void TeachServer::stop() {
  asio::post(impl_->io, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
  });
  impl_->io.stop();
  if (impl_->thread.joinable() && impl_->thread.get_id() != std::this_thread::get_id()) {
    impl_->thread.join();
  }
}

}  // namespace pac
