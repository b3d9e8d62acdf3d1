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

// End-to-end over a real socket: HTTP for control, WebSocket for the stream.

#include "pac/teach_net.hpp"

#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

namespace pac {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

struct Reply {
  int status = 0;
  std::string body;
  std::string allow_origin;
};

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = std::make_unique<TeachServer>(manager_, "127.0.0.1", 0);
    server_->start();
  }
  void TearDown() override {
    server_->stop();
    manager_.shutdown();
  }

  Reply request(http::verb verb, const std::string& target, const std::string& body = "") {
    asio::io_context io;
    beast::tcp_stream stream(io);
    stream.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), server_->port()));
    http::request<http::string_body> req{verb, target, 11};
    req.set(http::field::host, "127.0.0.1");
    req.set(http::field::content_type, "application/json");
    req.body() = body;
    req.prepare_payload();
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    beast::error_code ec;
    stream.socket().shutdown(tcp::socket::shutdown_both, ec);
    return {static_cast<int>(res.result_int()), res.body(),
            std::string(res[http::field::access_control_allow_origin])};
  }

  std::string create(const std::string& body) {
    const Reply r = request(http::verb::post, "/sessions", body);
    EXPECT_EQ(r.status, 201) << r.body;
    return json::parse(r.body)["id"];
  }

  SessionManager manager_;
  std::unique_ptr<TeachServer> server_;
};

class WsClient {
 public:
  WsClient(std::uint16_t port, const std::string& target) : ws_(io_) {
    ws_.next_layer().connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws_.handshake("127.0.0.1", target);
  }
  void send(const json& j) { ws_.write(asio::buffer(j.dump())); }
  // nullopt once the server closed the stream.
  std::optional<json> next() {
    beast::flat_buffer buf;
    beast::error_code ec;
    ws_.read(buf, ec);
    if (ec) return std::nullopt;
    return json::parse(beast::buffers_to_string(buf.data()));
  }

 private:
  asio::io_context io_;
  websocket::stream<beast::tcp_stream> ws_;
};

TEST_F(ServerTest, HttpRoutes) {
  const std::string id = create(R"({"config": {"domain": "threegrid", "episodes": 5}})");
  Reply r = request(http::verb::get, "/sessions/" + id);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(json::parse(r.body)["status"], "paused");
  EXPECT_EQ(r.allow_origin, "*");
  EXPECT_EQ(request(http::verb::get, "/sessions/0000000000000000").status, 404);
  EXPECT_EQ(request(http::verb::post, "/sessions", "{nope").status, 400);
  EXPECT_EQ(request(http::verb::options, "/sessions").status, 204);
  r = request(http::verb::post, "/sessions/" + id + "/control", R"({"cmd": "stop"})");
  EXPECT_EQ(r.status, 200);
  r = request(http::verb::post, "/sessions/" + id + "/control", R"({"cmd": "resume"})");
  EXPECT_EQ(r.status, 409);
}

TEST_F(ServerTest, StreamCarriesStepsFeedbackAndFinish) {
  const std::string id =
      create(R"({"config": {"domain": "threegrid", "agent": "pacman", "episodes": 3},
                 "grace_ms": 1500})");
  WsClient ws(server_->port(), "/sessions/" + id + "/stream");
  ws.send({{"type", "control"}, {"cmd", "resume"}});

  std::uint64_t seq = 0, step = 0;
  bool judged = false, acked = false, reported = false;
  std::optional<json> m;
  json last;
  while ((m = ws.next())) {
    const json& j = *m;
    if (j["type"] == "control_ack") {
      EXPECT_EQ(j["ok"], true);
      continue;
    }
    if (j["type"] == "feedback_result") {
      EXPECT_EQ(j["status"], "accepted");
      acked = true;
      continue;
    }
    EXPECT_EQ(j["seq"], ++seq);
    if (j["type"] == "step") {
      EXPECT_EQ(j["step"], ++step);
      if (!judged) {
        ws.send({{"type", "feedback"}, {"step", step}, {"sign", -1}});
        judged = true;
      } else if (j["feedback_step"] == 1) {
        EXPECT_EQ(j["feedback"], -1.0);
        EXPECT_EQ(j["feedback_origin"], "live");
        reported = true;
      }
    }
    last = j;
  }
  EXPECT_TRUE(acked);
  EXPECT_TRUE(reported);
  EXPECT_EQ(last["type"], "finished");
  EXPECT_EQ(last["episodes"], 3);

  // A late reader replays from the requested seq.
  WsClient again(server_->port(), "/sessions/" + id + "/stream?from=3");
  const auto first = again.next();
  ASSERT_TRUE(first);
  EXPECT_EQ((*first)["seq"], 3);
  std::uint64_t n = 1;
  while (again.next()) ++n;
  EXPECT_EQ(n, seq - 2);
}

TEST_F(ServerTest, UnknownStreamIsRefused) {
  EXPECT_THROW(WsClient(server_->port(), "/sessions/ffffffffffffffff/stream"),
               boost::system::system_error);
}

}  // namespace
}  // namespace pac
