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

#include "pac/teach_service.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "test_util.hpp"

namespace pac {
namespace {

using nlohmann::json;
using namespace std::chrono_literals;

SessionOptions options(const std::string& domain, AgentKind agent, Scenario scenario,
                       int episodes, double speed = 1e6) {
  SessionOptions o;
  o.config.domain = domain;
  o.config.agent = agent;
  o.config.scenario = scenario;
  o.config.episodes = episodes;
  o.config.seeds = {7};
  o.speed = speed;
  return o;
}

// Every message of a finished session, in order.
std::vector<json> drain(const Session& s, std::uint64_t from = 1) {
  std::vector<json> out;
  for (;;) {
    const StreamBatch b = s.read(from, 256, 50ms);
    for (const auto& item : b.items) out.push_back(json::parse(item.json));
    from = b.next;
    if (b.finished) return out;
  }
}

// Blocks until a step message for `step` shows up.
json wait_for_step(const Session& s, std::uint64_t step) {
  std::uint64_t from = 1;
  for (int i = 0; i < 400; ++i) {
    const StreamBatch b = s.read(from, 64, 50ms);
    for (const auto& item : b.items) {
      json j = json::parse(item.json);
      if (j["type"] == "step" && j["step"] == step) return j;
    }
    from = b.next;
  }
  ADD_FAILURE() << "step " << step << " never arrived";
  return {};
}

TEST(SessionManager, CreateGivesDistinctIdsPaused) {
  SessionManager m;
  auto a = m.create(options("threegrid", AgentKind::pacman, Scenario::none, 1));
  auto b = m.create(options("threegrid", AgentKind::pacman, Scenario::none, 1));
  EXPECT_NE(a->id(), b->id());
  EXPECT_EQ(a->id().size(), 16u);
  EXPECT_EQ(a->status(), SessionStatus::paused);
  EXPECT_EQ(m.get(a->id()), a);
  EXPECT_THROW(m.get("nope"), UnknownSession);
  EXPECT_EQ(m.ids().size(), 2u);
}

TEST(SessionOptions, Parsing) {
  const SessionOptions o = parse_session_options(
      R"({"config": {"domain": "taxi", "agent": "ac", "scenario": "helpful", "episodes": 3},
          "speed": 4, "grace_ms": 120, "replay": 50, "seed": 12})");
  EXPECT_EQ(o.config.domain, "taxi");
  EXPECT_EQ(o.config.agent, AgentKind::ac);
  EXPECT_EQ(o.config.episodes, 3);
  EXPECT_EQ(o.config.seeds, (std::vector<std::uint64_t>{12}));
  EXPECT_EQ(o.speed, 4.0);
  EXPECT_EQ(o.effective_grace(), 120ms);
  EXPECT_EQ(o.replay_capacity, 50u);

  EXPECT_EQ(parse_session_options("").effective_grace(), 300ms);
  EXPECT_EQ(parse_session_options(R"({"config": {"scenario": "helpful"}})").effective_grace(), 0ms);

  EXPECT_THROW(parse_session_options("{"), ConfigError);
  EXPECT_THROW(parse_session_options("[]"), ConfigError);
  EXPECT_THROW(parse_session_options(R"({"config": {"agent": "qshape"}})"), ConfigError);
  EXPECT_THROW(parse_session_options(R"({"speed": 0})"), ConfigError);
  EXPECT_THROW(parse_session_options(R"({"seed": -3})"), ConfigError);
  EXPECT_THROW(parse_session_options(R"({"replay": 0})"), ConfigError);
}

TEST(SessionManager, MalformedDomainRejected) {
  SessionManager m;
  EXPECT_THROW(m.create(options("chess", AgentKind::pacman, Scenario::none, 1)), ConfigError);
  const HttpReply r =
      route_request(m, "POST", "/sessions", R"({"config": {"domain": "chess"}})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(json::parse(r.body)["type"], "error");
  EXPECT_TRUE(m.ids().empty());
}

TEST(Session, PauseHaltsStepping) {
  SessionManager m;
  auto s = m.create(options("fourrooms", AgentKind::ac, Scenario::helpful, 1000, 200));
  std::this_thread::sleep_for(100ms);
  EXPECT_EQ(s->current_step(), 0u);
  EXPECT_TRUE(s->control(ControlCommand::resume).ok);
  wait_for_step(*s, 3);
  const ControlAck ack = s->control(ControlCommand::pause);
  EXPECT_TRUE(ack.ok);
  EXPECT_EQ(ack.status, SessionStatus::paused);
  EXPECT_EQ(s->status(), SessionStatus::paused);
  const std::uint64_t at = s->current_step();
  std::this_thread::sleep_for(200ms);
  // At most the step already in flight when pause landed.
  EXPECT_LE(s->current_step(), at + 1);
  EXPECT_EQ(json::parse(s->status_json())["status"], "paused");
}

TEST(Session, SetSpeedThrottles) {
  SessionManager m;
  auto s = m.create(options("fourrooms", AgentKind::ac, Scenario::helpful, 1000, 1000));
  EXPECT_TRUE(s->control(ControlCommand::set_speed, 2.0).ok);
  EXPECT_EQ(s->speed(), 2.0);
  EXPECT_FALSE(s->control(ControlCommand::set_speed, 0.0).ok);
  EXPECT_FALSE(s->control(ControlCommand::set_speed).ok);
  s->control(ControlCommand::resume);
  wait_for_step(*s, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t s0 = s->current_step();
  std::this_thread::sleep_for(2000ms);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::uint64_t steps = s->current_step() - s0;
  EXPECT_LE(static_cast<double>(steps), 2.0 * secs + 1.0);
  EXPECT_GE(steps, 2u);
}

TEST(Session, StopFinishesAndRejectsControl) {
  SessionManager m;
  auto s = m.create(options("taxi", AgentKind::pacman, Scenario::helpful, 1000, 500));
  s->control(ControlCommand::resume);
  wait_for_step(*s, 2);
  const ControlAck ack = s->control(ControlCommand::stop);
  EXPECT_TRUE(ack.ok);
  EXPECT_EQ(ack.status, SessionStatus::finished);
  EXPECT_TRUE(s->wait_finished(1s));
  for (auto cmd : {ControlCommand::pause, ControlCommand::resume, ControlCommand::stop}) {
    const ControlAck again = s->control(cmd);
    EXPECT_FALSE(again.ok);
    EXPECT_FALSE(again.error.empty());
  }
  const HttpReply r =
      route_request(m, "POST", "/sessions/" + s->id() + "/control", R"({"cmd": "resume"})");
  EXPECT_EQ(r.status, 409);
  const auto msgs = drain(*s);
  EXPECT_EQ(msgs.back()["type"], "finished");
  EXPECT_EQ(s->submit_feedback(s->current_step(), 1), SubmitStatus::closed);
}

TEST(Session, LiveFeedbackAcceptedAndReported) {
  SessionManager m;
  SessionOptions o = options("fourrooms", AgentKind::ac, Scenario::none, 1000);
  o.grace = 1500ms;
  auto s = m.create(o);
  EXPECT_EQ(s->submit_feedback(1, 1), SubmitStatus::stale);  // nothing executed yet
  s->control(ControlCommand::resume);
  const json first = wait_for_step(*s, 1);
  s->control(ControlCommand::pause);
  EXPECT_TRUE(first["feedback"].is_null());
  EXPECT_EQ(first["feedback_step"], 0);

  EXPECT_EQ(s->submit_feedback(1, -1), SubmitStatus::accepted);
  EXPECT_EQ(s->submit_feedback(1, 1), SubmitStatus::duplicate);
  EXPECT_EQ(s->submit_feedback(6, 1), SubmitStatus::stale);
  EXPECT_THROW(s->submit_feedback(1, 0), std::invalid_argument);

  s->control(ControlCommand::resume);
  const json second = wait_for_step(*s, 2);
  EXPECT_EQ(second["feedback"], -1.0);
  EXPECT_EQ(second["feedback_step"], 1);
  EXPECT_EQ(second["feedback_origin"], "live");
  EXPECT_EQ(s->submit_feedback(1, 1), SubmitStatus::stale);
  s->control(ControlCommand::stop);
}

TEST(Session, LiveFeedbackReplacesTheTdErrorOnce) {
  // One threegrid episode; the human judges only step 1.
  SessionOptions o = options("threegrid", AgentKind::pacman, Scenario::none, 1);
  o.grace = 800ms;
  SessionManager m;
  auto s = m.create(o);
  s->control(ControlCommand::resume);
  wait_for_step(*s, 1);
  ASSERT_EQ(s->submit_feedback(1, -1), SubmitStatus::accepted);
  ASSERT_TRUE(s->wait_finished(20s));

  Agent offline(o.config, make_environment("threegrid"), 7);
  ASSERT_TRUE(offline.begin_episode());
  while (offline.episode_active()) {
    const PendingStep p = offline.execute_step();
    offline.finalize_step(p, p.step == 1 ? std::optional<FeedbackValue>(FeedbackValue{-1, 1.0})
                                         : std::nullopt);
  }
  EXPECT_EQ(s->policy_table(), offline.policy().table());
  EXPECT_EQ(s->records(), std::vector<EpisodeRecord>{offline.end_episode()});
}

class OracleSession : public ::testing::TestWithParam<AgentKind> {};

TEST_P(OracleSession, MatchesOfflineRun) {
  SessionOptions o = options("fourrooms", GetParam(), Scenario::helpful, 25);
  o.config.noise = NoiseRegime::both;
  SessionManager m;
  auto s = m.create(o);
  s->control(ControlCommand::resume);
  ASSERT_TRUE(s->wait_finished(60s));
  Agent offline(o.config, make_environment("fourrooms"), 7);
  EXPECT_EQ(s->records(), offline.run(25));
  EXPECT_EQ(s->policy_table(), offline.policy().table());
}

INSTANTIATE_TEST_SUITE_P(Agents, OracleSession,
                         ::testing::Values(AgentKind::pacman, AgentKind::ac));

TEST(Stream, OrderedStepsSummariesAndFinish) {
  SessionManager m;
  auto s = m.create(options("taxi", AgentKind::pacman, Scenario::helpful, 12));
  s->control(ControlCommand::resume);
  ASSERT_TRUE(s->wait_finished(60s));
  const auto msgs = drain(*s);
  std::uint64_t seq = 0, step = 0;
  int summaries = 0;
  std::vector<double> returns;
  for (const auto& j : msgs) {
    EXPECT_EQ(j["v"], kProtocolVersion);
    EXPECT_EQ(j["seq"], ++seq);
    if (j["type"] == "step") {
      EXPECT_EQ(j["step"], ++step);
      EXPECT_TRUE(j["state"].contains("row"));
      EXPECT_TRUE(j["state"].contains("passenger"));
    } else if (j["type"] == "summary") {
      ++summaries;
      returns.push_back(j["return"]);
      // Running mean and population variance, recomputed from scratch.
      double mean = 0, var = 0;
      for (double r : returns) mean += r;
      mean /= returns.size();
      for (double r : returns) var += (r - mean) * (r - mean);
      var /= returns.size();
      EXPECT_NEAR(j["mean"].get<double>(), mean, 1e-9);
      EXPECT_NEAR(j["variance"].get<double>(), var, 1e-9);
    }
  }
  EXPECT_EQ(summaries, 12);
  EXPECT_GE(step, 10u);
  EXPECT_EQ(msgs.back()["type"], "finished");
  EXPECT_EQ(msgs.back()["episodes"], 12);
  EXPECT_EQ(msgs.back()["steps"], step);
}

TEST(Stream, ReconnectResumes) {
  SessionManager m;
  auto s = m.create(options("fourrooms", AgentKind::ac, Scenario::helpful, 3));
  s->control(ControlCommand::resume);
  ASSERT_TRUE(s->wait_finished(60s));
  const StreamBatch first = s->read(1, 5, 0ms);
  ASSERT_EQ(first.items.size(), 5u);
  EXPECT_EQ(first.next, 6u);
  const auto rest = drain(*s, first.next);
  ASSERT_FALSE(rest.empty());
  EXPECT_EQ(rest.front()["seq"], 6);
  const auto all = drain(*s);
  EXPECT_EQ(all.size(), 5 + rest.size());
}

TEST(Stream, SlowReaderGetsGapNotice) {
  SessionManager m;
  SessionOptions o = options("fourrooms", AgentKind::ac, Scenario::helpful, 5);
  o.replay_capacity = 8;
  auto s = m.create(o);
  s->control(ControlCommand::resume);
  ASSERT_TRUE(s->wait_finished(60s));
  const StreamBatch b = s->read(1, 100, 0ms);
  ASSERT_GE(b.items.size(), 2u);
  EXPECT_EQ(b.items[0].seq, 0u);
  const json gap = json::parse(b.items[0].json);
  EXPECT_EQ(gap["type"], "gap");
  EXPECT_EQ(gap["from"], 1);
  EXPECT_EQ(gap["to"].get<std::uint64_t>() + 1, b.items[1].seq);
  EXPECT_EQ(b.items.size(), 9u);  // notice + the 8 retained
  EXPECT_TRUE(b.finished);
}

TEST(Session, Isolation) {
  SessionManager m;
  SessionOptions o = options("threegrid", AgentKind::ac, Scenario::none, 2);
  o.grace = 600ms;
  auto a = m.create(o);
  auto b = m.create(o);
  a->control(ControlCommand::resume);
  b->control(ControlCommand::resume);
  wait_for_step(*a, 1);
  ASSERT_EQ(a->submit_feedback(1, 1), SubmitStatus::accepted);
  ASSERT_TRUE(a->wait_finished(30s));
  ASSERT_TRUE(b->wait_finished(30s));
  Agent offline(o.config, make_environment("threegrid"), 7);
  EXPECT_EQ(b->records(), offline.run(2));
  EXPECT_EQ(b->policy_table(), offline.policy().table());
  EXPECT_NE(a->policy_table(), b->policy_table());
}

TEST(Session, EventLogMirrorsStream) {
  const auto dir = std::filesystem::temp_directory_path() / "pac_session_logs";
  std::filesystem::remove_all(dir);
  std::string id;
  std::vector<json> streamed;
  {
    SessionManager m(dir.string());
    auto s = m.create(options("threegrid", AgentKind::pacman, Scenario::helpful, 3));
    id = s->id();
    s->control(ControlCommand::resume);
    ASSERT_TRUE(s->wait_finished(30s));
    streamed = drain(*s);
  }
  std::istringstream log(testing::read_file((dir / (id + ".jsonl")).string()));
  std::vector<json> logged;
  for (std::string line; std::getline(log, line);) logged.push_back(json::parse(line));
  EXPECT_EQ(logged, streamed);
  std::filesystem::remove_all(dir);
}

TEST(Session, PolicyTableWaitsForFinish) {
  SessionManager m;
  auto s = m.create(options("threegrid", AgentKind::pacman, Scenario::helpful, 1));
  EXPECT_THROW(s->policy_table(), std::logic_error);
}

TEST(ClientMessages, FeedbackAndControl) {
  SessionManager m;
  SessionOptions o = options("fourrooms", AgentKind::ac, Scenario::none, 100);
  o.grace = 5s;
  auto s = m.create(o);
  json r = json::parse(handle_client_message(*s, R"({"type": "control", "cmd": "resume"})"));
  EXPECT_EQ(r["type"], "control_ack");
  EXPECT_EQ(r["ok"], true);
  EXPECT_EQ(r["status"], "running");
  wait_for_step(*s, 1);
  r = json::parse(handle_client_message(*s, R"({"type": "feedback", "step": 1, "sign": 1, "x": 0})"));
  EXPECT_EQ(r["type"], "feedback_result");
  EXPECT_EQ(r["status"], "accepted");
  EXPECT_EQ(r["accepted"], true);
  r = json::parse(handle_client_message(*s, R"({"type": "feedback", "step": 1, "sign": -1})"));
  EXPECT_EQ(r["status"], "duplicate");
  r = json::parse(handle_client_message(*s, R"({"type": "control", "cmd": "set_speed", "value": 3})"));
  EXPECT_EQ(r["speed"], 3.0);
  for (const char* bad : {"nonsense", "[1]", R"({"type": "dance"})",
                          R"({"type": "feedback", "step": 1, "sign": 2})",
                          R"({"type": "control", "cmd": "jump"})"}) {
    EXPECT_EQ(json::parse(handle_client_message(*s, bad))["type"], "error") << bad;
  }
  s->control(ControlCommand::stop);
}

TEST(Routes, RequestResponse) {
  SessionManager m;
  HttpReply r = route_request(m, "POST", "/sessions",
                              R"({"config": {"domain": "threegrid", "episodes": 1000},
                                  "grace_ms": 5000})");
  ASSERT_EQ(r.status, 201);
  const std::string id = json::parse(r.body)["id"];
  EXPECT_EQ(json::parse(r.body)["status"], "paused");

  r = route_request(m, "GET", "/sessions", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(json::parse(r.body)["sessions"], json::array({id}));

  r = route_request(m, "GET", "/sessions/" + id, "");
  EXPECT_EQ(r.status, 200);
  const json st = json::parse(r.body);
  EXPECT_EQ(st["type"], "status");
  EXPECT_EQ(st["config"]["domain"], "threegrid");
  EXPECT_EQ(st["grace_ms"], 5000);

  r = route_request(m, "POST", "/sessions/" + id + "/control", R"({"cmd": "resume"})");
  EXPECT_EQ(r.status, 200);
  wait_for_step(*m.get(id), 1);
  r = route_request(m, "POST", "/sessions/" + id + "/feedback", R"({"step": 1, "sign": 1})");
  EXPECT_EQ(r.status, 200);
  r = route_request(m, "POST", "/sessions/" + id + "/feedback", R"({"step": 1, "sign": 1})");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(json::parse(r.body)["status"], "duplicate");

  EXPECT_EQ(route_request(m, "GET", "/sessions/ffff", "").status, 404);
  EXPECT_EQ(route_request(m, "GET", "/elsewhere", "").status, 404);
  EXPECT_EQ(route_request(m, "DELETE", "/sessions", "").status, 405);
  EXPECT_EQ(route_request(m, "POST", "/sessions/" + id + "/control", "{").status, 400);
  EXPECT_EQ(route_request(m, "POST", "/sessions/" + id + "/feedback", R"({"step": -1})").status,
            400);
  EXPECT_EQ(route_request(m, "POST", "/sessions/" + id + "/control?x=1", R"({"cmd": "stop"})").status,
            200);
}

TEST(StreamTarget, Parsing) {
  auto t = parse_stream_target("/sessions/abc/stream");
  ASSERT_TRUE(t);
  EXPECT_EQ(t->id, "abc");
  EXPECT_EQ(t->from, 1u);
  t = parse_stream_target("/sessions/abc/stream?from=6");
  ASSERT_TRUE(t);
  EXPECT_EQ(t->from, 6u);
  EXPECT_FALSE(parse_stream_target("/sessions/abc"));
  EXPECT_FALSE(parse_stream_target("/other/abc/stream"));
}

TEST(ReplayBuffer, ReadWaitAndClose) {
  ReplayBuffer buf(3);
  EXPECT_EQ(buf.last_seq(), 0u);
  StreamBatch b = buf.read(1, 10, 10ms);
  EXPECT_TRUE(b.items.empty());
  EXPECT_FALSE(b.finished);
  for (int i = 1; i <= 5; ++i) EXPECT_EQ(buf.push("m" + std::to_string(i)), std::uint64_t(i));
  EXPECT_EQ(buf.first_seq(), 3u);
  b = buf.read(4, 10, 0ms);
  ASSERT_EQ(b.items.size(), 2u);
  EXPECT_EQ(b.items[0].json, "m4");
  EXPECT_EQ(b.next, 6u);

  std::thread producer([&] {
    std::this_thread::sleep_for(30ms);
    buf.push("m6");
    buf.close();
  });
  b = buf.read(6, 10, 2000ms);
  producer.join();
  ASSERT_EQ(b.items.size(), 1u);
  EXPECT_EQ(b.items[0].seq, 6u);
  b = buf.read(7, 10, 0ms);
  EXPECT_TRUE(b.finished);
  EXPECT_TRUE(b.items.empty());
}

TEST(Messages, Shapes) {
  StepEvent e;
  e.step = 4;
  e.episode = 1;
  e.valuation = {{"loc", std::int64_t{2}}, {"mode", std::string("fast")}};
  e.action = "moveright";
  e.feedback = FeedbackValue{-1, 2.0};
  e.feedback_origin = FeedbackOrigin::oracle;
  e.applied_step = 3;
  const json j = json::parse(step_message(e));
  EXPECT_EQ(j["type"], "step");
  EXPECT_EQ(j["state"]["loc"], 2);
  EXPECT_EQ(j["state"]["mode"], "fast");
  EXPECT_EQ(j["feedback"], -2.0);
  EXPECT_EQ(j["feedback_origin"], "oracle");
  EXPECT_EQ(json::parse(gap_message(1, 9))["to"], 9);
  EXPECT_EQ(json::parse(error_message("x"))["message"], "x");
  EXPECT_EQ(json::parse(finished_message(10, 2))["episodes"], 2);
  for (auto c : {ControlCommand::pause, ControlCommand::resume, ControlCommand::set_speed,
                 ControlCommand::stop}) {
    EXPECT_EQ(parse_control(to_string(c)), c);
  }
}

}  // namespace
}  // namespace pac
