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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>
#include <variant>

#include <nlohmann/json.hpp>

namespace pac {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::running:
      return "running";
    case SessionStatus::paused:
      return "paused";
    case SessionStatus::finished:
      return "finished";
  }
  return "?";
}

std::string_view to_string(ControlCommand c) {
  switch (c) {
    case ControlCommand::pause:
      return "pause";
    case ControlCommand::resume:
      return "resume";
    case ControlCommand::set_speed:
      return "set_speed";
    case ControlCommand::stop:
      return "stop";
  }
  return "?";
}

std::optional<ControlCommand> parse_control(std::string_view name) {
  for (auto c : {ControlCommand::pause, ControlCommand::resume, ControlCommand::set_speed,
                 ControlCommand::stop}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::chrono::milliseconds SessionOptions::effective_grace() const {
  if (grace) return *grace;
  return config.scenario == Scenario::none ? std::chrono::milliseconds(300)
                                           : std::chrono::milliseconds(0);
}

namespace {

json message(std::string_view type) {
  json j;
  j["type"] = type;
  j["v"] = kProtocolVersion;
  return j;
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "none";
  return v.dump();
}

void check_options(const SessionOptions& o) {
  std::vector<std::string> problems;
  try {
    validate(o.config);
  } catch (const ConfigError& e) {
    problems.emplace_back(e.what());
  }
  if (o.config.agent == AgentKind::qshape) {
    problems.emplace_back("sessions support agent pacman or ac only");
  }
  if (!(o.speed > 0) || !std::isfinite(o.speed)) problems.emplace_back("speed must be finite and > 0");
  if (o.grace && o.grace->count() < 0) problems.emplace_back("grace_ms must be >= 0");
  if (o.replay_capacity < 1) problems.emplace_back("replay must be >= 1");
  if (!problems.empty()) {
    std::string msg = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) msg += "\n" + problems[i];
    throw ConfigError(msg);
  }
}

json feedback_json(const std::optional<FeedbackValue>& f) {
  if (!f) return nullptr;
  return f->value();
}

}  // namespace

SessionOptions parse_session_options(std::string_view json_body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_body.empty() ? std::string_view("{}") : json_body);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("session options must be a JSON object");

  SessionOptions o;
  std::vector<std::string> problems;
  if (j.contains("config")) {
    if (!j["config"].is_object()) {
      problems.emplace_back("config must be an object");
    } else {
      for (const auto& [key, value] : j["config"].items()) {
        try {
          apply_config_value(o.config, key, scalar_text(value));
        } catch (const ConfigError& e) {
          problems.emplace_back(e.what());
        }
      }
    }
  }
  auto number = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number()) {
      problems.push_back(std::string(key) + " must be a number");
      return std::nullopt;
    }
    return j[key].get<double>();
  };
  if (auto v = number("speed")) o.speed = *v;
  if (auto v = number("grace_ms")) o.grace = std::chrono::milliseconds(std::llround(*v));
  if (auto v = number("replay")) {
    if (*v < 1) {
      problems.emplace_back("replay must be >= 1");
    } else {
      o.replay_capacity = static_cast<std::size_t>(*v);
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      problems.emplace_back("seed must be a non-negative integer");
    } else {
      o.config.seeds = {j["seed"].get<std::uint64_t>()};
    }
  }
  try {
    if (problems.empty()) check_options(o);
  } catch (const ConfigError& e) {
    problems.emplace_back(e.what());
  }
  if (!problems.empty()) {
    std::string msg = problems.front();
    for (std::size_t i = 1; i < problems.size(); ++i) msg += "\n" + problems[i];
    throw ConfigError(msg);
  }
  return o;
}

namespace {

json step_json(const StepEvent& e) {
  json j = message("step");
  j["step"] = e.step;
  j["episode"] = e.episode;
  json state;
  state["index"] = e.state;
  for (const auto& [name, value] : e.valuation) {
    std::visit([&, &n = name](const auto& x) { state[n] = x; }, value);
  }
  j["state"] = std::move(state);
  j["action"] = e.action;
  j["reward"] = e.reward;
  j["delta"] = e.delta;
  j["feedback"] = feedback_json(e.feedback);
  j["feedback_step"] = e.applied_step;
  j["feedback_origin"] =
      e.feedback_origin ? json(*e.feedback_origin == FeedbackOrigin::live ? "live" : "oracle")
                        : json(nullptr);
  j["plan"] = e.plan;
  return j;
}

json summary_json(int episode, double mean, double variance, const EpisodeRecord& last) {
  json j = message("summary");
  j["episode"] = episode;
  j["mean"] = mean;
  j["variance"] = variance;
  j["return"] = last.ret;
  j["steps"] = last.steps;
  j["no_plan"] = last.no_plan;
  return j;
}

json finished_json(std::uint64_t steps, int episodes) {
  json j = message("finished");
  j["steps"] = steps;
  j["episodes"] = episodes;
  return j;
}

}  // namespace

std::string step_message(const StepEvent& e) { return step_json(e).dump(); }

std::string summary_message(int episode, double mean, double variance, const EpisodeRecord& last) {
  return summary_json(episode, mean, variance, last).dump();
}

std::string gap_message(std::uint64_t from, std::uint64_t to) {
  json j = message("gap");
  j["from"] = from;
  j["to"] = to;
  return j.dump();
}

std::string finished_message(std::uint64_t steps, int episodes) {
  return finished_json(steps, episodes).dump();
}

std::string feedback_result_message(std::uint64_t step, SubmitStatus status) {
  json j = message("feedback_result");
  j["step"] = step;
  j["status"] = to_string(status);
  j["accepted"] = status == SubmitStatus::accepted;
  return j.dump();
}

std::string control_ack_message(ControlCommand cmd, const ControlAck& ack) {
  json j = message("control_ack");
  j["cmd"] = to_string(cmd);
  j["ok"] = ack.ok;
  if (!ack.ok) j["error"] = ack.error;
  j["status"] = to_string(ack.status);
  j["speed"] = ack.speed;
  return j.dump();
}

std::string error_message(std::string_view text) {
  json j = message("error");
  j["message"] = text;
  return j.dump();
}

// ---------------------------------------------------------------------------

std::uint64_t ReplayBuffer::push(std::string text) {
  std::uint64_t seq;
  {
    std::lock_guard lock(mu_);
    seq = next_seq_++;
    StreamItem item{seq, std::move(text)};
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(item));
    } else {
      ring_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
  }
  cv_.notify_all();
  return seq;
}

StreamBatch ReplayBuffer::read(std::uint64_t from, std::size_t max,
                               std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  from = std::max<std::uint64_t>(from, 1);
  cv_.wait_for(lock, wait, [&] { return closed_ || next_seq_ > from; });

  StreamBatch out;
  const std::uint64_t first = next_seq_ - ring_.size();
  if (from < first) {
    out.items.push_back({0, gap_message(from, first - 1)});
    from = first;
  }
  const std::size_t oldest = ring_.size() < capacity_ ? 0 : head_;
  std::uint64_t seq = from;
  for (; seq < next_seq_ && out.items.size() < max; ++seq) {
    out.items.push_back(ring_[(oldest + (seq - first)) % ring_.size()]);
  }
  out.next = seq;
  out.finished = closed_ && seq == next_seq_;
  return out;
}

void ReplayBuffer::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::uint64_t ReplayBuffer::last_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_ - 1;
}

std::uint64_t ReplayBuffer::first_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_ - ring_.size();
}

// ---------------------------------------------------------------------------

struct Session::Impl {
  std::string id;
  SessionOptions options;
  std::chrono::milliseconds grace{0};
  std::string config_json;
  std::unique_ptr<Agent> agent;  // owned by the loop thread once started
  LiveChannel channel;
  ReplayBuffer buffer;
  std::ofstream log;

  mutable std::mutex mu;
  mutable std::condition_variable cv;
  SessionStatus status = SessionStatus::paused;
  bool stop_requested = false;
  double speed = 1.0;
  std::uint64_t step = 0;
  int episode = 0;
  std::vector<EpisodeRecord> records;
  double mean = 0.0;
  double m2 = 0.0;

  std::thread thread;

  explicit Impl(SessionOptions o)
      : options(std::move(o)), channel(16), buffer(options.replay_capacity) {}

  // Only the loop thread publishes, so the next seq is known in advance.
  void publish(json j) {
    j["seq"] = buffer.last_seq() + 1;
    std::string text = j.dump();
    if (log.is_open()) log << text << '\n';
    buffer.push(std::move(text));
  }

  std::chrono::nanoseconds interval_locked() const {
    const auto tick = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double>(1.0 / speed));
    return std::max<std::chrono::nanoseconds>(grace, tick);
  }

  // Waits until running; false once a stop was requested.
  bool wait_running() {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return stop_requested || status == SessionStatus::running; });
    return !stop_requested;
  }

  // Holds the published step open for the feedback window. Pausing extends
  // the hold; speed changes take effect immediately.
  void hold(Clock::time_point published) {
    std::unique_lock lock(mu);
    for (;;) {
      if (stop_requested) return;
      if (status == SessionStatus::paused) {
        cv.wait(lock);
        continue;
      }
      const auto deadline = published + interval_locked();
      if (Clock::now() >= deadline) return;
      cv.wait_until(lock, deadline);
    }
  }

  void record_episode(const EpisodeRecord& r) {
    double m, var;
    int n;
    {
      std::lock_guard lock(mu);
      records.push_back(r);
      n = static_cast<int>(records.size());
      const double d = r.ret - mean;
      mean += d / n;
      m2 += d * (r.ret - mean);
      m = mean;
      var = m2 / n;
      episode = n;
    }
    publish(summary_json(r.episode, m, var, r));
    if (log.is_open()) log.flush();
  }

  void loop() {
    std::uint64_t applied_step = 0;
    std::optional<FeedbackValue> applied;
    std::optional<FeedbackOrigin> applied_origin;
    const int budget = options.config.episodes;
    int done_episodes = 0;

    while (done_episodes < budget && wait_running()) {
      if (!agent->episode_active()) {
        if (!agent->begin_episode()) {
          record_episode(agent->end_episode());
          ++done_episodes;
          hold(Clock::now());
          continue;
        }
      }
      const PendingStep p = agent->execute_step();
      channel.open_step(p.step);
      {
        std::lock_guard lock(mu);
        step = p.step;
      }
      StepEvent e;
      e.step = p.step;
      e.episode = p.episode;
      e.state = p.next;
      e.valuation = agent->env().valuation(p.next);
      e.action = agent->env().actions()[p.action];
      e.reward = p.reward;
      e.delta = p.delta;
      e.applied_step = applied_step;
      e.feedback = applied;
      e.feedback_origin = applied_origin;
      e.plan = agent->remaining_plan();
      publish(step_json(e));

      hold(Clock::now());

      std::optional<FeedbackValue> live = channel.finalize(p.step);
      std::optional<FeedbackValue> simulated = agent->simulated_feedback(p);
      applied_step = p.step;
      if (live) {
        applied = live;
        applied_origin = FeedbackOrigin::live;
      } else if (simulated) {
        applied = simulated;
        applied_origin = FeedbackOrigin::oracle;
      } else {
        applied.reset();
        applied_origin.reset();
      }
      agent->finalize_step(p, applied);

      if (!agent->episode_active()) {
        record_episode(agent->end_episode());
        ++done_episodes;
      }
    }
    finish();
  }

  void finish() {
    channel.close();
    std::uint64_t steps;
    int episodes;
    {
      std::lock_guard lock(mu);
      status = SessionStatus::finished;
      steps = step;
      episodes = static_cast<int>(records.size());
    }
    publish(finished_json(steps, episodes));
    buffer.close();
    if (log.is_open()) log.flush();
    cv.notify_all();
  }
};

Session::Session(std::string id, SessionOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
  check_options(impl_->options);
  Impl& m = *impl_;
  m.id = std::move(id);
  m.grace = m.options.effective_grace();
  m.speed = m.options.speed;
  const ExperimentConfig& cfg = m.options.config;
  try {
    m.agent = std::make_unique<Agent>(cfg, make_environment(cfg.domain, cfg.layout),
                                      cfg.seeds.front());
    m.config_json = manifest_json(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const LayoutError& e) {
    throw ConfigError(e.what());
  }
  if (!m.options.event_log.empty()) {
    m.log.open(m.options.event_log, std::ios::binary | std::ios::app);
    if (!m.log) throw ConfigError("cannot open event log " + m.options.event_log);
  }
  m.thread = std::thread([&m] { m.loop(); });
}

Session::~Session() {
  {
    std::lock_guard lock(impl_->mu);
    impl_->stop_requested = true;
  }
  impl_->cv.notify_all();
  if (impl_->thread.joinable()) impl_->thread.join();
}

const std::string& Session::id() const { return impl_->id; }

SessionStatus Session::status() const {
  std::lock_guard lock(impl_->mu);
  return impl_->status;
}

std::uint64_t Session::current_step() const {
  std::lock_guard lock(impl_->mu);
  return impl_->step;
}

double Session::speed() const {
  std::lock_guard lock(impl_->mu);
  return impl_->speed;
}

ControlAck Session::control(ControlCommand cmd, std::optional<double> value) {
  Impl& m = *impl_;
  std::unique_lock lock(m.mu);
  ControlAck ack;
  if (m.status == SessionStatus::finished || m.stop_requested) {
    ack.error = "session finished";
  } else {
    switch (cmd) {
      case ControlCommand::pause:
        m.status = SessionStatus::paused;
        ack.ok = true;
        break;
      case ControlCommand::resume:
        m.status = SessionStatus::running;
        ack.ok = true;
        break;
      case ControlCommand::set_speed:
        if (!value || !(*value > 0) || !std::isfinite(*value)) {
          ack.error = "set_speed needs a finite value > 0";
        } else {
          m.speed = *value;
          ack.ok = true;
        }
        break;
      case ControlCommand::stop:
        m.stop_requested = true;
        ack.ok = true;
        m.cv.notify_all();
        m.cv.wait(lock, [&] { return m.status == SessionStatus::finished; });
        break;
    }
  }
  ack.status = m.status;
  ack.speed = m.speed;
  lock.unlock();
  m.cv.notify_all();
  return ack;
}

SubmitStatus Session::submit_feedback(std::uint64_t step, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("feedback sign must be +1 or -1");
  return impl_->channel.submit(
      {step, {sign, impl_->options.config.feedback_magnitude}, FeedbackOrigin::live});
}

StreamBatch Session::read(std::uint64_t from, std::size_t max,
                          std::chrono::milliseconds wait) const {
  return impl_->buffer.read(from, max, wait);
}

bool Session::wait_finished(std::chrono::milliseconds timeout) const {
  std::unique_lock lock(impl_->mu);
  return impl_->cv.wait_for(lock, timeout,
                            [&] { return impl_->status == SessionStatus::finished; });
}

std::vector<EpisodeRecord> Session::records() const {
  std::lock_guard lock(impl_->mu);
  return impl_->records;
}

std::string Session::status_json() const {
  const Impl& m = *impl_;
  json j = message("status");
  {
    std::lock_guard lock(m.mu);
    j["id"] = m.id;
    j["status"] = to_string(m.status);
    j["step"] = m.step;
    j["episodes_done"] = m.records.size();
    j["speed"] = m.speed;
    j["grace_ms"] = m.grace.count();
    j["mean_return"] = m.mean;
  }
  j["replay"] = {{"first", m.buffer.first_seq()}, {"last", m.buffer.last_seq()}};
  j["config"] = nlohmann::ordered_json::parse(m.config_json).at("config");
  return j.dump();
}

std::vector<double> Session::policy_table() const {
  if (status() != SessionStatus::finished) {
    throw std::logic_error("policy_table is only available once the session finished");
  }
  if (impl_->thread.joinable()) impl_->thread.join();
  return impl_->agent->policy().table();
}

// ---------------------------------------------------------------------------

SessionManager::~SessionManager() { shutdown(); }

std::shared_ptr<Session> SessionManager::create(SessionOptions options) {
  static thread_local std::mt19937_64 token_rng(std::random_device{}());
  std::string id;
  {
    std::lock_guard lock(mu_);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(token_rng() ^ (++counter_ << 48)));
    id = buf;
  }
  if (!log_dir_.empty()) {
    std::filesystem::create_directories(log_dir_);
    options.event_log = (std::filesystem::path(log_dir_) / (id + ".jsonl")).string();
  }
  auto session = std::make_shared<Session>(id, std::move(options));
  std::lock_guard lock(mu_);
  sessions_[id] = session;
  return session;
}

std::shared_ptr<Session> SessionManager::get(std::string_view id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession("unknown session '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> SessionManager::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

void SessionManager::shutdown() {
  std::map<std::string, std::shared_ptr<Session>, std::less<>> drained;
  {
    std::lock_guard lock(mu_);
    drained.swap(sessions_);
  }
  for (auto& [id, s] : drained) s->control(ControlCommand::stop);
}

// ---------------------------------------------------------------------------

namespace {

struct FeedbackRequest {
  std::uint64_t step;
  int sign;
};

// Throws std::invalid_argument with a readable reason.
FeedbackRequest parse_feedback(const nlohmann::json& j) {
  if (!j.contains("step") || !j["step"].is_number_unsigned()) {
    throw std::invalid_argument("feedback needs a non-negative integer 'step'");
  }
  if (!j.contains("sign") || !j["sign"].is_number_integer()) {
    throw std::invalid_argument("feedback needs 'sign' +1 or -1");
  }
  const int sign = j["sign"].get<int>();
  if (sign != 1 && sign != -1) throw std::invalid_argument("feedback needs 'sign' +1 or -1");
  return {j["step"].get<std::uint64_t>(), sign};
}

std::pair<ControlCommand, std::optional<double>> parse_control_request(const nlohmann::json& j) {
  if (!j.contains("cmd") || !j["cmd"].is_string()) {
    throw std::invalid_argument("control needs 'cmd'");
  }
  auto cmd = parse_control(j["cmd"].get<std::string>());
  if (!cmd) throw std::invalid_argument("unknown control command '" + j["cmd"].get<std::string>() + "'");
  std::optional<double> value;
  if (j.contains("value") && !j["value"].is_null()) {
    if (!j["value"].is_number()) throw std::invalid_argument("control 'value' must be a number");
    value = j["value"].get<double>();
  }
  return {*cmd, value};
}

nlohmann::json parse_object(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw std::invalid_argument("expected a JSON object");
  return j;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.push_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

HttpReply error_reply(int status, std::string_view text) { return {status, error_message(text)}; }

}  // namespace

std::string handle_client_message(Session& session, std::string_view text) {
  try {
    const auto j = parse_object(text);
    const std::string type = j.contains("type") && j["type"].is_string() ? j["type"].get<std::string>() : "";
    if (type == "feedback") {
      const FeedbackRequest f = parse_feedback(j);
      return feedback_result_message(f.step, session.submit_feedback(f.step, f.sign));
    }
    if (type == "control") {
      const auto [cmd, value] = parse_control_request(j);
      return control_ack_message(cmd, session.control(cmd, value));
    }
    return error_message("unknown message type '" + type + "'");
  } catch (const std::invalid_argument& e) {
    return error_message(e.what());
  }
}

HttpReply route_request(SessionManager& manager, std::string_view method, std::string_view target,
                        std::string_view body) {
  const std::string_view path = target.substr(0, target.find('?'));
  const auto parts = split_path(path);
  if (parts.empty() || parts[0] != "sessions") return error_reply(404, "not found");
  try {
    if (parts.size() == 1) {
      if (method == "POST") {
        try {
          auto s = manager.create(parse_session_options(body));
          json j = message("created");
          j["id"] = s->id();
          j["status"] = to_string(s->status());
          return {201, j.dump()};
        } catch (const ConfigError& e) {
          return error_reply(400, e.what());
        }
      }
      if (method == "GET") {
        json j = message("sessions");
        j["sessions"] = manager.ids();
        return {200, j.dump()};
      }
      return error_reply(405, "method not allowed");
    }
    auto session = manager.get(parts[1]);
    if (parts.size() == 2) {
      if (method != "GET") return error_reply(405, "method not allowed");
      return {200, session->status_json()};
    }
    if (parts.size() == 3 && method == "POST") {
      if (parts[2] == "control") {
        const auto [cmd, value] = parse_control_request(parse_object(body));
        const ControlAck ack = session->control(cmd, value);
        return {ack.ok ? 200 : 409, control_ack_message(cmd, ack)};
      }
      if (parts[2] == "feedback") {
        const FeedbackRequest f = parse_feedback(parse_object(body));
        const SubmitStatus st = session->submit_feedback(f.step, f.sign);
        return {st == SubmitStatus::accepted ? 200 : 409, feedback_result_message(f.step, st)};
      }
    }
    return error_reply(404, "not found");
  } catch (const UnknownSession& e) {
    return error_reply(404, e.what());
  } catch (const std::invalid_argument& e) {
    return error_reply(400, e.what());
  }
}

std::optional<StreamTarget> parse_stream_target(std::string_view target) {
  const std::size_t q = target.find('?');
  const auto parts = split_path(target.substr(0, q));
  if (parts.size() != 3 || parts[0] != "sessions" || parts[2] != "stream") return std::nullopt;
  StreamTarget out;
  out.id = std::string(parts[1]);
  if (q == std::string_view::npos) return out;
  std::string_view query = target.substr(q + 1);
  while (!query.empty()) {
    const std::size_t amp = query.find('&');
    const std::string_view kv = query.substr(0, amp);
    if (kv.substr(0, 5) == "from=") {
      const std::string digits(kv.substr(5));
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
        return std::nullopt;
      }
      try {
        out.from = std::stoull(digits);
      } catch (const std::out_of_range&) {
        return std::nullopt;
      }
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return out;
}

}  // namespace pac
