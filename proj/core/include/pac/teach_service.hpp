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

// Live teaching sessions: one learner loop per session, a feedback channel
// into it and a replayable event stream out of it. Transport-free; the
// network layer (pac/teach_net.hpp) only moves bytes.
//
// Loop timing. Step j is executed and its StepEvent published; the loop then
// waits max(grace, 1/speed) so a human can answer, finalizes j (live
// feedback first, else the simulated teacher, else the TD error) and only
// then executes step j+1. The StepEvent of j+1 reports what was applied to j.
// A paused session holds between publishing j and finalizing it, so
// feedback for j is still accepted while paused.
//
// Stream. Every published message gets a per-session sequence number `seq`
// (1, 2, ...). Readers pull from a bounded replay buffer with their own
// cursor; a reader that falls behind the buffer receives a gap notice
// naming the lost range and resumes at the oldest retained event.

#ifndef PAC_TEACH_SERVICE_HPP_
#define PAC_TEACH_SERVICE_HPP_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pac/feedback.hpp"
#include "pac/harness.hpp"

namespace pac {

inline constexpr int kProtocolVersion = 1;

enum class SessionStatus { running, paused, finished };
std::string_view to_string(SessionStatus s);

enum class ControlCommand { pause, resume, set_speed, stop };
std::string_view to_string(ControlCommand c);
std::optional<ControlCommand> parse_control(std::string_view name);

struct SessionOptions {
  ExperimentConfig config;  // agent must be pacman or ac; config.seeds[0] seeds the learner
  double speed = 2.0;       // steps per second, > 0
  // Pause after publishing each step; defaults to 300 ms, or 0 when a
  // simulated teacher answers every step.
  std::optional<std::chrono::milliseconds> grace;
  std::size_t replay_capacity = 1000;
  std::string event_log;  // JSONL path; empty disables persistence (not settable over HTTP)

  std::chrono::milliseconds effective_grace() const;
};

// Parses a POST /sessions body:
//   {"config": {"domain": "taxi", "agent": "pacman", ...},
//    "speed": 2, "grace_ms": 300, "replay": 1000, "seed": 7}
// Config values use the same keys as experiment config files. Throws
// ConfigError with every problem found.
SessionOptions parse_session_options(std::string_view json_body);

struct StepEvent {
  std::uint64_t step = 0;
  int episode = 0;
  StateIndex state = 0;
  std::vector<std::pair<std::string, Value>> valuation;
  std::string action;
  double reward = 0.0;
  double delta = 0.0;
  // What the previous step's policy update used.
  std::uint64_t applied_step = 0;  // 0: nothing applied yet
  std::optional<FeedbackValue> feedback;
  std::optional<FeedbackOrigin> feedback_origin;
  std::vector<std::string> plan;  // remaining plan actions (pacman)
};

struct StreamItem {
  std::uint64_t seq = 0;
  std::string json;
};

struct StreamBatch {
  std::vector<StreamItem> items;  // a leading gap notice has seq 0
  std::uint64_t next = 1;         // cursor for the following read
  bool finished = false;          // session finished and everything read
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  std::uint64_t push(std::string json);  // returns the assigned seq
  // Items with seq >= from, at most `max`; waits up to `wait` when none.
  StreamBatch read(std::uint64_t from, std::size_t max, std::chrono::milliseconds wait) const;
  void close();
  std::uint64_t last_seq() const;
  std::uint64_t first_seq() const;

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::size_t capacity_;
  std::vector<StreamItem> ring_;
  std::size_t head_ = 0;  // index of the oldest item once the ring is full
  std::uint64_t next_seq_ = 1;
  bool closed_ = false;
};

struct ControlAck {
  bool ok = false;
  std::string error;  // set when !ok
  SessionStatus status = SessionStatus::paused;
  double speed = 0.0;
};

class UnknownSession : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Session {
 public:
  // Starts the learner thread, paused. Throws ConfigError.
  Session(std::string id, SessionOptions options);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const;
  SessionStatus status() const;
  std::uint64_t current_step() const;
  double speed() const;

  ControlAck control(ControlCommand cmd, std::optional<double> value = std::nullopt);
  SubmitStatus submit_feedback(std::uint64_t step, int sign);

  StreamBatch read(std::uint64_t from, std::size_t max, std::chrono::milliseconds wait) const;

  // Blocks until finished or the timeout passes; true when finished.
  bool wait_finished(std::chrono::milliseconds timeout) const;

  std::vector<EpisodeRecord> records() const;
  std::string status_json() const;
  // Row-major policy parameters. Throws std::logic_error until finished.
  std::vector<double> policy_table() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class SessionManager {
 public:
  // With a non-empty log_dir every session appends its events to
  // <log_dir>/<id>.jsonl.
  explicit SessionManager(std::string log_dir = {}) : log_dir_(std::move(log_dir)) {}
  ~SessionManager();

  std::shared_ptr<Session> create(SessionOptions options);
  // Throws UnknownSession.
  std::shared_ptr<Session> get(std::string_view id) const;
  std::vector<std::string> ids() const;
  // Stops every session.
  void shutdown();

 private:
  std::string log_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
  std::uint64_t counter_ = 0;
};

// Wire messages. Every message carries "v": kProtocolVersion.
std::string step_message(const StepEvent& e);
std::string summary_message(int episode, double mean, double variance,
                            const EpisodeRecord& last);
std::string gap_message(std::uint64_t from, std::uint64_t to);
std::string finished_message(std::uint64_t steps, int episodes);
std::string feedback_result_message(std::uint64_t step, SubmitStatus status);
std::string control_ack_message(ControlCommand cmd, const ControlAck& ack);
std::string error_message(std::string_view message);

// Handles one client message from the bidirectional stream and returns the
// reply. Unknown fields are ignored; unknown types yield an error message.
std::string handle_client_message(Session& session, std::string_view text);

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

// Request/response endpoints:
//   POST /sessions                      create
//   GET  /sessions                      list ids
//   GET  /sessions/{id}                 status
//   POST /sessions/{id}/control         {"cmd": ..., "value": ...}
//   POST /sessions/{id}/feedback        {"step": n, "sign": 1|-1}
HttpReply route_request(SessionManager& manager, std::string_view method, std::string_view target,
                        std::string_view body);

// Parses "/sessions/{id}/stream?from=N"; from defaults to 1.
struct StreamTarget {
  std::string id;
  std::uint64_t from = 1;
};
std::optional<StreamTarget> parse_stream_target(std::string_view target);

}  // namespace pac

#endif  // PAC_TEACH_SERVICE_HPP_
