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

// Feedback signals: simulated teachers, noise regimes and the live channel.

#ifndef PAC_FEEDBACK_HPP_
#define PAC_FEEDBACK_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "pac/rl_core.hpp"

namespace pac {

struct FeedbackValue {
  int sign = 1;  // +1 or -1
  double magnitude = 1.0;

  double value() const { return sign * magnitude; }
  bool operator==(const FeedbackValue&) const = default;
};

enum class NoiseRegime { ideal, infrequent, inconsistent, both };

struct FeedbackModel {
  double p_give = 1.0;
  double p_flip = 0.0;

  static FeedbackModel for_regime(NoiseRegime r);
  bool operator==(const FeedbackModel&) const = default;
};

std::string_view to_string(NoiseRegime r);
std::optional<NoiseRegime> parse_noise(std::string_view name);

// Two draws per call (give, then flip) whatever the parameters, so the
// feedback stream stays aligned across regimes.
std::optional<FeedbackValue> apply_model(const FeedbackModel& m, const FeedbackValue& f, Rng& rng);

enum class Scenario { none, helpful, misleading };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view name);

// Preferred sign for every reachable (state, action) pair.
class ScenarioOracle {
 public:
  using Table = std::map<std::pair<std::uint32_t, std::uint32_t>, int>;

  ScenarioOracle(Scenario kind, Table table);

  Scenario kind() const { return kind_; }
  const Table& table() const { return table_; }

  // Throws std::out_of_range for a pair outside the table.
  FeedbackValue feedback(std::uint32_t s, std::uint32_t a, double magnitude = 1.0) const;

  // Same pairs, every sign negated.
  ScenarioOracle flipped() const;

 private:
  Scenario kind_;
  Table table_;
};

enum class FeedbackOrigin { oracle, live };

struct FeedbackEvent {
  std::uint64_t step = 0;
  FeedbackValue value;
  FeedbackOrigin origin = FeedbackOrigin::live;
};

enum class SubmitStatus { accepted, stale, duplicate, full, closed };

std::string_view to_string(SubmitStatus s);

// Hand-off from feedback producers to the learner loop. The loop announces
// each executed step with open_step and consumes that step's feedback with
// finalize right before applying the step's policy update. A submission is
// accepted iff it targets the current or the immediately previous step and
// that step's update has not been finalized yet.
class LiveChannel {
 public:
  explicit LiveChannel(std::size_t capacity = 16) : capacity_(capacity) {}

  void open_step(std::uint64_t step);
  SubmitStatus submit(const FeedbackEvent& e);
  // Returns the accepted value for `step` (at most once) and closes it.
  std::optional<FeedbackValue> finalize(std::uint64_t step);
  void close();

  std::uint64_t current_step() const;

 private:
  mutable std::mutex mu_;
  std::size_t capacity_;
  std::uint64_t current_ = 0;
  std::uint64_t finalized_ = 0;  // every step <= finalized_ is closed
  bool closed_ = false;
  std::map<std::uint64_t, FeedbackValue> pending_;
  std::set<std::uint64_t> answered_;
};

}  // namespace pac

#endif  // PAC_FEEDBACK_HPP_
