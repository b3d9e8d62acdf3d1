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

#include "pac/feedback.hpp"

#include <stdexcept>

namespace pac {

FeedbackModel FeedbackModel::for_regime(NoiseRegime r) {
  switch (r) {
    case NoiseRegime::ideal:
      return {1.0, 0.0};
    case NoiseRegime::infrequent:
      return {0.5, 0.0};
    case NoiseRegime::inconsistent:
      return {1.0, 0.3};
    case NoiseRegime::both:
      return {0.5, 0.3};
  }
  return {};
}

std::string_view to_string(NoiseRegime r) {
  switch (r) {
    case NoiseRegime::ideal:
      return "ideal";
    case NoiseRegime::infrequent:
      return "infrequent";
    case NoiseRegime::inconsistent:
      return "inconsistent";
    case NoiseRegime::both:
      return "both";
  }
  return "?";
}

std::optional<NoiseRegime> parse_noise(std::string_view name) {
  for (auto r : {NoiseRegime::ideal, NoiseRegime::infrequent, NoiseRegime::inconsistent,
                 NoiseRegime::both}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::optional<FeedbackValue> apply_model(const FeedbackModel& m, const FeedbackValue& f, Rng& rng) {
  const double give = uniform01(rng);
  const double flip = uniform01(rng);
  if (give >= m.p_give) return std::nullopt;
  FeedbackValue out = f;
  if (flip < m.p_flip) out.sign = -out.sign;
  return out;
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::none:
      return "none";
    case Scenario::helpful:
      return "helpful";
    case Scenario::misleading:
      return "misleading";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (auto s : {Scenario::none, Scenario::helpful, Scenario::misleading}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

ScenarioOracle::ScenarioOracle(Scenario kind, Table table) : kind_(kind), table_(std::move(table)) {
  for (const auto& [key, sign] : table_) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("oracle signs must be +1 or -1");
  }
}

FeedbackValue ScenarioOracle::feedback(std::uint32_t s, std::uint32_t a, double magnitude) const {
  auto it = table_.find({s, a});
  if (it == table_.end()) {
    throw std::out_of_range("no oracle entry for state " + std::to_string(s) + ", action " +
                            std::to_string(a));
  }
  return {it->second, magnitude};
}

ScenarioOracle ScenarioOracle::flipped() const {
  Table t = table_;
  for (auto& [key, sign] : t) sign = -sign;
  return ScenarioOracle(kind_, std::move(t));
}

std::string_view to_string(SubmitStatus s) {
  switch (s) {
    case SubmitStatus::accepted:
      return "accepted";
    case SubmitStatus::stale:
      return "stale";
    case SubmitStatus::duplicate:
      return "duplicate";
    case SubmitStatus::full:
      return "full";
    case SubmitStatus::closed:
      return "closed";
  }
  return "?";
}

void LiveChannel::open_step(std::uint64_t step) {
  std::lock_guard lock(mu_);
  current_ = step;
  // Only the window can still be answered.
  while (!answered_.empty() && *answered_.begin() + 1 < current_) answered_.erase(answered_.begin());
}

SubmitStatus LiveChannel::submit(const FeedbackEvent& e) {
  std::lock_guard lock(mu_);
  if (closed_) return SubmitStatus::closed;
  if (current_ == 0 || e.step > current_ || e.step + 1 < current_ || e.step <= finalized_) {
    return SubmitStatus::stale;
  }
  if (answered_.count(e.step)) return SubmitStatus::duplicate;
  if (pending_.size() >= capacity_) return SubmitStatus::full;
  answered_.insert(e.step);
  pending_[e.step] = e.value;
  return SubmitStatus::accepted;
}

std::optional<FeedbackValue> LiveChannel::finalize(std::uint64_t step) {
  std::lock_guard lock(mu_);
  if (step > finalized_) finalized_ = step;
  auto it = pending_.find(step);
  if (it == pending_.end()) return std::nullopt;
  FeedbackValue v = it->second;
  pending_.erase(it);
  return v;
}

void LiveChannel::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
}

std::uint64_t LiveChannel::current_step() const {
  std::lock_guard lock(mu_);
  return current_;
}

}  // namespace pac
