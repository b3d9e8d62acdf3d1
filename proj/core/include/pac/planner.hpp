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

// Sample-based planning over a time-expanded transition graph.
//
// At horizon k the planner draws the availability slice for timestamp k
// (which actions each state may take at k), keeps every earlier slice, and
// searches paths (s, t) -> (s', t+1) where s' is either the successor under
// an available action or s itself (an idle step). The first horizon with a
// goal-satisfying endpoint wins; among those endpoints the plan with the
// fewest actions is returned, ties going to the lexicographically smallest
// step sequence with idle ordered before any action and actions in
// declaration order.

#ifndef PAC_PLANNER_HPP_
#define PAC_PLANNER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pac/action_lang.hpp"
#include "pac/rl_core.hpp"
#include "pac/transition.hpp"

namespace pac {

// Actions available per state at one timestamp.
using SampleSlice = std::map<StateId, std::vector<ActionId>>;

struct SamplePool {
  std::vector<SampleSlice> slices;  // slices[t - 1] for timestamp t

  const std::vector<ActionId>* find(StateId s, std::uint32_t t) const;
  bool contains(StateId s, ActionId a, std::uint32_t t) const;
};

struct PlanStep {
  std::uint32_t timestamp = 0;
  StateId state = 0;
  std::optional<ActionId> action;  // nullopt for idle

  bool operator==(const PlanStep&) const = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  std::uint32_t horizon = 0;
  StateId initial_state = 0;
  StateId final_state = 0;

  std::size_t action_count() const;
  bool operator==(const Plan&) const = default;
};

struct PlannerConfig {
  std::uint32_t maxstamp = 200;
  std::uint32_t samples_per_state = 1;
  std::optional<std::uint32_t> max_plan_actions;

  bool operator==(const PlannerConfig&) const = default;
};

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using PolicyFn = std::function<std::vector<double>(StateId)>;

// Source of per-(state, timestamp) availability. solve() asks for each
// (state, timestamp) at most once.
class AvailabilitySource {
 public:
  virtual ~AvailabilitySource() = default;
  virtual std::vector<ActionId> sample(StateId s, std::uint32_t t) = 0;
};

// Draws from a policy. Probabilities are fetched once per state and reused,
// so the planner sees one consistent policy snapshot.
class PolicySampler : public AvailabilitySource {
 public:
  PolicySampler(PolicyFn policy, std::size_t num_actions, std::uint32_t samples_per_state,
                Rng& rng);
  std::vector<ActionId> sample(StateId s, std::uint32_t t) override;

 private:
  PolicyFn policy_;
  std::size_t num_actions_;
  std::uint32_t samples_per_state_;
  Rng& rng_;
  std::map<StateId, std::vector<double>> cache_;
};

// Replays a fixed pool; states and timestamps absent from it get nothing.
class FixedPool : public AvailabilitySource {
 public:
  explicit FixedPool(SamplePool pool) : pool_(std::move(pool)) {}
  std::vector<ActionId> sample(StateId s, std::uint32_t t) override;

 private:
  SamplePool pool_;
};

// Every action everywhere.
class FullAvailability : public AvailabilitySource {
 public:
  explicit FullAvailability(std::size_t num_actions) : num_actions_(num_actions) {}
  std::vector<ActionId> sample(StateId s, std::uint32_t t) override;

 private:
  std::size_t num_actions_;
};

// Throws std::invalid_argument unless probs is a distribution over
// `num_actions` actions (non-negative, sums to 1 within 1e-9).
void check_distribution(std::span<const double> probs, std::size_t num_actions);

// One slice: `samples_per_state` i.i.d. draws from policy(.|s) per state,
// states visited in the given order.
SampleSlice sample_pool(const TransitionSystem& ts, const PolicyFn& policy,
                        std::span<const StateId> states, std::uint32_t samples_per_state,
                        Rng& rng);

struct SolveResult {
  std::optional<Plan> plan;
  SamplePool pool;
};

// Throws PlanningError if the query's initial state is not a consistent
// total state.
SolveResult solve(const Query& q, const TransitionSystem& ts, AvailabilitySource& availability,
                  const PlannerConfig& cfg);

// Action steps only, in order.
std::vector<std::pair<StateId, ActionId>> plan_actions(const Plan& p);

// One `t:<n> <action>|idle` line per step.
std::string format_plan(const Plan& p, const TransitionSystem& ts);

}  // namespace pac

#endif  // PAC_PLANNER_HPP_
