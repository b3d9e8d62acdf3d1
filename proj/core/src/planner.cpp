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

#include "pac/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace pac {

const std::vector<ActionId>* SamplePool::find(StateId s, std::uint32_t t) const {
  if (t == 0 || t > slices.size()) return nullptr;
  const auto& slice = slices[t - 1];
  auto it = slice.find(s);
  return it == slice.end() ? nullptr : &it->second;
}

bool SamplePool::contains(StateId s, ActionId a, std::uint32_t t) const {
  const auto* actions = find(s, t);
  return actions && std::find(actions->begin(), actions->end(), a) != actions->end();
}

std::size_t Plan::action_count() const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const PlanStep& s) { return s.action.has_value(); }));
}

void check_distribution(std::span<const double> probs, std::size_t num_actions) {
  if (probs.size() != num_actions) {
    throw std::invalid_argument("policy returned " + std::to_string(probs.size()) +
                                " probabilities for " + std::to_string(num_actions) + " actions");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("policy returned a negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("policy distribution sums to " + std::to_string(sum));
  }
}

PolicySampler::PolicySampler(PolicyFn policy, std::size_t num_actions,
                             std::uint32_t samples_per_state, Rng& rng)
    : policy_(std::move(policy)),
      num_actions_(num_actions),
      samples_per_state_(samples_per_state),
      rng_(rng) {
  if (samples_per_state == 0) throw std::invalid_argument("samples_per_state must be positive");
}

std::vector<ActionId> PolicySampler::sample(StateId s, std::uint32_t /*t*/) {
  auto it = cache_.find(s);
  if (it == cache_.end()) {
    auto probs = policy_(s);
    check_distribution(probs, num_actions_);
    it = cache_.emplace(s, std::move(probs)).first;
  }
  std::vector<ActionId> out;
  out.reserve(samples_per_state_);
  for (std::uint32_t i = 0; i < samples_per_state_; ++i) {
    out.push_back(static_cast<ActionId>(sample_action(it->second, rng_)));
  }
  return out;
}

std::vector<ActionId> FixedPool::sample(StateId s, std::uint32_t t) {
  const auto* actions = pool_.find(s, t);
  return actions ? *actions : std::vector<ActionId>{};
}

std::vector<ActionId> FullAvailability::sample(StateId /*s*/, std::uint32_t /*t*/) {
  std::vector<ActionId> out(num_actions_);
  for (std::size_t a = 0; a < num_actions_; ++a) out[a] = static_cast<ActionId>(a);
  return out;
}

SampleSlice sample_pool(const TransitionSystem& ts, const PolicyFn& policy,
                        std::span<const StateId> states, std::uint32_t samples_per_state,
                        Rng& rng) {
  PolicySampler sampler(policy, ts.num_actions(), samples_per_state, rng);
  SampleSlice slice;
  for (StateId s : states) {
    auto drawn = sampler.sample(s, 0);
    auto& slot = slice[s];
    slot.insert(slot.end(), drawn.begin(), drawn.end());
  }
  return slice;
}

namespace {

// One node of the time-expanded search. Layers are kept in lexicographic
// order of their best step sequence, so `pred` doubles as a prefix rank.
struct Node {
  StateId state = 0;
  std::uint32_t actions = 0;
  std::int32_t pred = -1;
  std::int32_t step = -1;  // 0 idle, a + 1 for action a
};

bool better(const Node& a, const Node& b) {
  return std::tie(a.actions, a.pred, a.step) < std::tie(b.actions, b.pred, b.step);
}

}  // namespace

SolveResult solve(const Query& q, const TransitionSystem& ts, AvailabilitySource& availability,
                  const PlannerConfig& cfg) {
  if (cfg.maxstamp == 0) throw std::invalid_argument("maxstamp must be at least 1");
  const ClosureResult init = initial_state(ts, q);
  if (init.status != ClosureStatus::ok) {
    const std::string& f = ts.description().fluents[init.fluent].name;
    throw PlanningError(init.status == ClosureStatus::inconsistent
                            ? "initial state is inconsistent at fluent '" + f + "'"
                            : "initial state leaves fluent '" + f + "' unassigned");
  }
  const std::vector<GroundAtom> goal = ts.ground_atoms(q.goal);
  const StateId start = ts.intern(init.state);

  SolveResult result;
  std::vector<std::int8_t> goal_cache;
  auto is_goal = [&](StateId s) {
    if (s >= goal_cache.size()) goal_cache.resize(static_cast<std::size_t>(s) + 1, -1);
    if (goal_cache[s] < 0) goal_cache[s] = holds(ts.state(s), goal) ? 1 : 0;
    return goal_cache[s] == 1;
  };

  if (is_goal(start)) {
    result.plan = Plan{{}, 0, start, start};
    return result;
  }

  std::vector<std::vector<Node>> layers{{Node{start, 0, -1, -1}}};
  std::unordered_map<StateId, Node> best;
  for (std::uint32_t k = 1; k <= cfg.maxstamp; ++k) {
    const std::vector<Node>& cur = layers.back();
    SampleSlice& slice = result.pool.slices.emplace_back();
    best.clear();
    auto consider = [&](const Node& n) {
      auto [it, inserted] = best.try_emplace(n.state, n);
      if (!inserted && better(n, it->second)) it->second = n;
    };
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const Node& node = cur[i];
      const auto pred = static_cast<std::int32_t>(i);
      auto& available = slice[node.state];
      available = availability.sample(node.state, k);
      consider({node.state, node.actions, pred, 0});
      if (cfg.max_plan_actions && node.actions + 1 > *cfg.max_plan_actions) continue;
      for (ActionId a : available) {
        const SuccessorId next = ts.successor_id(node.state, a);
        if (next.status != StepStatus::ok) continue;
        consider({next.state, node.actions + 1, pred, static_cast<std::int32_t>(a) + 1});
      }
    }

    std::vector<Node> layer;
    layer.reserve(best.size());
    for (const auto& [s, n] : best) layer.push_back(n);
    std::sort(layer.begin(), layer.end(), [](const Node& a, const Node& b) {
      return std::tie(a.pred, a.step) < std::tie(b.pred, b.step);
    });

    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (!is_goal(layer[i].state)) continue;
      if (!hit || layer[i].actions < layer[*hit].actions) hit = i;
    }
    layers.push_back(std::move(layer));
    if (!hit) continue;

    Plan plan;
    plan.horizon = k;
    plan.initial_state = start;
    plan.final_state = layers.back()[*hit].state;
    plan.steps.resize(k);
    std::size_t idx = *hit;
    for (std::uint32_t t = k; t >= 1; --t) {
      const Node& n = layers[t][idx];
      const Node& prev = layers[t - 1][static_cast<std::size_t>(n.pred)];
      PlanStep& step = plan.steps[t - 1];
      step.timestamp = t;
      step.state = prev.state;
      if (n.step > 0) step.action = static_cast<ActionId>(n.step - 1);
      idx = static_cast<std::size_t>(n.pred);
    }
    result.plan = std::move(plan);
    return result;
  }
  return result;
}

std::vector<std::pair<StateId, ActionId>> plan_actions(const Plan& p) {
  std::vector<std::pair<StateId, ActionId>> out;
  for (const auto& step : p.steps) {
    if (step.action) out.emplace_back(step.state, *step.action);
  }
  return out;
}

std::string format_plan(const Plan& p, const TransitionSystem& ts) {
  std::ostringstream os;
  for (const auto& step : p.steps) {
    os << "t:" << step.timestamp << ' ' << (step.action ? ts.action_name(*step.action) : "idle")
       << '\n';
  }
  return os.str();
}

}  // namespace pac
