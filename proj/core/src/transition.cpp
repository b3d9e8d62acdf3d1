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

#include "pac/transition.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace pac {

std::size_t GroundStateHash::operator()(const GroundState& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (auto v : s.values()) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

StateId StateCodec::intern(const GroundState& s) {
  {
    std::shared_lock lock(mu_);
    if (auto it = ids_.find(s); it != ids_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  auto [it, inserted] = ids_.try_emplace(s, static_cast<StateId>(states_.size()));
  if (inserted) states_.push_back(s);
  return it->second;
}

std::optional<StateId> StateCodec::find(const GroundState& s) const {
  std::shared_lock lock(mu_);
  if (auto it = ids_.find(s); it != ids_.end()) return it->second;
  return std::nullopt;
}

GroundState StateCodec::state(StateId id) const {
  std::shared_lock lock(mu_);
  if (id >= states_.size()) throw std::out_of_range("unknown state id " + std::to_string(id));
  return states_[id];
}

std::size_t StateCodec::size() const {
  std::shared_lock lock(mu_);
  return states_.size();
}

std::int64_t StateCodec::cached_step(StateId s, ActionId a, std::size_t num_actions) const {
  std::shared_lock lock(mu_);
  const std::size_t k = static_cast<std::size_t>(s) * num_actions + a;
  return k < steps_.size() ? steps_[k] : kUnknown;
}

void StateCodec::cache_step(StateId s, ActionId a, std::size_t num_actions, std::int64_t value) {
  std::unique_lock lock(mu_);
  const std::size_t k = static_cast<std::size_t>(s) * num_actions + a;
  if (k >= steps_.size()) steps_.resize(std::max(k + 1, steps_.size() * 2), kUnknown);
  steps_[k] = value;
}

TransitionSystem::TransitionSystem(ActionDescription description, std::vector<GroundLaw> statics,
                                   std::vector<GroundLaw> dynamics)
    : description_(std::move(description)),
      statics_(std::move(statics)),
      dynamics_(std::move(dynamics)),
      codec_(std::make_unique<StateCodec>()) {
  // Index each action's laws on the condition fluent that splits them into
  // the most buckets.
  index_.resize(num_actions());
  for (ActionId a = 0; a < num_actions(); ++a) {
    std::vector<std::uint32_t> laws;
    for (std::uint32_t i = 0; i < dynamics_.size(); ++i) {
      if (dynamics_[i].action == a) laws.push_back(i);
    }
    std::map<std::uint32_t, std::size_t> spread;
    for (std::uint32_t f = 0; f < num_fluents(); ++f) {
      std::vector<bool> seen(description_.fluents[f].domain.size(), false);
      std::size_t distinct = 0;
      for (auto i : laws) {
        for (const auto& c : dynamics_[i].conditions) {
          if (c.fluent == f && !seen[c.value]) {
            seen[c.value] = true;
            ++distinct;
          }
        }
      }
      spread[f] = distinct;
    }
    ActionIndex& idx = index_[a];
    std::size_t best = 1;
    for (auto [f, distinct] : spread) {
      if (distinct > best) {
        best = distinct;
        idx.key_fluent = f;
      }
    }
    if (idx.key_fluent) idx.by_value.resize(description_.fluents[*idx.key_fluent].domain.size());
    for (auto i : laws) {
      std::optional<std::uint32_t> key;
      if (idx.key_fluent) {
        for (const auto& c : dynamics_[i].conditions) {
          if (c.fluent == *idx.key_fluent) key = c.value;
        }
      }
      if (key) {
        idx.by_value[*key].push_back(i);
      } else {
        idx.unkeyed.push_back(i);
      }
    }
  }
}

std::optional<ActionId> TransitionSystem::action_id(std::string_view name) const {
  auto i = description_.action_index(name);
  if (!i) return std::nullopt;
  return static_cast<ActionId>(*i);
}

void TransitionSystem::candidate_laws(const GroundState& s, ActionId a,
                                      std::vector<const GroundLaw*>& out) const {
  out.clear();
  const ActionIndex& idx = index_[a];
  if (idx.key_fluent) {
    for (auto i : idx.by_value[s[*idx.key_fluent]]) out.push_back(&dynamics_[i]);
  }
  for (auto i : idx.unkeyed) out.push_back(&dynamics_[i]);
}

std::optional<GroundAtom> TransitionSystem::ground_atom(std::string_view fluent,
                                                        const Value& v) const {
  auto f = description_.fluent_index(fluent);
  if (!f) return std::nullopt;
  const auto& domain = description_.fluents[*f].domain;
  auto it = std::find(domain.begin(), domain.end(), v);
  if (it == domain.end()) return std::nullopt;
  return GroundAtom{static_cast<std::uint32_t>(*f), static_cast<std::uint32_t>(it - domain.begin())};
}

std::vector<GroundAtom> TransitionSystem::ground_atoms(const std::vector<Atom>& atoms) const {
  std::vector<GroundAtom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (!a.value.is_constant()) {
      throw std::invalid_argument("atom over '" + a.fluent + "' is not ground");
    }
    auto g = ground_atom(a.fluent, *a.value.constant);
    if (!g) {
      throw std::invalid_argument("atom " + a.fluent + "=" + to_string(a.value) +
                                  " is not a ground atom of this domain");
    }
    out.push_back(*g);
  }
  return out;
}

GroundState TransitionSystem::make_state(
    const std::vector<std::pair<std::string, Value>>& valuation) const {
  PartialValuation partial(num_fluents());
  for (const auto& [name, value] : valuation) {
    auto g = ground_atom(name, value);
    if (!g) throw std::invalid_argument("no ground atom " + name + "=" + to_string(value));
    partial[g->fluent] = g->value;
  }
  std::vector<std::uint32_t> values(num_fluents());
  for (std::size_t f = 0; f < num_fluents(); ++f) {
    if (!partial[f]) {
      throw std::invalid_argument("valuation does not assign fluent '" +
                                  description_.fluents[f].name + "'");
    }
    values[f] = *partial[f];
  }
  return GroundState(std::move(values));
}

std::string TransitionSystem::describe(const GroundState& s) const {
  std::ostringstream os;
  for (std::size_t f = 0; f < s.size(); ++f) {
    if (f) os << ' ';
    os << description_.fluents[f].name << '=' << to_string(value_of(s, f));
  }
  return os.str();
}

const Value& TransitionSystem::value_of(const GroundState& s, std::size_t fluent) const {
  return description_.fluents[fluent].domain[s[fluent]];
}

SuccessorId TransitionSystem::successor_id(StateId s, ActionId a) const {
  const std::int64_t cached = codec_->cached_step(s, a, num_actions());
  if (cached >= 0) return {StepStatus::ok, static_cast<StateId>(cached)};
  if (cached == -2) return {StepStatus::inapplicable, 0};
  if (cached == -3) return {StepStatus::inconsistent, 0};
  const SuccessorResult r = successor(*this, codec_->state(s), a);
  SuccessorId out{r.status, 0};
  std::int64_t memo = -2;
  if (r.status == StepStatus::ok) {
    out.state = codec_->intern(r.state);
    memo = out.state;
  } else if (r.status == StepStatus::inconsistent) {
    memo = -3;
  }
  codec_->cache_step(s, a, num_actions(), memo);
  return out;
}

namespace {

std::optional<GroundAtom> ground_one(const ActionDescription& d, const Atom& atom,
                                     const Binding& b) {
  const auto f = d.fluent_index(atom.fluent);
  if (!f) return std::nullopt;
  const auto v = evaluate(atom.value, b);
  if (!v) return std::nullopt;
  const auto& domain = d.fluents[*f].domain;
  auto it = std::find(domain.begin(), domain.end(), *v);
  if (it == domain.end()) return std::nullopt;
  return GroundAtom{static_cast<std::uint32_t>(*f), static_cast<std::uint32_t>(it - domain.begin())};
}

// Grounds head + body under every binding, dropping groundings with any
// out-of-domain atom.
template <typename Emit>
void ground_law(const ActionDescription& d, const Atom& head, const std::vector<Atom>& body,
                const std::vector<ParamRange>& params, std::size_t cap, std::size_t& count,
                Emit&& emit) {
  for_each_binding(params, [&](const Binding& b) {
    auto h = ground_one(d, head, b);
    if (!h) return true;
    std::vector<GroundAtom> conds;
    conds.reserve(body.size());
    for (const auto& atom : body) {
      auto g = ground_one(d, atom, b);
      if (!g) return true;
      conds.push_back(*g);
    }
    if (++count > cap) {
      throw GroundingError("grounding exceeds the cap of " + std::to_string(cap) + " laws");
    }
    emit(*h, std::move(conds));
    return true;
  });
}

}  // namespace

TransitionSystem ground(const ActionDescription& d, const GroundingOptions& options) {
  std::vector<GroundLaw> statics;
  std::vector<GroundLaw> dynamics;
  std::size_t count = 0;
  for (const auto& law : d.statics) {
    ground_law(d, law.head, law.body, law.params, options.max_ground_laws, count,
               [&](GroundAtom h, std::vector<GroundAtom> conds) {
                 statics.push_back({LawKind::static_law, std::nullopt, h, std::move(conds)});
               });
  }
  for (const auto& law : d.dynamics) {
    const auto a = d.action_index(law.action);
    if (!a) throw GroundingError("unknown action '" + law.action + "'");
    ground_law(d, law.effect, law.conditions, law.params, options.max_ground_laws, count,
               [&](GroundAtom h, std::vector<GroundAtom> conds) {
                 dynamics.push_back(
                     {LawKind::dynamic_law, static_cast<ActionId>(*a), h, std::move(conds)});
               });
  }
  return TransitionSystem(d, std::move(statics), std::move(dynamics));
}

bool holds(const GroundState& s, std::span<const GroundAtom> atoms) {
  for (const auto& a : atoms) {
    if (s[a.fluent] != a.value) return false;
  }
  return true;
}

ClosureResult static_closure(const TransitionSystem& ts, const PartialValuation& partial,
                             const GroundState* defaults) {
  PartialValuation caused = partial;
  caused.resize(ts.num_fluents());
  auto current = [&](std::uint32_t f) -> std::optional<std::uint32_t> {
    if (caused[f]) return caused[f];
    if (defaults) return (*defaults)[f];
    return std::nullopt;
  };
  auto body_holds = [&](const GroundLaw& law) {
    for (const auto& c : law.conditions) {
      if (current(c.fluent) != c.value) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& law : ts.static_laws()) {
      if (!body_holds(law)) continue;
      auto& slot = caused[law.effect.fluent];
      if (slot) {
        if (*slot != law.effect.value) {
          return {ClosureStatus::inconsistent, {}, law.effect.fluent};
        }
      } else {
        slot = law.effect.value;
        changed = true;
      }
    }
  }

  std::vector<std::uint32_t> values(ts.num_fluents());
  for (std::uint32_t f = 0; f < ts.num_fluents(); ++f) {
    auto v = current(f);
    if (!v) return {ClosureStatus::underdetermined, {}, f};
    values[f] = *v;
  }
  GroundState state(std::move(values));
  if (defaults) {
    // A law that fired on a default later overridden can leave the result
    // unclosed; that is reported rather than repaired.
    for (const auto& law : ts.static_laws()) {
      if (holds(state, law.conditions) && state[law.effect.fluent] != law.effect.value) {
        return {ClosureStatus::inconsistent, {}, law.effect.fluent};
      }
    }
  }
  return {ClosureStatus::ok, std::move(state), 0};
}

SuccessorResult successor(const TransitionSystem& ts, const GroundState& s, ActionId a) {
  if (a >= ts.num_actions()) return {StepStatus::inapplicable, {}};
  thread_local std::vector<const GroundLaw*> candidates;
  ts.candidate_laws(s, a, candidates);
  PartialValuation effects(ts.num_fluents());
  bool fired = false;
  for (const GroundLaw* law : candidates) {
    if (!holds(s, law->conditions)) continue;
    fired = true;
    auto& slot = effects[law->effect.fluent];
    if (slot && *slot != law->effect.value) return {StepStatus::inconsistent, {}};
    slot = law->effect.value;
  }
  if (!fired) return {StepStatus::inapplicable, {}};
  ClosureResult closed = static_closure(ts, effects, &s);
  if (closed.status != ClosureStatus::ok) return {StepStatus::inconsistent, {}};
  return {StepStatus::ok, std::move(closed.state)};
}

ClosureResult initial_state(const TransitionSystem& ts, const Query& q) {
  PartialValuation partial(ts.num_fluents());
  for (const auto& atom : ts.ground_atoms(q.initial)) {
    auto& slot = partial[atom.fluent];
    if (slot && *slot != atom.value) return {ClosureStatus::inconsistent, {}, atom.fluent};
    slot = atom.value;
  }
  return static_closure(ts, partial, nullptr);
}

}  // namespace pac
