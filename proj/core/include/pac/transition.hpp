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

// Grounding and deterministic transition semantics for action descriptions.
//
// successor(s, a) fires every ground dynamic law of `a` whose conditions hold
// in s, closes the direct effects under the static laws, and lets every
// remaining fluent keep its value from s (inertia).

#ifndef PAC_TRANSITION_HPP_
#define PAC_TRANSITION_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pac/action_lang.hpp"

namespace pac {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

// Fluent and value are indices into the declaration order of the
// ActionDescription.
struct GroundAtom {
  std::uint32_t fluent = 0;
  std::uint32_t value = 0;

  auto operator<=>(const GroundAtom&) const = default;
};

// Total valuation: one value index per declared fluent.
class GroundState {
 public:
  GroundState() = default;
  explicit GroundState(std::vector<std::uint32_t> values) : values_(std::move(values)) {}

  std::uint32_t operator[](std::size_t fluent) const { return values_[fluent]; }
  void set(std::size_t fluent, std::uint32_t value) { values_[fluent] = value; }
  std::size_t size() const { return values_.size(); }
  const std::vector<std::uint32_t>& values() const { return values_; }

  bool operator==(const GroundState&) const = default;

 private:
  std::vector<std::uint32_t> values_;
};

struct GroundStateHash {
  std::size_t operator()(const GroundState& s) const noexcept;
};

enum class LawKind { static_law, dynamic_law };

struct GroundLaw {
  LawKind kind = LawKind::dynamic_law;
  std::optional<ActionId> action;
  GroundAtom effect;
  std::vector<GroundAtom> conditions;

  bool operator==(const GroundLaw&) const = default;
};

using PartialValuation = std::vector<std::optional<std::uint32_t>>;

enum class ClosureStatus { ok, inconsistent, underdetermined };

struct ClosureResult {
  ClosureStatus status = ClosureStatus::ok;
  GroundState state;
  std::uint32_t fluent = 0;  // offending fluent when status != ok
};

enum class StepStatus { ok, inapplicable, inconsistent };

struct SuccessorResult {
  StepStatus status = StepStatus::ok;
  GroundState state;
};

struct SuccessorId {
  StepStatus status = StepStatus::ok;
  StateId state = 0;
};

// Dense ids for ground states, assigned on first intern. Safe for
// concurrent use; interning one state from several threads yields one id.
class StateCodec {
 public:
  StateId intern(const GroundState& s);
  std::optional<StateId> find(const GroundState& s) const;
  GroundState state(StateId id) const;
  std::size_t size() const;

  // Memo for successor_id; kUnknown until computed.
  static constexpr std::int64_t kUnknown = -1;
  std::int64_t cached_step(StateId s, ActionId a, std::size_t num_actions) const;
  void cache_step(StateId s, ActionId a, std::size_t num_actions, std::int64_t value);

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<GroundState, StateId, GroundStateHash> ids_;
  std::vector<GroundState> states_;
  std::vector<std::int64_t> steps_;
};

class GroundingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroundingOptions {
  std::size_t max_ground_laws = 2'000'000;
};

class TransitionSystem {
 public:
  TransitionSystem(ActionDescription description, std::vector<GroundLaw> statics,
                   std::vector<GroundLaw> dynamics);
  TransitionSystem(TransitionSystem&&) noexcept = default;
  TransitionSystem& operator=(TransitionSystem&&) noexcept = default;

  const ActionDescription& description() const { return description_; }
  std::size_t num_fluents() const { return description_.fluents.size(); }
  std::size_t num_actions() const { return description_.actions.size(); }
  const std::string& action_name(ActionId a) const { return description_.actions[a].name; }
  std::optional<ActionId> action_id(std::string_view name) const;

  const std::vector<GroundLaw>& static_laws() const { return statics_; }
  const std::vector<GroundLaw>& dynamic_laws() const { return dynamics_; }
  std::size_t ground_law_count() const { return statics_.size() + dynamics_.size(); }

  // Ground dynamic laws of `a` that can fire in s (a superset filtered by an
  // index on one condition fluent; callers still check conditions).
  void candidate_laws(const GroundState& s, ActionId a,
                      std::vector<const GroundLaw*>& out) const;

  std::optional<GroundAtom> ground_atom(std::string_view fluent, const Value& v) const;
  // Grounds query atoms; throws std::invalid_argument on non-ground or
  // out-of-domain atoms.
  std::vector<GroundAtom> ground_atoms(const std::vector<Atom>& atoms) const;
  GroundState make_state(const std::vector<std::pair<std::string, Value>>& valuation) const;

  // "f1=v1 f2=v2 ..."
  std::string describe(const GroundState& s) const;
  const Value& value_of(const GroundState& s, std::size_t fluent) const;

  StateId intern(const GroundState& s) const { return codec_->intern(s); }
  GroundState state(StateId id) const { return codec_->state(id); }
  std::size_t known_states() const { return codec_->size(); }

  // successor() on interned ids, memoized.
  SuccessorId successor_id(StateId s, ActionId a) const;

 private:
  struct ActionIndex {
    std::optional<std::uint32_t> key_fluent;
    std::vector<std::vector<std::uint32_t>> by_value;  // law offsets per key value
    std::vector<std::uint32_t> unkeyed;
  };

  ActionDescription description_;
  std::vector<GroundLaw> statics_;
  std::vector<GroundLaw> dynamics_;
  std::vector<ActionIndex> index_;
  std::unique_ptr<StateCodec> codec_;
};

TransitionSystem ground(const ActionDescription& d, const GroundingOptions& options = {});

// True iff every atom holds in s (vacuously true for no atoms).
bool holds(const GroundState& s, std::span<const GroundAtom> atoms);

// Least fixpoint of the static laws over `partial`. Unassigned fluents take
// their value from `defaults` when given; otherwise they make the result
// underdetermined.
ClosureResult static_closure(const TransitionSystem& ts, const PartialValuation& partial,
                             const GroundState* defaults = nullptr);

SuccessorResult successor(const TransitionSystem& ts, const GroundState& s, ActionId a);

// Closed total state described by the query's init atoms.
ClosureResult initial_state(const TransitionSystem& ts, const Query& q);

}  // namespace pac

#endif  // PAC_TRANSITION_HPP_
