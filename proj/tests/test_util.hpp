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

// Shared helpers and reference oracles for the test suites. The oracles are
// deliberately naive: no indexing, no memoization, nothing shared with the
// code under test beyond the data types.

#ifndef PAC_TESTS_TEST_UTIL_HPP_
#define PAC_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pac/action_lang.hpp"
#include "pac/envs.hpp"
#include "pac/transition.hpp"

namespace pac::testing {

inline constexpr const char* kThreeGrid =
    "fluent loc : 1..3 .\n"
    "action moveleft .\n"
    "action moveright .\n"
    "moveleft causes loc = L-1 if loc = L where L in 1..3 .\n"
    "moveright causes loc = L+1 if loc = L where L in 1..3 .\n";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& rel) { return std::string(PAC_DATA_DIR) + "/" + rel; }

// Successor by re-evaluating every ground law of the description from
// scratch: fire effects, then sweep the static laws (bodies read the caused
// value, else the inertial one from s) until nothing changes, then reject
// results that are not closed.
inline std::optional<GroundState> naive_successor(const TransitionSystem& ts, const GroundState& s,
                                                  ActionId a) {
  const std::size_t n = ts.num_fluents();
  std::vector<std::optional<std::uint32_t>> next(n);
  bool fired = false;
  for (const GroundLaw& law : ts.dynamic_laws()) {
    if (!law.action || *law.action != a) continue;
    bool ok = true;
    for (const auto& c : law.conditions) ok = ok && s[c.fluent] == c.value;
    if (!ok) continue;
    fired = true;
    auto& slot = next[law.effect.fluent];
    if (slot && *slot != law.effect.value) return std::nullopt;
    slot = law.effect.value;
  }
  if (!fired) return std::nullopt;
  auto value = [&](std::uint32_t f) { return next[f] ? *next[f] : s[f]; };
  for (bool changed = true; changed;) {
    changed = false;
    for (const GroundLaw& law : ts.static_laws()) {
      bool ok = true;
      for (const auto& c : law.conditions) ok = ok && value(c.fluent) == c.value;
      if (!ok) continue;
      auto& slot = next[law.effect.fluent];
      if (slot && *slot != law.effect.value) return std::nullopt;
      if (!slot) {
        slot = law.effect.value;
        changed = true;
      }
    }
  }
  std::vector<std::uint32_t> out(n);
  for (std::size_t f = 0; f < n; ++f) out[f] = value(static_cast<std::uint32_t>(f));
  for (const GroundLaw& law : ts.static_laws()) {
    bool ok = true;
    for (const auto& c : law.conditions) ok = ok && out[c.fluent] == c.value;
    if (ok && out[law.effect.fluent] != law.effect.value) return std::nullopt;
  }
  return GroundState(std::move(out));
}

// Breadth-first shortest action count from `from` to any state satisfying
// `goal`, over naive_successor. nullopt when unreachable.
inline std::optional<int> bfs_distance(const TransitionSystem& ts, const GroundState& from,
                                       const std::vector<GroundAtom>& goal) {
  auto sat = [&](const GroundState& s) {
    for (const auto& g : goal) {
      if (s[g.fluent] != g.value) return false;
    }
    return true;
  };
  std::map<std::vector<std::uint32_t>, int> dist{{from.values(), 0}};
  std::deque<GroundState> queue{from};
  while (!queue.empty()) {
    GroundState s = queue.front();
    queue.pop_front();
    const int d = dist[s.values()];
    if (sat(s)) return d;
    for (ActionId a = 0; a < ts.num_actions(); ++a) {
      auto n = naive_successor(ts, s, a);
      if (!n || dist.count(n->values())) continue;
      dist[n->values()] = d + 1;
      queue.push_back(*n);
    }
  }
  return std::nullopt;
}

// Value iteration on a deterministic environment; returns the optimal
// undiscounted return from start (episodes end at terminal states). The
// horizon bounds the sweep count.
inline double optimal_return(const Environment& env, int horizon = 1000) {
  const auto states = reachable_states(env);
  std::map<StateIndex, double> v;
  for (StateIndex s : states) v[s] = 0.0;
  for (int it = 0; it < horizon; ++it) {
    std::map<StateIndex, double> nv = v;
    for (StateIndex s : states) {
      if (env.terminal(s)) continue;
      double best = -1e300;
      for (std::uint32_t a = 0; a < env.actions().size(); ++a) {
        const StepOutcome o = env.transition(s, a);
        const double cont = o.done ? 0.0 : v[o.next];
        best = std::max(best, o.reward + cont);
      }
      nv[s] = best;
    }
    v.swap(nv);
  }
  return v[env.start()];
}

}  // namespace pac::testing

#endif  // PAC_TESTS_TEST_UTIL_HPP_
