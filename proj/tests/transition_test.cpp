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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <thread>

#include "test_util.hpp"

namespace pac {
namespace {

using testing::kThreeGrid;
using testing::naive_successor;

TransitionSystem ground_text(std::string_view text) { return ground(parse_domain(text)); }

// Every total valuation of the description's fluents.
std::vector<GroundState> all_states(const TransitionSystem& ts) {
  std::vector<GroundState> out;
  std::vector<std::uint32_t> v(ts.num_fluents(), 0);
  while (true) {
    out.emplace_back(v);
    std::size_t i = 0;
    for (; i < v.size(); ++i) {
      if (++v[i] < ts.description().fluents[i].domain.size()) break;
      v[i] = 0;
    }
    if (i == v.size()) return out;
  }
}

// Independent grounder: counts (law, binding) pairs whose atoms all land in
// their fluent domains.
std::size_t brute_force_dynamic_count(const ActionDescription& d) {
  std::size_t n = 0;
  for (const DynamicLaw& law : d.dynamics) {
    for_each_binding(law.params, [&](const Binding& b) {
      bool ok = true;
      std::vector<const Atom*> atoms{&law.effect};
      for (const auto& c : law.conditions) atoms.push_back(&c);
      for (const Atom* a : atoms) {
        const auto v = evaluate(a->value, b);
        const auto& dom = d.find_fluent(a->fluent)->domain;
        ok = ok && v && std::find(dom.begin(), dom.end(), *v) != dom.end();
      }
      n += ok;
      return true;
    });
  }
  return n;
}

GroundState loc(const TransitionSystem& ts, std::int64_t l) { return ts.make_state({{"loc", l}}); }

TEST(Ground, ThreeGridClipsBoundaryBindings) {
  const TransitionSystem ts = ground_text(kThreeGrid);
  // By hand: 2 actions x 3 bindings, minus moveleft at 1 and moveright at 3.
  EXPECT_EQ(ts.dynamic_laws().size(), 4u);
  EXPECT_EQ(ts.static_laws().size(), 0u);
  EXPECT_EQ(ts.ground_law_count(), brute_force_dynamic_count(ts.description()));
}

TEST(Ground, NoLaws) {
  const TransitionSystem ts = ground_text("fluent a : 1..2 .\naction go .\n");
  EXPECT_EQ(ts.ground_law_count(), 0u);
}

TEST(Ground, FourRoomsMatchesBruteForceAndLegalMoves) {
  const auto env = make_environment("fourrooms");
  const TransitionSystem ts = ground_text(env->domain_text());
  EXPECT_EQ(ts.dynamic_laws().size(), brute_force_dynamic_count(ts.description()));

  // Blocked moves are not encoded, so the count is the number of legal
  // (cell, direction) moves rather than 4 x cells.
  const auto& fr = static_cast<const FourRooms&>(*env);
  std::size_t legal = 0;
  for (StateIndex s = 0; s < fr.num_states(); ++s) {
    for (std::uint32_t a = 0; a < 4; ++a) legal += !(fr.move(fr.cell(s), a) == fr.cell(s));
  }
  EXPECT_EQ(ts.dynamic_laws().size(), legal);
}

TEST(Ground, CapThrows) {
  GroundingOptions tight;
  tight.max_ground_laws = 3;
  EXPECT_THROW(ground(parse_domain(kThreeGrid), tight), GroundingError);
}

TEST(Holds, Basics) {
  const TransitionSystem ts = ground_text(kThreeGrid);
  const GroundState s = loc(ts, 1);
  const auto at1 = ts.ground_atom("loc", std::int64_t{1}).value();
  const auto at2 = ts.ground_atom("loc", std::int64_t{2}).value();
  EXPECT_TRUE(holds(s, std::vector<GroundAtom>{at1}));
  EXPECT_TRUE(holds(s, std::vector<GroundAtom>{}));
  EXPECT_FALSE(holds(s, std::vector<GroundAtom>{at2}));
}

TEST(StaticClosure, IdentityWithoutStatics) {
  const TransitionSystem ts = ground_text(kThreeGrid);
  const ClosureResult r = static_closure(ts, PartialValuation{1u});
  ASSERT_EQ(r.status, ClosureStatus::ok);
  EXPECT_EQ(r.state, GroundState({1u}));
}

TEST(StaticClosure, OneStepDerivation) {
  const TransitionSystem ts = ground_text(
      "fluent a : 0..1 .\nfluent b : 0..1 .\nb = 1 if a = 1 .\n");
  const ClosureResult r = static_closure(ts, PartialValuation{1u, std::nullopt});
  ASSERT_EQ(r.status, ClosureStatus::ok);
  EXPECT_EQ(r.state, GroundState({1u, 1u}));
}

TEST(StaticClosure, ConflictIsInconsistent) {
  const TransitionSystem ts = ground_text(
      "fluent a : 0..2 .\nfluent b : 0..2 .\nb = 1 if a = 1 .\nb = 2 if a = 1 .\n");
  EXPECT_EQ(static_closure(ts, PartialValuation{1u, std::nullopt}).status,
            ClosureStatus::inconsistent);
}

TEST(StaticClosure, UnassignedIsUnderdetermined) {
  const TransitionSystem ts = ground_text(
      "fluent a : 0..1 .\nfluent b : 0..1 .\nb = 1 if a = 1 .\n");
  const ClosureResult r = static_closure(ts, PartialValuation{0u, std::nullopt});
  EXPECT_EQ(r.status, ClosureStatus::underdetermined);
  EXPECT_EQ(r.fluent, 1u);
}

TEST(StaticClosure, ChainsToFixpointAndIsIdempotent) {
  const TransitionSystem ts = ground_text(
      "fluent a : 0..1 .\nfluent b : 0..1 .\nfluent c : 0..1 .\n"
      "c = 1 if b = 1 .\nb = 1 if a = 1 .\n");
  const ClosureResult r = static_closure(ts, PartialValuation{1u, std::nullopt, std::nullopt});
  ASSERT_EQ(r.status, ClosureStatus::ok);
  EXPECT_EQ(r.state, GroundState({1u, 1u, 1u}));
  PartialValuation again;
  for (auto v : r.state.values()) again.push_back(v);
  EXPECT_EQ(static_closure(ts, again).state, r.state);
}

TEST(Successor, ThreeGridExamples) {
  const TransitionSystem ts = ground_text(kThreeGrid);
  const ActionId left = ts.action_id("moveleft").value();
  const ActionId right = ts.action_id("moveright").value();
  const SuccessorResult r = successor(ts, loc(ts, 1), right);
  ASSERT_EQ(r.status, StepStatus::ok);
  EXPECT_EQ(r.state, loc(ts, 2));
  EXPECT_EQ(successor(ts, loc(ts, 1), left).status, StepStatus::inapplicable);
}

TEST(Successor, ActionWithoutLawsIsInapplicable) {
  const TransitionSystem ts = ground_text("fluent a : 0..1 .\naction wait .\naction set .\n"
                                          "set causes a = 1 if a = 0 .\n");
  for (std::uint32_t v = 0; v < 2; ++v) {
    EXPECT_EQ(successor(ts, GroundState({v}), 0).status, StepStatus::inapplicable);
  }
}

TEST(Successor, ConflictingEffectsAreInconsistent) {
  const TransitionSystem ts = ground_text(
      "fluent a : 0..2 .\naction go .\ngo causes a = 1 if a = 0 .\ngo causes a = 2 if a = 0 .\n");
  EXPECT_EQ(successor(ts, GroundState({0u}), 0).status, StepStatus::inconsistent);
}

TEST(Successor, InertiaKeepsUntouchedFluents) {
  const TransitionSystem ts = ground_text(
      "fluent x : 0..2 .\nfluent y : 0..2 .\naction inc .\n"
      "inc causes x = X+1 if x = X where X in 0..2 .\n");
  for (std::uint32_t y = 0; y < 3; ++y) {
    const SuccessorResult r = successor(ts, GroundState({0u, y}), 0);
    ASSERT_EQ(r.status, StepStatus::ok);
    EXPECT_EQ(r.state, GroundState({1u, y}));
  }
}

TEST(Successor, StaticsApplyAfterEffects) {
  const TransitionSystem ts = ground_text(
      "fluent sw : {off, on} .\nfluent lit : {no, yes} .\naction flip .\n"
      "lit = yes if sw = on .\nlit = no if sw = off .\n"
      "flip causes sw = on if sw = off .\nflip causes sw = off if sw = on .\n");
  const SuccessorResult r = successor(ts, GroundState({0u, 0u}), 0);
  ASSERT_EQ(r.status, StepStatus::ok);
  EXPECT_EQ(r.state, GroundState({1u, 1u}));
}

void expect_matches_naive(const TransitionSystem& ts, const std::string& label) {
  const auto states = all_states(ts);
  ASSERT_LE(states.size(), 10000u) << label;
  std::size_t mismatches = 0;
  for (const auto& s : states) {
    for (ActionId a = 0; a < ts.num_actions(); ++a) {
      const SuccessorResult fast = successor(ts, s, a);
      const auto slow = naive_successor(ts, s, a);
      const bool same = fast.status == StepStatus::ok ? slow && *slow == fast.state : !slow;
      mismatches += !same;
      const SuccessorId id = ts.successor_id(ts.intern(s), a);
      EXPECT_EQ(id.status, fast.status);
      if (fast.status == StepStatus::ok) EXPECT_EQ(ts.state(id.state), fast.state);
    }
  }
  EXPECT_EQ(mismatches, 0u) << label;
}

TEST(SuccessorOracle, ShippedEncodingsMatchNaiveInterpreter) {
  for (const char* name : {"threegrid", "fourrooms", "taxi"}) {
    const TransitionSystem ts = ground_text(make_environment(name)->domain_text());
    expect_matches_naive(ts, name);
  }
}

TEST(SuccessorOracle, RandomDomainsMatchNaiveInterpreter) {
  std::mt19937_64 rng(11);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::ostringstream os;
    const int nf = pick(1, 3);
    for (int f = 0; f < nf; ++f) os << "fluent f" << f << " : 0.." << pick(1, 3) << " .\n";
    const int na = pick(1, 3);
    for (int a = 0; a < na; ++a) os << "action a" << a << " .\n";
    for (int i = pick(1, 6); i > 0; --i) {
      const int f = pick(0, nf - 1), g = pick(0, nf - 1);
      if (pick(0, 3) == 0) {
        os << "f" << f << " = " << pick(0, 1) << " if f" << g << " = " << pick(0, 1) << " .\n";
      } else if (pick(0, 1)) {
        os << "a" << pick(0, na - 1) << " causes f" << f << " = X+1 if f" << f
           << " = X where X in 0..3 .\n";
      } else {
        os << "a" << pick(0, na - 1) << " causes f" << f << " = " << pick(0, 1) << " if f" << g
           << " = " << pick(0, 1) << " .\n";
      }
    }
    ActionDescription d;
    try {
      d = parse_domain(os.str());
    } catch (const ParseError&) {
      continue;  // vacuous laws
    }
    expect_matches_naive(ground(d), os.str());
    ++checked;
  }
  EXPECT_GT(checked, 30);
}

TEST(Successor, Deterministic) {
  const TransitionSystem ts = ground_text(make_environment("taxi")->domain_text());
  for (const auto& s : all_states(ts)) {
    for (ActionId a = 0; a < ts.num_actions(); ++a) {
      const auto r1 = successor(ts, s, a);
      const auto r2 = successor(ts, s, a);
      EXPECT_EQ(r1.status, r2.status);
      EXPECT_EQ(r1.state, r2.state);
    }
  }
}

TEST(StateCodec, ConcurrentInterningYieldsOneIdPerState) {
  const TransitionSystem ts = ground_text(make_environment("fourrooms")->domain_text());
  const auto states = all_states(ts);
  std::vector<std::vector<StateId>> ids(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      std::vector<GroundState> order = states;
      std::shuffle(order.begin(), order.end(), std::mt19937_64(t));
      std::map<std::vector<std::uint32_t>, StateId> mine;
      for (const auto& s : order) mine[s.values()] = ts.intern(s);
      for (const auto& s : states) ids[t].push_back(mine[s.values()]);
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 1; t < 4; ++t) EXPECT_EQ(ids[t], ids[0]);
  EXPECT_EQ(ts.known_states(), states.size());
  std::set<StateId> distinct(ids[0].begin(), ids[0].end());
  EXPECT_EQ(distinct.size(), states.size());
  for (std::size_t i = 0; i < states.size(); ++i) EXPECT_EQ(ts.state(ids[0][i]), states[i]);
}

TEST(InitialState, FromQuery) {
  const TransitionSystem ts = ground_text(kThreeGrid);
  const Query q = parse_query("init loc = 2 . goal loc = 3 .", ts.description());
  const ClosureResult r = initial_state(ts, q);
  ASSERT_EQ(r.status, ClosureStatus::ok);
  EXPECT_EQ(r.state, loc(ts, 2));
  EXPECT_EQ(ts.describe(r.state), "loc=2");
}

TEST(InitialState, PartialInitIsUnderdetermined) {
  const TransitionSystem ts = ground_text("fluent a : 0..1 .\nfluent b : 0..1 .\naction go .\n"
                                          "go causes a = 1 if a = 0 .\n");
  const Query q = parse_query("init a = 0 . goal a = 1 .", ts.description());
  EXPECT_EQ(initial_state(ts, q).status, ClosureStatus::underdetermined);
}

}  // namespace
}  // namespace pac
