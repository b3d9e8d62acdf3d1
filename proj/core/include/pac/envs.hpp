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

// Deterministic gridworld simulators and their causal-law encodings.
//
// Environments are immutable: transition(s, a) is a pure function and
// episodes are driven through EpisodeRunner. The action order of every
// environment equals the action declaration order of its encoding, so action
// indices are shared with the transition system.
//
// Layout files start with a header line naming the format:
//
//   layout cells v1     one character per cell:
//                       '#' wall, '.' free, 'R' red, 'S' start, 'G' goal
//   layout edges v1     a (2h-1) x (2w-1) character grid; cells sit at even
//                       (row, col) positions ('.' free, 'S' start,
//                       'P' passenger, 'D' destination, 'C' congested,
//                       'M' the pickup spot a misinformed teacher believes in);
//                       a '#' between two cells is a wall on that edge
//
// Lines after the grid starting with '%' are comments.

#ifndef PAC_ENVS_HPP_
#define PAC_ENVS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pac/action_lang.hpp"
#include "pac/feedback.hpp"

namespace pac {

using StateIndex = std::uint32_t;

struct StepOutcome {
  StateIndex next = 0;
  double reward = 0.0;
  bool done = false;

  bool operator==(const StepOutcome&) const = default;
};

struct Cell {
  int row = 0;
  int col = 0;

  auto operator<=>(const Cell&) const = default;
};

struct LayoutInfo {
  std::string name;
  int version = 1;
  std::string hash;  // FNV-1a 64 of the layout text, hex

  bool operator==(const LayoutInfo&) const = default;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t num_states() const = 0;
  virtual StateIndex start() const = 0;
  virtual const std::vector<std::string>& actions() const = 0;
  virtual StepOutcome transition(StateIndex s, std::uint32_t a) const = 0;
  virtual bool terminal(StateIndex s) const = 0;

  // Causal-law encoding; rewards live only in the environment.
  virtual std::string domain_text() const = 0;
  virtual std::string query_text() const = 0;
  // Fluent valuation of s in the encoding's vocabulary.
  virtual std::vector<std::pair<std::string, Value>> valuation(StateIndex s) const = 0;

  // Preferred feedback sign of a simulated teacher (+1/-1); throws for
  // Scenario::none.
  virtual int preferred_sign(Scenario scenario, StateIndex s, std::uint32_t a) const = 0;

  virtual std::set<double> reward_set() const = 0;
  virtual LayoutInfo layout() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// States reachable from start; terminal states are included but not
// expanded. Sorted.
std::vector<StateIndex> reachable_states(const Environment& env);

// Oracle over every (reachable non-terminal state, action) pair.
ScenarioOracle make_oracle(const Environment& env, Scenario scenario);

class EpisodeRunner {
 public:
  explicit EpisodeRunner(const Environment& env) : env_(env), state_(env.start()) {}

  StateIndex reset();
  // Throws std::logic_error once the episode is done.
  StepOutcome step(std::uint32_t a);
  bool done() const { return done_; }
  StateIndex state() const { return state_; }

 private:
  const Environment& env_;
  StateIndex state_;
  bool done_ = false;
};

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FourRoomsRewards {
  double step = -1.0;
  double goal = 5.0;
  double red = -10.0;
};

class FourRooms : public Environment {
 public:
  // Parses a `layout cells v1` map. Throws LayoutError.
  static FourRooms from_text(std::string_view text, std::string name = "fourrooms");
  static FourRooms canonical();

  std::string_view name() const override { return "fourrooms"; }
  std::size_t num_states() const override { return cells_.size(); }
  StateIndex start() const override { return index_of(start_); }
  const std::vector<std::string>& actions() const override;
  StepOutcome transition(StateIndex s, std::uint32_t a) const override;
  bool terminal(StateIndex s) const override { return cells_[s] == goal_; }
  std::string domain_text() const override;
  std::string query_text() const override;
  std::vector<std::pair<std::string, Value>> valuation(StateIndex s) const override;
  int preferred_sign(Scenario scenario, StateIndex s, std::uint32_t a) const override;
  std::set<double> reward_set() const override;
  LayoutInfo layout() const override { return layout_; }
  std::unique_ptr<Environment> clone() const override;

  int height() const { return height_; }
  int width() const { return width_; }
  Cell cell(StateIndex s) const { return cells_[s]; }
  StateIndex index_of(Cell c) const;
  bool free(Cell c) const;
  bool red(Cell c) const { return red_.count(c) > 0; }
  Cell goal() const { return goal_; }
  const std::set<Cell>& red_cells() const { return red_; }
  // Cell reached by action a from c (c itself when blocked).
  Cell move(Cell c, std::uint32_t a) const;

 private:
  FourRooms() = default;
  void prepare();

  int height_ = 0;
  int width_ = 0;
  std::vector<std::string> grid_;
  std::vector<Cell> cells_;
  std::vector<int> index_;  // row-major cell -> state or -1
  std::set<Cell> red_;
  Cell start_;
  Cell goal_;
  FourRoomsRewards rewards_;
  LayoutInfo layout_;
  std::vector<int> safe_dist_;  // weighted distance to goal, red entries costly
  std::vector<int> red_dist_;   // moves to the nearest red cell
};

enum class Passenger : std::uint32_t { waiting = 0, intaxi = 1, delivered = 2 };

struct TaxiRewards {
  double step = -1.0;
  double dropoff = 20.0;
  double improper = -10.0;
};

class Taxi : public Environment {
 public:
  // Parses a `layout edges v1` map. Throws LayoutError.
  static Taxi from_text(std::string_view text, std::string name = "taxi");
  static Taxi canonical();

  std::string_view name() const override { return "taxi"; }
  std::size_t num_states() const override {
    return static_cast<std::size_t>(height_ * width_) * 3;
  }
  StateIndex start() const override { return index_of(start_, Passenger::waiting); }
  const std::vector<std::string>& actions() const override;
  StepOutcome transition(StateIndex s, std::uint32_t a) const override;
  bool terminal(StateIndex s) const override { return passenger(s) == Passenger::delivered; }
  std::string domain_text() const override;
  std::string query_text() const override;
  std::vector<std::pair<std::string, Value>> valuation(StateIndex s) const override;
  int preferred_sign(Scenario scenario, StateIndex s, std::uint32_t a) const override;
  std::set<double> reward_set() const override;
  LayoutInfo layout() const override { return layout_; }
  std::unique_ptr<Environment> clone() const override;

  int height() const { return height_; }
  int width() const { return width_; }
  StateIndex index_of(Cell c, Passenger p) const;
  Cell cell(StateIndex s) const;
  Passenger passenger(StateIndex s) const { return static_cast<Passenger>(s % 3); }
  Cell passenger_cell() const { return pickup_; }
  Cell destination() const { return dropoff_; }
  std::optional<Cell> misinformed_pickup() const { return misinformed_; }
  const std::set<Cell>& congested() const { return congested_; }
  bool blocked(Cell c, std::uint32_t move) const;
  Cell move(Cell c, std::uint32_t a) const;

 private:
  Taxi() = default;
  void prepare();
  std::vector<int> distances_to(Cell target, bool avoid_congestion) const;

  int height_ = 0;
  int width_ = 0;
  std::set<std::pair<Cell, Cell>> walls_;  // unordered edges stored both ways
  Cell start_;
  Cell pickup_;
  Cell dropoff_;
  std::optional<Cell> misinformed_;
  std::set<Cell> congested_;
  TaxiRewards rewards_;
  LayoutInfo layout_;
  // Helpful routes avoid congested cells; misleading ones ignore them.
  std::vector<int> to_pickup_;
  std::vector<int> to_dropoff_;
  std::vector<int> to_misinformed_;
  std::vector<int> to_dropoff_direct_;
};

// 1x3 corridor: loc 1..3, start 1, goal 3 (+5, terminal), every other step -1.
class ThreeGrid : public Environment {
 public:
  std::string_view name() const override { return "threegrid"; }
  std::size_t num_states() const override { return 3; }
  StateIndex start() const override { return 0; }
  const std::vector<std::string>& actions() const override;
  StepOutcome transition(StateIndex s, std::uint32_t a) const override;
  bool terminal(StateIndex s) const override { return s == 2; }
  std::string domain_text() const override;
  std::string query_text() const override;
  std::vector<std::pair<std::string, Value>> valuation(StateIndex s) const override;
  int preferred_sign(Scenario scenario, StateIndex s, std::uint32_t a) const override;
  std::set<double> reward_set() const override { return {-1.0, 5.0}; }
  LayoutInfo layout() const override;
  std::unique_ptr<Environment> clone() const override;
};

// Canonical layout texts (identical to data/layouts/*.txt).
std::string_view canonical_fourrooms_layout();
std::string_view canonical_taxi_layout();

std::string fnv1a_hex(std::string_view text);

// "fourrooms", "taxi" or "threegrid"; a non-empty layout path replaces the
// canonical map. Throws std::invalid_argument for unknown names and
// LayoutError for bad layouts.
std::unique_ptr<Environment> make_environment(std::string_view domain,
                                              const std::string& layout_path = {});

}  // namespace pac

#endif  // PAC_ENVS_HPP_
