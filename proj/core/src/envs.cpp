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

#include "pac/envs.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

namespace pac {

namespace {

constexpr std::string_view kFourRoomsLayout = R"(layout cells v1
....#....G
....#.....
..........
....#..RR.
#.###..RR.
..S.#.....
....###.##
..........
....#.....
....#.....
% Four rooms joined by the doors at (2,4), (4,1), (6,7) and (7,4).
% Rows count from the top, columns from the left, both from 0.
)";

constexpr std::string_view kTaxiLayout = R"(layout edges v1
P..#....M
.+.+.+.+.
...#.....
.+.+.+.+.
....S....
.+.+.+.+.
.#...#C..
.+.+.+.+.
.#...#D..
% 5x5 taxi map. Cells sit at even positions; a '#' between two cells is a
% wall on that edge. P passenger, D destination, S taxi start,
% C congested (rush-hour) cell, M where a misinformed teacher thinks the
% passenger waits.
)";

// Cost of entering a cell the helpful teacher wants avoided.
constexpr int kAvoidCost = 1000;
constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

constexpr int kDr[4] = {-1, 1, 0, 0};  // north, south, east, west
constexpr int kDc[4] = {0, 0, 1, -1};
constexpr const char* kMoveNames[4] = {"north", "south", "east", "west"};

struct ParsedLayout {
  std::string format;
  int version = 1;
  std::vector<std::string> rows;
};

ParsedLayout parse_layout(std::string_view text, std::string_view expected_format) {
  std::istringstream in{std::string(text)};
  std::string line;
  ParsedLayout out;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      std::istringstream h(line);
      std::string word, format, version;
      h >> word >> format >> version;
      if (word != "layout" || format.empty() || version.size() < 2 || version[0] != 'v') {
        throw LayoutError("line 1: expected a 'layout <format> v<N>' header");
      }
      out.format = format;
      try {
        out.version = std::stoi(version.substr(1));
      } catch (const std::exception&) {
        throw LayoutError("line 1: bad layout version '" + version + "'");
      }
      if (format != expected_format) {
        throw LayoutError("line 1: expected layout format '" + std::string(expected_format) +
                          "', got '" + format + "'");
      }
      if (out.version != 1) {
        throw LayoutError("line 1: unsupported layout version " + std::to_string(out.version));
      }
      header = true;
      continue;
    }
    if (line.empty() || line[0] == '%') continue;
    if (!out.rows.empty() && line.size() != out.rows.front().size()) {
      throw LayoutError("line " + std::to_string(lineno) + ": row width " +
                        std::to_string(line.size()) + " differs from " +
                        std::to_string(out.rows.front().size()));
    }
    out.rows.push_back(line);
  }
  if (!header) throw LayoutError("empty layout");
  if (out.rows.empty()) throw LayoutError("layout has no rows");
  return out;
}

// Maximal runs [lo, hi] of consecutive integers in a sorted list.
std::vector<std::pair<int, int>> runs(const std::vector<int>& xs) {
  std::vector<std::pair<int, int>> out;
  for (int x : xs) {
    if (!out.empty() && out.back().second + 1 == x) {
      out.back().second = x;
    } else {
      out.emplace_back(x, x);
    }
  }
  return out;
}

// Movement laws for a grid over fluents `row` and `col`. legal(cell, dir)
// says whether the move succeeds.
void emit_move_laws(std::ostream& os, int height, int width,
                    const std::function<bool(Cell, int)>& legal) {
  for (int dir = 0; dir < 4; ++dir) {
    const bool vertical = dir < 2;
    const int lines = vertical ? width : height;
    const int span = vertical ? height : width;
    const char* var = vertical ? "R" : "C";
    const int delta = vertical ? kDr[dir] : kDc[dir];
    const std::string moved = std::string(vertical ? "row" : "col") + " = " + var +
                              (delta > 0 ? "+1" : "-1");
    for (int fixed = 0; fixed < lines; ++fixed) {
      std::vector<int> ok;
      for (int v = 0; v < span; ++v) {
        const Cell c = vertical ? Cell{v, fixed} : Cell{fixed, v};
        if (legal(c, dir)) ok.push_back(v);
      }
      for (auto [lo, hi] : runs(ok)) {
        os << kMoveNames[dir] << " causes ";
        if (lo == hi) {
          const int to = lo + delta;
          if (vertical) {
            os << "row = " << to << " if row = " << lo << ", col = " << fixed << " .\n";
          } else {
            os << "col = " << to << " if row = " << fixed << ", col = " << lo << " .\n";
          }
          continue;
        }
        if (vertical) {
          os << moved << " if row = R, col = " << fixed << " where R in " << lo << ".." << hi
             << " .\n";
        } else {
          os << moved << " if row = " << fixed << ", col = C where C in " << lo << ".." << hi
             << " .\n";
        }
      }
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LayoutError("cannot open layout file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string_view canonical_fourrooms_layout() { return kFourRoomsLayout; }
std::string_view canonical_taxi_layout() { return kTaxiLayout; }

std::vector<StateIndex> reachable_states(const Environment& env) {
  std::vector<bool> seen(env.num_states(), false);
  std::deque<StateIndex> queue{env.start()};
  seen[env.start()] = true;
  std::vector<StateIndex> out;
  while (!queue.empty()) {
    const StateIndex s = queue.front();
    queue.pop_front();
    out.push_back(s);
    if (env.terminal(s)) continue;
    for (std::uint32_t a = 0; a < env.actions().size(); ++a) {
      const StateIndex n = env.transition(s, a).next;
      if (!seen[n]) {
        seen[n] = true;
        queue.push_back(n);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScenarioOracle make_oracle(const Environment& env, Scenario scenario) {
  if (scenario == Scenario::none) throw std::invalid_argument("no oracle for scenario 'none'");
  ScenarioOracle::Table table;
  for (StateIndex s : reachable_states(env)) {
    if (env.terminal(s)) continue;
    for (std::uint32_t a = 0; a < env.actions().size(); ++a) {
      table[{s, a}] = env.preferred_sign(scenario, s, a);
    }
  }
  return ScenarioOracle(scenario, std::move(table));
}

StateIndex EpisodeRunner::reset() {
  state_ = env_.start();
  done_ = false;
  return state_;
}

StepOutcome EpisodeRunner::step(std::uint32_t a) {
  if (done_) throw std::logic_error("step called on a finished episode");
  if (a >= env_.actions().size()) throw std::out_of_range("action index out of range");
  const StepOutcome out = env_.transition(state_, a);
  state_ = out.next;
  done_ = out.done;
  return out;
}

// ---------------------------------------------------------------------------
// Four Rooms

FourRooms FourRooms::from_text(std::string_view text, std::string name) {
  const ParsedLayout parsed = parse_layout(text, "cells");
  FourRooms env;
  env.grid_ = parsed.rows;
  env.height_ = static_cast<int>(parsed.rows.size());
  env.width_ = static_cast<int>(parsed.rows.front().size());
  int starts = 0;
  int goals = 0;
  for (int r = 0; r < env.height_; ++r) {
    for (int c = 0; c < env.width_; ++c) {
      switch (env.grid_[r][c]) {
        case '#':
        case '.':
          break;
        case 'R':
          env.red_.insert({r, c});
          break;
        case 'S':
          env.start_ = {r, c};
          ++starts;
          break;
        case 'G':
          env.goal_ = {r, c};
          ++goals;
          break;
        default:
          throw LayoutError("cell (" + std::to_string(r) + "," + std::to_string(c) +
                            "): unknown character '" + std::string(1, env.grid_[r][c]) + "'");
      }
    }
  }
  if (starts != 1 || goals != 1) throw LayoutError("layout needs exactly one S and one G");
  env.layout_ = {std::move(name), parsed.version, fnv1a_hex(text)};
  env.prepare();
  return env;
}

FourRooms FourRooms::canonical() { return from_text(kFourRoomsLayout); }

void FourRooms::prepare() {
  index_.assign(static_cast<std::size_t>(height_ * width_), -1);
  cells_.clear();
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (grid_[r][c] == '#') continue;
      index_[r * width_ + c] = static_cast<int>(cells_.size());
      cells_.push_back({r, c});
    }
  }
  const std::size_t n = cells_.size();

  // Weighted distance to the goal (Dijkstra on reversed moves).
  safe_dist_.assign(n, kUnreachable);
  using Item = std::pair<int, StateIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  safe_dist_[index_of(goal_)] = 0;
  pq.push({0, index_of(goal_)});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > safe_dist_[u]) continue;
    const int enter = red(cells_[u]) ? kAvoidCost : 1;
    for (int dir = 0; dir < 4; ++dir) {
      const Cell from{cells_[u].row - kDr[dir], cells_[u].col - kDc[dir]};
      if (!free(from) || move(from, static_cast<std::uint32_t>(dir)) != cells_[u]) continue;
      const StateIndex v = index_of(from);
      if (d + enter < safe_dist_[v]) {
        safe_dist_[v] = d + enter;
        pq.push({safe_dist_[v], v});
      }
    }
  }

  // Moves to the nearest red cell.
  red_dist_.assign(n, kUnreachable);
  std::deque<StateIndex> queue;
  for (const Cell& c : red_) {
    red_dist_[index_of(c)] = 0;
    queue.push_back(index_of(c));
  }
  while (!queue.empty()) {
    const StateIndex u = queue.front();
    queue.pop_front();
    for (int dir = 0; dir < 4; ++dir) {
      const Cell from{cells_[u].row - kDr[dir], cells_[u].col - kDc[dir]};
      if (!free(from) || move(from, static_cast<std::uint32_t>(dir)) != cells_[u]) continue;
      const StateIndex v = index_of(from);
      if (red_dist_[v] == kUnreachable) {
        red_dist_[v] = red_dist_[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

const std::vector<std::string>& FourRooms::actions() const {
  static const std::vector<std::string> kActions{"north", "south", "east", "west"};
  return kActions;
}

StateIndex FourRooms::index_of(Cell c) const {
  if (c.row < 0 || c.col < 0 || c.row >= height_ || c.col >= width_ ||
      index_[c.row * width_ + c.col] < 0) {
    throw std::out_of_range("cell (" + std::to_string(c.row) + "," + std::to_string(c.col) +
                            ") is not a free cell");
  }
  return static_cast<StateIndex>(index_[c.row * width_ + c.col]);
}

bool FourRooms::free(Cell c) const {
  return c.row >= 0 && c.col >= 0 && c.row < height_ && c.col < width_ &&
         grid_[c.row][c.col] != '#';
}

Cell FourRooms::move(Cell c, std::uint32_t a) const {
  const Cell n{c.row + kDr[a], c.col + kDc[a]};
  return free(n) ? n : c;
}

StepOutcome FourRooms::transition(StateIndex s, std::uint32_t a) const {
  const Cell n = move(cells_[s], a);
  const StateIndex next = index_of(n);
  if (n == goal_) return {next, rewards_.goal, true};
  if (red(n)) return {next, rewards_.red, false};
  return {next, rewards_.step, false};
}

std::string FourRooms::domain_text() const {
  std::ostringstream os;
  os << "% Four Rooms encoding generated from layout '" << layout_.name << "' (" << layout_.hash
     << ").\n";
  os << "fluent row : 0.." << height_ - 1 << " .\n";
  os << "fluent col : 0.." << width_ - 1 << " .\n";
  for (const auto& a : actions()) os << "action " << a << " .\n";
  emit_move_laws(os, height_, width_, [this](Cell c, int dir) {
    return free(c) && move(c, static_cast<std::uint32_t>(dir)) != c;
  });
  return os.str();
}

std::string FourRooms::query_text() const {
  std::ostringstream os;
  os << "init row = " << start_.row << ", col = " << start_.col << " .\n";
  os << "goal row = " << goal_.row << ", col = " << goal_.col << " .\n";
  return os.str();
}

std::vector<std::pair<std::string, Value>> FourRooms::valuation(StateIndex s) const {
  return {{"row", std::int64_t{cells_[s].row}}, {"col", std::int64_t{cells_[s].col}}};
}

int FourRooms::preferred_sign(Scenario scenario, StateIndex s, std::uint32_t a) const {
  const Cell c = cells_[s];
  const Cell n = move(c, a);
  if (n == c) return -1;
  const StateIndex ns = index_of(n);
  switch (scenario) {
    case Scenario::helpful: {
      const int enter = red(n) ? kAvoidCost : 1;
      return safe_dist_[ns] + enter == safe_dist_[s] ? 1 : -1;
    }
    case Scenario::misleading:
      if (red(c)) return red(n) ? 1 : -1;
      return red_dist_[ns] < red_dist_[s] ? 1 : -1;
    case Scenario::none:
      break;
  }
  throw std::invalid_argument("no preferences for scenario 'none'");
}

std::set<double> FourRooms::reward_set() const {
  return {rewards_.step, rewards_.goal, rewards_.red};
}

std::unique_ptr<Environment> FourRooms::clone() const {
  return std::make_unique<FourRooms>(*this);
}

// ---------------------------------------------------------------------------
// Taxi

Taxi Taxi::from_text(std::string_view text, std::string name) {
  const ParsedLayout parsed = parse_layout(text, "edges");
  const int rows = static_cast<int>(parsed.rows.size());
  const int cols = static_cast<int>(parsed.rows.front().size());
  if (rows % 2 == 0 || cols % 2 == 0) {
    throw LayoutError("edge layouts need an odd number of rows and columns");
  }
  Taxi env;
  env.height_ = (rows + 1) / 2;
  env.width_ = (cols + 1) / 2;
  int starts = 0, pickups = 0, dropoffs = 0, misinformed = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const char ch = parsed.rows[r][c];
      if (r % 2 == 0 && c % 2 == 0) {
        const Cell cell{r / 2, c / 2};
        switch (ch) {
          case '.':
            break;
          case 'S':
            env.start_ = cell;
            ++starts;
            break;
          case 'P':
            env.pickup_ = cell;
            ++pickups;
            break;
          case 'D':
            env.dropoff_ = cell;
            ++dropoffs;
            break;
          case 'C':
            env.congested_.insert(cell);
            break;
          case 'M':
            env.misinformed_ = cell;
            ++misinformed;
            break;
          default:
            throw LayoutError("cell (" + std::to_string(cell.row) + "," +
                              std::to_string(cell.col) + "): unknown character '" +
                              std::string(1, ch) + "'");
        }
      } else if (r % 2 == 0 || c % 2 == 0) {
        if (ch != '#') continue;
        const Cell a = r % 2 == 0 ? Cell{r / 2, (c - 1) / 2} : Cell{(r - 1) / 2, c / 2};
        const Cell b = r % 2 == 0 ? Cell{r / 2, (c + 1) / 2} : Cell{(r + 1) / 2, c / 2};
        env.walls_.insert({a, b});
        env.walls_.insert({b, a});
      }
    }
  }
  if (starts != 1 || pickups != 1 || dropoffs != 1 || misinformed > 1) {
    throw LayoutError("layout needs exactly one S, P and D and at most one M");
  }
  if (env.pickup_ == env.dropoff_) throw LayoutError("passenger and destination coincide");
  env.layout_ = {std::move(name), parsed.version, fnv1a_hex(text)};
  env.prepare();
  return env;
}

Taxi Taxi::canonical() { return from_text(kTaxiLayout); }

const std::vector<std::string>& Taxi::actions() const {
  static const std::vector<std::string> kActions{"north", "south", "east",
                                                 "west",  "pickup", "dropoff"};
  return kActions;
}

StateIndex Taxi::index_of(Cell c, Passenger p) const {
  if (c.row < 0 || c.col < 0 || c.row >= height_ || c.col >= width_) {
    throw std::out_of_range("cell off the taxi map");
  }
  return static_cast<StateIndex>((c.row * width_ + c.col) * 3 + static_cast<int>(p));
}

Cell Taxi::cell(StateIndex s) const {
  const int k = static_cast<int>(s / 3);
  return {k / width_, k % width_};
}

bool Taxi::blocked(Cell c, std::uint32_t dir) const {
  const Cell n{c.row + kDr[dir], c.col + kDc[dir]};
  if (n.row < 0 || n.col < 0 || n.row >= height_ || n.col >= width_) return true;
  return walls_.count({c, n}) > 0;
}

Cell Taxi::move(Cell c, std::uint32_t a) const {
  if (a >= 4 || blocked(c, a)) return c;
  return {c.row + kDr[a], c.col + kDc[a]};
}

std::vector<int> Taxi::distances_to(Cell target, bool avoid_congestion) const {
  const std::size_t n = static_cast<std::size_t>(height_ * width_);
  std::vector<int> dist(n, kUnreachable);
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const int t = target.row * width_ + target.col;
  dist[t] = 0;
  pq.push({0, t});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    const Cell cu{u / width_, u % width_};
    const int enter = avoid_congestion && congested_.count(cu) ? kAvoidCost : 1;
    for (std::uint32_t dir = 0; dir < 4; ++dir) {
      const Cell from{cu.row - kDr[dir], cu.col - kDc[dir]};
      if (from.row < 0 || from.col < 0 || from.row >= height_ || from.col >= width_) continue;
      if (move(from, dir) != cu) continue;
      const int v = from.row * width_ + from.col;
      if (d + enter < dist[v]) {
        dist[v] = d + enter;
        pq.push({dist[v], v});
      }
    }
  }
  return dist;
}

void Taxi::prepare() {
  to_pickup_ = distances_to(pickup_, true);
  to_dropoff_ = distances_to(dropoff_, true);
  to_dropoff_direct_ = distances_to(dropoff_, false);
  if (misinformed_) to_misinformed_ = distances_to(*misinformed_, false);
  for (int v : to_dropoff_direct_) {
    if (v >= kUnreachable) throw LayoutError("taxi map is not connected");
  }
}

StepOutcome Taxi::transition(StateIndex s, std::uint32_t a) const {
  const Cell c = cell(s);
  const Passenger p = passenger(s);
  switch (a) {
    case 4:  // pickup
      if (p == Passenger::waiting && c == pickup_) {
        return {index_of(c, Passenger::intaxi), rewards_.step, false};
      }
      return {s, rewards_.improper, false};
    case 5:  // dropoff
      if (p == Passenger::intaxi && c == dropoff_) {
        return {index_of(c, Passenger::delivered), rewards_.dropoff, true};
      }
      return {s, rewards_.improper, false};
    default:
      return {index_of(move(c, a), p), rewards_.step, false};
  }
}

std::string Taxi::domain_text() const {
  std::ostringstream os;
  os << "% Taxi encoding generated from layout '" << layout_.name << "' (" << layout_.hash
     << ").\n";
  os << "fluent row : 0.." << height_ - 1 << " .\n";
  os << "fluent col : 0.." << width_ - 1 << " .\n";
  os << "fluent passenger : {waiting, intaxi, delivered} .\n";
  for (const auto& a : actions()) os << "action " << a << " .\n";
  emit_move_laws(os, height_, width_, [this](Cell c, int dir) {
    return !blocked(c, static_cast<std::uint32_t>(dir));
  });
  os << "% The taxi must stand on the passenger's cell to pick them up.\n";
  os << "pickup causes passenger = intaxi if row = " << pickup_.row << ", col = " << pickup_.col
     << ", passenger = waiting .\n";
  os << "dropoff causes passenger = delivered if row = " << dropoff_.row
     << ", col = " << dropoff_.col << ", passenger = intaxi .\n";
  return os.str();
}

std::string Taxi::query_text() const {
  std::ostringstream os;
  os << "init row = " << start_.row << ", col = " << start_.col << ", passenger = waiting .\n";
  os << "goal passenger = delivered .\n";
  return os.str();
}

std::vector<std::pair<std::string, Value>> Taxi::valuation(StateIndex s) const {
  static const char* kStatus[3] = {"waiting", "intaxi", "delivered"};
  const Cell c = cell(s);
  return {{"row", std::int64_t{c.row}},
          {"col", std::int64_t{c.col}},
          {"passenger", std::string(kStatus[s % 3])}};
}

int Taxi::preferred_sign(Scenario scenario, StateIndex s, std::uint32_t a) const {
  if (scenario == Scenario::none) throw std::invalid_argument("no preferences for scenario 'none'");
  const Cell c = cell(s);
  const Passenger p = passenger(s);
  if (p == Passenger::delivered) return -1;

  Cell target = dropoff_;
  const std::vector<int>* dist = nullptr;
  const bool helpful = scenario == Scenario::helpful;
  if (p == Passenger::waiting) {
    if (helpful) {
      target = pickup_;
      dist = &to_pickup_;
    } else {
      if (!misinformed_) throw std::invalid_argument("layout has no misinformed pickup cell (M)");
      target = *misinformed_;
      dist = &to_misinformed_;
    }
  } else {
    dist = helpful ? &to_dropoff_ : &to_dropoff_direct_;
  }

  if (a == 4) return p == Passenger::waiting && c == target ? 1 : -1;
  if (a == 5) return p == Passenger::intaxi && c == target ? 1 : -1;
  const Cell n = move(c, a);
  if (n == c) return -1;
  const int enter = helpful && congested_.count(n) ? kAvoidCost : 1;
  const auto& d = *dist;
  return d[n.row * width_ + n.col] + enter == d[c.row * width_ + c.col] ? 1 : -1;
}

std::set<double> Taxi::reward_set() const {
  return {rewards_.step, rewards_.dropoff, rewards_.improper};
}

std::unique_ptr<Environment> Taxi::clone() const { return std::make_unique<Taxi>(*this); }

// ---------------------------------------------------------------------------
// 3-grid

const std::vector<std::string>& ThreeGrid::actions() const {
  static const std::vector<std::string> kActions{"moveleft", "moveright"};
  return kActions;
}

StepOutcome ThreeGrid::transition(StateIndex s, std::uint32_t a) const {
  int next = static_cast<int>(s) + (a == 0 ? -1 : 1);
  next = std::clamp(next, 0, 2);
  if (next == 2) return {2, 5.0, true};
  return {static_cast<StateIndex>(next), -1.0, false};
}

std::string ThreeGrid::domain_text() const {
  return "% 3x1 corridor; cells are numbered 1 to 3 from the left.\n"
         "fluent loc : 1..3 .\n"
         "action moveleft .\n"
         "action moveright .\n"
         "moveleft causes loc = L-1 if loc = L where L in 1..3 .\n"
         "moveright causes loc = L+1 if loc = L where L in 1..3 .\n";
}

std::string ThreeGrid::query_text() const { return "init loc = 1 .\ngoal loc = 3 .\n"; }

std::vector<std::pair<std::string, Value>> ThreeGrid::valuation(StateIndex s) const {
  return {{"loc", std::int64_t{s + 1}}};
}

int ThreeGrid::preferred_sign(Scenario scenario, StateIndex /*s*/, std::uint32_t a) const {
  switch (scenario) {
    case Scenario::helpful:
      return a == 1 ? 1 : -1;
    case Scenario::misleading:
      return a == 0 ? 1 : -1;
    case Scenario::none:
      break;
  }
  throw std::invalid_argument("no preferences for scenario 'none'");
}

LayoutInfo ThreeGrid::layout() const { return {"threegrid", 1, fnv1a_hex(domain_text())}; }

std::unique_ptr<Environment> ThreeGrid::clone() const { return std::make_unique<ThreeGrid>(*this); }

// ---------------------------------------------------------------------------

std::unique_ptr<Environment> make_environment(std::string_view domain,
                                              const std::string& layout_path) {
  const std::string stem =
      layout_path.empty() ? std::string(domain)
                          : std::filesystem::path(layout_path).stem().string();
  if (domain == "fourrooms") {
    if (layout_path.empty()) return std::make_unique<FourRooms>(FourRooms::canonical());
    return std::make_unique<FourRooms>(FourRooms::from_text(read_file(layout_path), stem));
  }
  if (domain == "taxi") {
    if (layout_path.empty()) return std::make_unique<Taxi>(Taxi::canonical());
    return std::make_unique<Taxi>(Taxi::from_text(read_file(layout_path), stem));
  }
  if (domain == "threegrid") {
    if (!layout_path.empty()) throw std::invalid_argument("threegrid takes no layout file");
    return std::make_unique<ThreeGrid>();
  }
  throw std::invalid_argument("unknown domain '" + std::string(domain) + "'");
}

}  // namespace pac
