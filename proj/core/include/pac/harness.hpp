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

// Experiment runner: PACMAN, the planner-free actor-critic ablation and a
// feedback-shaped Q-learning baseline, aggregated over seeds.

#ifndef PAC_HARNESS_HPP_
#define PAC_HARNESS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pac/envs.hpp"
#include "pac/feedback.hpp"
#include "pac/planner.hpp"
#include "pac/rl_core.hpp"
#include "pac/transition.hpp"

namespace pac {

enum class AgentKind { pacman, ac, qshape };

std::string_view to_string(AgentKind k);
std::optional<AgentKind> parse_agent(std::string_view name);

struct ExperimentConfig {
  std::string domain = "fourrooms";
  std::string layout;  // empty: canonical map
  AgentKind agent = AgentKind::pacman;
  Scenario scenario = Scenario::none;
  NoiseRegime noise = NoiseRegime::ideal;
  int episodes = 500;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Hyperparams hyper;
  PlannerConfig planner;
  int episode_cap = 500;
  double q_alpha = 0.1;
  double q_epsilon = 0.1;
  double shaping_weight = 1.0;
  double feedback_magnitude = 1.0;
  int jobs = 1;

  int runs() const { return static_cast<int>(seeds.size()); }
  bool operator==(const ExperimentConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Consecutive seeds s0, s0+1, ..., s0+runs-1.
std::vector<std::uint64_t> seed_range(std::uint64_t s0, int runs);

// Throws ConfigError listing every problem.
void validate(const ExperimentConfig& cfg);

// Applies `key = value` lines ('#' starts a comment). Throws ConfigError
// with the offending line number.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);
// Applies one key; throws ConfigError for unknown keys or bad values.
void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

struct EpisodeRecord {
  int episode = 0;
  double ret = 0.0;  // undiscounted
  int steps = 0;
  int plan_length = 0;  // action steps of the episode's plan (pacman)
  int feedback_count = 0;
  bool no_plan = false;

  bool operator==(const EpisodeRecord&) const = default;
};

struct CurveSummary {
  std::vector<double> mean;
  std::vector<double> variance;  // population variance across runs
};

// Throws std::invalid_argument for ragged input.
CurveSummary aggregate(const std::vector<std::vector<EpisodeRecord>>& runs);

// One executed step whose policy update is still pending.
struct PendingStep {
  std::uint64_t step = 0;  // 1-based, counted over the agent's lifetime
  int episode = 0;         // 0-based
  StateIndex state = 0;
  std::uint32_t action = 0;
  double reward = 0.0;
  StateIndex next = 0;
  bool done = false;
  double delta = 0.0;  // TD error before the value update
};

// Maps transition-system state ids to environment states.
class StateBridge {
 public:
  StateBridge(const Environment& env, const TransitionSystem& ts);
  StateIndex to_env(StateId id) const;
  StateId to_ts(StateIndex s) const;

 private:
  const Environment& env_;
  const TransitionSystem& ts_;
  std::unordered_map<GroundState, StateIndex, GroundStateHash> by_state_;
  mutable std::vector<std::int64_t> cache_;
};

// One learner bound to one environment and one seed. An episode is
// begin_episode, then execute_step / finalize_step pairs while
// episode_active, then end_episode. finalize_step applies the policy
// update, with `feedback` (when present) in place of the TD error.
class Agent {
 public:
  Agent(const ExperimentConfig& cfg, std::unique_ptr<Environment> env, std::uint64_t seed);
  ~Agent();
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  // Returns false when PACMAN finds no plan; the episode is then empty.
  bool begin_episode();
  bool episode_active() const;
  PendingStep execute_step();
  void finalize_step(const PendingStep& p, std::optional<FeedbackValue> feedback);
  EpisodeRecord end_episode();

  // Scenario oracle passed through the noise model; absent for scenario none.
  std::optional<FeedbackValue> simulated_feedback(const PendingStep& p);

  // Runs `episodes` full episodes with simulated feedback.
  std::vector<EpisodeRecord> run(int episodes);

  const Environment& env() const { return *env_; }
  const TransitionSystem& transition_system() const { return *ts_; }
  const PolicyParams& policy() const { return policy_; }
  const ValueParams& value() const { return value_; }
  const std::vector<double>& q_table() const { return q_; }
  const ExperimentConfig& config() const { return cfg_; }
  int episode() const { return episode_; }
  StateIndex state() const { return runner_.state(); }
  // Plan actions not yet executed (pacman).
  std::vector<std::string> remaining_plan() const;
  const std::optional<Plan>& current_plan() const { return plan_; }

 private:
  std::uint32_t choose_action();
  double q(StateIndex s, std::uint32_t a) const;
  double& q_at(StateIndex s, std::uint32_t a);

  ExperimentConfig cfg_;
  std::unique_ptr<Environment> env_;
  std::unique_ptr<TransitionSystem> ts_;
  Query query_;
  std::unique_ptr<StateBridge> bridge_;
  std::optional<ScenarioOracle> oracle_;
  FeedbackModel model_;
  Rng rng_;
  Rng feedback_rng_;
  PolicyParams policy_;
  ValueParams value_;
  std::vector<double> q_;
  EpisodeRunner runner_;

  int episode_ = 0;
  std::uint64_t step_ = 0;
  bool active_ = false;
  std::optional<Plan> plan_;
  std::vector<std::pair<StateId, ActionId>> plan_steps_;
  std::size_t plan_pos_ = 0;
  EpisodeRecord record_;
};

std::vector<EpisodeRecord> run_pacman(const ExperimentConfig& cfg, std::uint64_t seed);
std::vector<EpisodeRecord> run_ac_feedback(const ExperimentConfig& cfg, std::uint64_t seed);
std::vector<EpisodeRecord> run_q_shaping(const ExperimentConfig& cfg, std::uint64_t seed);

struct ExperimentResult {
  std::vector<std::vector<EpisodeRecord>> runs;  // in seed order
  CurveSummary summary;
};

// Runs every seed (cfg.jobs in parallel) and aggregates.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes curve.csv, records.csv and manifest.json into `dir`.
void export_results(const ExperimentConfig& cfg, const ExperimentResult& result,
                    const std::string& dir);

std::string curve_csv(const ExperimentResult& result);
std::string records_csv(const ExperimentResult& result);
std::string manifest_json(const ExperimentConfig& cfg);
// Inverse of manifest_json; throws ConfigError.
ExperimentConfig parse_manifest(std::string_view text);

std::string code_version();

}  // namespace pac

#endif  // PAC_HARNESS_HPP_
