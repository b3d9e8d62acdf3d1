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

// Tabular softmax actor and tabular critic.
//
// Rows are indexed by the transition codec's state ids and grow on demand,
// so a learner never needs the full state space up front.

#ifndef PAC_RL_CORE_HPP_
#define PAC_RL_CORE_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pac {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw. Used instead of
// std::uniform_real_distribution so streams are identical across standard
// libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Hyperparams {
  double alpha = 0.1;   // critic step size
  double beta = 0.05;   // actor step size
  double gamma = 0.95;  // discount

  bool operator==(const Hyperparams&) const = default;
};

class PolicyParams {
 public:
  PolicyParams(std::size_t num_actions, double beta);

  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_states() const { return theta_.size() / num_actions_; }
  double beta() const { return beta_; }

  // Row for state s (zero row if s has never been touched).
  std::vector<double> row(std::uint32_t s) const;
  double& at(std::uint32_t s, std::size_t a);
  double get(std::uint32_t s, std::size_t a) const;
  const std::vector<double>& table() const { return theta_; }

 private:
  void ensure(std::uint32_t s);

  std::size_t num_actions_;
  double beta_;
  std::vector<double> theta_;
};

class ValueParams {
 public:
  ValueParams(double alpha, double gamma);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double get(std::uint32_t s) const { return s < x_.size() ? x_[s] : 0.0; }
  double& at(std::uint32_t s);
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& table() const { return x_; }

 private:
  double alpha_;
  double gamma_;
  std::vector<double> x_;
};

struct StepSample {
  std::uint32_t s = 0;
  std::uint32_t a = 0;
  double r = 0.0;
  std::uint32_t s_next = 0;
  bool done = false;
};

enum class SignalSource { td, human };

struct AdvantageSignal {
  double value = 0.0;
  SignalSource source = SignalSource::td;
};

// Max-shifted softmax of a row.
std::vector<double> softmax(std::span<const double> row);
std::vector<double> policy_probs(const PolicyParams& p, std::uint32_t s);

// r + gamma * x[s_next] * (1 - done) - x[s], using x before any update.
AdvantageSignal td_error(const ValueParams& v, const StepSample& step);

void update_value(ValueParams& v, std::uint32_t s, double delta);

// theta[s,b] += beta * signal * (1{a=b} - pi(b|s)). Source does not matter.
void update_policy(PolicyParams& p, std::uint32_t s, std::uint32_t a, const AdvantageSignal& signal);

// d log pi(a|s) / d theta[s,b] for every b.
std::vector<double> grad_log_softmax(std::span<const double> row, std::size_t a);

// Inverse-CDF draw; the last positive-probability action absorbs rounding.
std::size_t sample_action(std::span<const double> probs, Rng& rng);

// JSON checkpoint; state-id order follows the codec. `state_names` is
// informational and may be empty.
std::string save_checkpoint(const PolicyParams& p, const ValueParams& v, const Hyperparams& h,
                            const std::vector<std::string>& action_names,
                            const std::vector<std::string>& state_names);

struct Checkpoint {
  Hyperparams hyper;
  std::vector<std::string> actions;
  std::vector<std::string> states;
  PolicyParams policy{1, 0.05};
  ValueParams value{0.1, 0.95};
};

// Throws std::invalid_argument on malformed input or version mismatch.
Checkpoint load_checkpoint(const std::string& text);

}  // namespace pac

#endif  // PAC_RL_CORE_HPP_
