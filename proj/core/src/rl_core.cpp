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

#include "pac/rl_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pac {

namespace {
constexpr const char* kCheckpointFormat = "pac-learner";
constexpr int kCheckpointVersion = 1;
}  // namespace

PolicyParams::PolicyParams(std::size_t num_actions, double beta)
    : num_actions_(num_actions), beta_(beta) {
  if (num_actions == 0) throw std::invalid_argument("policy needs at least one action");
}

void PolicyParams::ensure(std::uint32_t s) {
  const std::size_t need = (static_cast<std::size_t>(s) + 1) * num_actions_;
  if (theta_.size() < need) theta_.resize(need, 0.0);
}

std::vector<double> PolicyParams::row(std::uint32_t s) const {
  const std::size_t begin = static_cast<std::size_t>(s) * num_actions_;
  if (begin >= theta_.size()) return std::vector<double>(num_actions_, 0.0);
  return {theta_.begin() + begin, theta_.begin() + begin + num_actions_};
}

double& PolicyParams::at(std::uint32_t s, std::size_t a) {
  ensure(s);
  return theta_[static_cast<std::size_t>(s) * num_actions_ + a];
}

double PolicyParams::get(std::uint32_t s, std::size_t a) const {
  const std::size_t k = static_cast<std::size_t>(s) * num_actions_ + a;
  return k < theta_.size() ? theta_[k] : 0.0;
}

ValueParams::ValueParams(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {}

double& ValueParams::at(std::uint32_t s) {
  if (s >= x_.size()) x_.resize(static_cast<std::size_t>(s) + 1, 0.0);
  return x_[s];
}

std::vector<double> softmax(std::span<const double> row) {
  std::vector<double> out(row.size());
  if (row.empty()) return out;
  const double m = *std::max_element(row.begin(), row.end());
  double z = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    out[i] = std::exp(row[i] - m);
    z += out[i];
  }
  for (auto& p : out) p /= z;
  return out;
}

std::vector<double> policy_probs(const PolicyParams& p, std::uint32_t s) {
  const auto r = p.row(s);
  return softmax(r);
}

AdvantageSignal td_error(const ValueParams& v, const StepSample& step) {
  const double bootstrap = step.done ? 0.0 : v.gamma() * v.get(step.s_next);
  return {step.r + bootstrap - v.get(step.s), SignalSource::td};
}

void update_value(ValueParams& v, std::uint32_t s, double delta) {
  if (delta == 0.0) return;
  v.at(s) += v.alpha() * delta;
}

std::vector<double> grad_log_softmax(std::span<const double> row, std::size_t a) {
  auto g = softmax(row);
  for (auto& x : g) x = -x;
  g[a] += 1.0;
  return g;
}

void update_policy(PolicyParams& p, std::uint32_t s, std::uint32_t a,
                   const AdvantageSignal& signal) {
  if (signal.value == 0.0) return;
  const auto row = p.row(s);
  const auto g = grad_log_softmax(row, a);
  for (std::size_t b = 0; b < g.size(); ++b) {
    p.at(s, b) += p.beta() * signal.value * g[b];
  }
}

std::size_t sample_action(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last;
}

std::string save_checkpoint(const PolicyParams& p, const ValueParams& v, const Hyperparams& h,
                            const std::vector<std::string>& action_names,
                            const std::vector<std::string>& state_names) {
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["actions"] = action_names;
  j["hyperparams"] = {{"alpha", h.alpha}, {"beta", h.beta}, {"gamma", h.gamma}};
  const std::size_t rows = std::max(p.num_states(), v.size());
  nlohmann::json theta = nlohmann::json::array();
  nlohmann::json x = nlohmann::json::array();
  for (std::uint32_t s = 0; s < rows; ++s) {
    theta.push_back(p.row(s));
    x.push_back(v.get(s));
  }
  j["theta"] = std::move(theta);
  j["x"] = std::move(x);
  j["states"] = state_names;
  return j.dump(1);
}

Checkpoint load_checkpoint(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != kCheckpointFormat) throw std::invalid_argument("not a learner checkpoint");
    if (j.at("version") != kCheckpointVersion) {
      throw std::invalid_argument("unsupported checkpoint version " + j.at("version").dump());
    }
    Checkpoint c;
    c.actions = j.at("actions").get<std::vector<std::string>>();
    const auto& hp = j.at("hyperparams");
    c.hyper = {hp.at("alpha").get<double>(), hp.at("beta").get<double>(),
               hp.at("gamma").get<double>()};
    c.states = j.value("states", std::vector<std::string>{});
    c.policy = PolicyParams(c.actions.size(), c.hyper.beta);
    c.value = ValueParams(c.hyper.alpha, c.hyper.gamma);
    const auto& theta = j.at("theta");
    const auto& x = j.at("x");
    if (theta.size() != x.size()) throw std::invalid_argument("theta and x row counts differ");
    for (std::uint32_t s = 0; s < theta.size(); ++s) {
      const auto row = theta[s].get<std::vector<double>>();
      if (row.size() != c.actions.size()) throw std::invalid_argument("theta row width mismatch");
      for (std::size_t a = 0; a < row.size(); ++a) c.policy.at(s, a) = row[a];
      c.value.at(s) = x[s].get<double>();
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace pac
