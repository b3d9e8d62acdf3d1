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

#include "pac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#ifndef PAC_VERSION
#define PAC_VERSION "0.0.0"
#endif

namespace pac {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T out{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad value '" + std::string(text) + "' for '" + std::string(key) + "'");
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string code_version() { return PAC_VERSION; }

std::string_view to_string(AgentKind k) {
  switch (k) {
    case AgentKind::pacman:
      return "pacman";
    case AgentKind::ac:
      return "ac";
    case AgentKind::qshape:
      return "qshape";
  }
  return "?";
}

std::optional<AgentKind> parse_agent(std::string_view name) {
  if (name == "pacman") return AgentKind::pacman;
  if (name == "ac" || name == "ac_feedback") return AgentKind::ac;
  if (name == "qshape" || name == "q_shaping") return AgentKind::qshape;
  return std::nullopt;
}

std::vector<std::uint64_t> seed_range(std::uint64_t s0, int runs) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < runs; ++i) out.push_back(s0 + static_cast<std::uint64_t>(i));
  return out;
}

void validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.domain != "fourrooms" && cfg.domain != "taxi" && cfg.domain != "threegrid") {
    problems.push_back("unknown domain '" + cfg.domain + "'");
  }
  if (cfg.episodes < 0) problems.push_back("episodes must be >= 0");
  if (cfg.seeds.empty()) problems.push_back("runs must be >= 1");
  if (!(cfg.hyper.alpha > 0)) problems.push_back("alpha must be > 0");
  if (!(cfg.hyper.beta > 0)) problems.push_back("beta must be > 0");
  if (!(cfg.hyper.gamma >= 0 && cfg.hyper.gamma < 1)) problems.push_back("gamma must be in [0,1)");
  if (cfg.planner.maxstamp < 1) problems.push_back("maxstamp must be >= 1");
  if (cfg.planner.samples_per_state < 1) problems.push_back("samples_per_state must be >= 1");
  if (cfg.planner.max_plan_actions && *cfg.planner.max_plan_actions < 1) {
    problems.push_back("max_plan_actions must be >= 1");
  }
  if (cfg.episode_cap < 1) problems.push_back("episode_cap must be >= 1");
  if (!(cfg.q_alpha > 0 && cfg.q_alpha <= 1)) problems.push_back("q_alpha must be in (0,1]");
  if (!(cfg.q_epsilon >= 0 && cfg.q_epsilon <= 1)) problems.push_back("q_epsilon must be in [0,1]");
  if (!std::isfinite(cfg.shaping_weight)) problems.push_back("shaping_weight must be finite");
  if (!(cfg.feedback_magnitude > 0) || !std::isfinite(cfg.feedback_magnitude)) {
    problems.push_back("feedback_magnitude must be finite and > 0");
  }
  if (cfg.jobs < 1) problems.push_back("jobs must be >= 1");
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  auto need = [&](auto parsed, const char* what) {
    if (!parsed) throw ConfigError("bad " + std::string(what) + " '" + v + "'");
    return *parsed;
  };
  if (key == "domain") {
    cfg.domain = v;
  } else if (key == "layout") {
    cfg.layout = v;
  } else if (key == "agent") {
    cfg.agent = need(parse_agent(v), "agent");
  } else if (key == "scenario") {
    cfg.scenario = need(parse_scenario(v), "scenario");
  } else if (key == "noise") {
    cfg.noise = need(parse_noise(v), "noise");
  } else if (key == "episodes") {
    cfg.episodes = parse_number<int>(key, v);
  } else if (key == "runs") {
    const int runs = parse_number<int>(key, v);
    cfg.seeds = seed_range(cfg.seeds.empty() ? 0 : cfg.seeds.front(), runs);
  } else if (key == "seed") {
    cfg.seeds = seed_range(parse_number<std::uint64_t>(key, v), cfg.runs());
  } else if (key == "alpha") {
    cfg.hyper.alpha = parse_number<double>(key, v);
  } else if (key == "beta") {
    cfg.hyper.beta = parse_number<double>(key, v);
  } else if (key == "gamma") {
    cfg.hyper.gamma = parse_number<double>(key, v);
  } else if (key == "maxstamp") {
    cfg.planner.maxstamp = parse_number<std::uint32_t>(key, v);
  } else if (key == "samples_per_state") {
    cfg.planner.samples_per_state = parse_number<std::uint32_t>(key, v);
  } else if (key == "max_plan_actions") {
    if (v == "none" || v.empty()) {
      cfg.planner.max_plan_actions.reset();
    } else {
      cfg.planner.max_plan_actions = parse_number<std::uint32_t>(key, v);
    }
  } else if (key == "episode_cap") {
    cfg.episode_cap = parse_number<int>(key, v);
  } else if (key == "q_alpha") {
    cfg.q_alpha = parse_number<double>(key, v);
  } else if (key == "q_epsilon") {
    cfg.q_epsilon = parse_number<double>(key, v);
  } else if (key == "shaping_weight") {
    cfg.shaping_weight = parse_number<double>(key, v);
  } else if (key == "feedback_magnitude") {
    cfg.feedback_magnitude = parse_number<double>(key, v);
  } else if (key == "jobs") {
    cfg.jobs = parse_number<int>(key, v);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      apply_config_value(cfg, trim(std::string_view(t).substr(0, eq)),
                         std::string_view(t).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    apply_config_text(cfg, ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

CurveSummary aggregate(const std::vector<std::vector<EpisodeRecord>>& runs) {
  CurveSummary out;
  if (runs.empty()) return out;
  const std::size_t n = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != n) throw std::invalid_argument("runs have different episode counts");
  }
  out.mean.resize(n);
  out.variance.resize(n);
  const double k = static_cast<double>(runs.size());
  for (std::size_t e = 0; e < n; ++e) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r[e].ret;
    const double mean = sum / k;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r[e].ret - mean) * (r[e].ret - mean);
    out.mean[e] = mean;
    out.variance[e] = ss / k;
  }
  return out;
}

StateBridge::StateBridge(const Environment& env, const TransitionSystem& ts) : env_(env), ts_(ts) {
  for (StateIndex s = 0; s < env.num_states(); ++s) {
    by_state_.emplace(ts.make_state(env.valuation(s)), s);
  }
}

StateIndex StateBridge::to_env(StateId id) const {
  if (id < cache_.size() && cache_[id] >= 0) return static_cast<StateIndex>(cache_[id]);
  auto it = by_state_.find(ts_.state(id));
  if (it == by_state_.end()) {
    throw std::runtime_error("planner state '" + ts_.describe(ts_.state(id)) +
                             "' has no environment counterpart");
  }
  if (id >= cache_.size()) cache_.resize(static_cast<std::size_t>(id) + 1, -1);
  cache_[id] = it->second;
  return it->second;
}

StateId StateBridge::to_ts(StateIndex s) const { return ts_.intern(ts_.make_state(env_.valuation(s))); }

Agent::Agent(const ExperimentConfig& cfg, std::unique_ptr<Environment> env, std::uint64_t seed)
    : cfg_(cfg),
      env_(std::move(env)),
      model_(FeedbackModel::for_regime(cfg.noise)),
      rng_(splitmix64(seed)),
      feedback_rng_(splitmix64(seed ^ 0x5bd1e9955bd1e995ull)),
      policy_(env_->actions().size(), cfg.hyper.beta),
      value_(cfg.hyper.alpha, cfg.hyper.gamma),
      runner_(*env_) {
  const ActionDescription d = parse_domain(env_->domain_text());
  query_ = parse_query(env_->query_text(), d);
  ts_ = std::make_unique<TransitionSystem>(ground(d));
  if (ts_->num_actions() != env_->actions().size()) {
    throw std::runtime_error("encoding and environment disagree on the action set");
  }
  bridge_ = std::make_unique<StateBridge>(*env_, *ts_);
  if (cfg.scenario != Scenario::none) oracle_ = make_oracle(*env_, cfg.scenario);
}

Agent::~Agent() = default;

double Agent::q(StateIndex s, std::uint32_t a) const {
  const std::size_t k = static_cast<std::size_t>(s) * env_->actions().size() + a;
  return k < q_.size() ? q_[k] : 0.0;
}

double& Agent::q_at(StateIndex s, std::uint32_t a) {
  const std::size_t n = env_->actions().size();
  const std::size_t k = static_cast<std::size_t>(s) * n + a;
  if (k >= q_.size()) q_.resize((static_cast<std::size_t>(s) + 1) * n, 0.0);
  return q_[k];
}

bool Agent::begin_episode() {
  runner_.reset();
  record_ = EpisodeRecord{};
  record_.episode = episode_;
  plan_.reset();
  plan_steps_.clear();
  plan_pos_ = 0;
  active_ = true;
  if (cfg_.agent != AgentKind::pacman) return true;

  // The sampler caches each state's distribution on first use, so the plan
  // is drawn from the policy as it stands at episode start.
  PolicySampler sampler(
      [this](StateId id) { return policy_probs(policy_, bridge_->to_env(id)); },
      ts_->num_actions(), cfg_.planner.samples_per_state, rng_);
  SolveResult solved = solve(query_, *ts_, sampler, cfg_.planner);
  if (!solved.plan) {
    record_.no_plan = true;
    active_ = false;
    return false;
  }
  plan_ = std::move(solved.plan);
  plan_steps_ = plan_actions(*plan_);
  record_.plan_length = static_cast<int>(plan_steps_.size());
  return true;
}

bool Agent::episode_active() const {
  if (!active_ || runner_.done()) return false;
  if (cfg_.agent == AgentKind::pacman) return plan_pos_ < plan_steps_.size();
  return record_.steps < cfg_.episode_cap;
}

std::uint32_t Agent::choose_action() {
  const StateIndex s = runner_.state();
  const std::size_t n = env_->actions().size();
  switch (cfg_.agent) {
    case AgentKind::pacman: {
      const auto [planned_state, a] = plan_steps_[plan_pos_];
      if (bridge_->to_env(planned_state) != s) {
        throw std::runtime_error("environment diverged from the plan at step " +
                                 std::to_string(plan_pos_ + 1));
      }
      ++plan_pos_;
      return a;
    }
    case AgentKind::ac:
      return static_cast<std::uint32_t>(sample_action(policy_probs(policy_, s), rng_));
    case AgentKind::qshape: {
      const double u = uniform01(rng_);
      if (u < cfg_.q_epsilon) {
        return static_cast<std::uint32_t>(std::min<std::size_t>(
            static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(n)), n - 1));
      }
      double best = q(s, 0);
      std::vector<std::uint32_t> ties{0};
      for (std::uint32_t a = 1; a < n; ++a) {
        const double v = q(s, a);
        if (v > best) {
          best = v;
          ties.assign(1, a);
        } else if (v == best) {
          ties.push_back(a);
        }
      }
      if (ties.size() == 1) return ties.front();
      const auto pick = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(ties.size()));
      return ties[std::min(pick, ties.size() - 1)];
    }
  }
  return 0;
}

PendingStep Agent::execute_step() {
  if (!episode_active()) throw std::logic_error("execute_step outside an active episode");
  PendingStep p;
  p.state = runner_.state();
  p.action = choose_action();
  const StepOutcome out = runner_.step(p.action);
  p.step = ++step_;
  p.episode = episode_;
  p.reward = out.reward;
  p.next = out.next;
  p.done = out.done;
  record_.ret += out.reward;
  ++record_.steps;
  if (cfg_.agent == AgentKind::qshape) {
    double best = q(p.next, 0);
    for (std::uint32_t a = 1; a < env_->actions().size(); ++a) best = std::max(best, q(p.next, a));
    p.delta = p.reward + (p.done ? 0.0 : cfg_.hyper.gamma * best) - q(p.state, p.action);
  } else {
    p.delta = td_error(value_, {p.state, p.action, p.reward, p.next, p.done}).value;
    update_value(value_, p.state, p.delta);
  }
  return p;
}

void Agent::finalize_step(const PendingStep& p, std::optional<FeedbackValue> feedback) {
  if (feedback) ++record_.feedback_count;
  if (cfg_.agent == AgentKind::qshape) {
    const double shaped = p.reward + (feedback ? cfg_.shaping_weight * feedback->value() : 0.0);
    double best = q(p.next, 0);
    for (std::uint32_t a = 1; a < env_->actions().size(); ++a) best = std::max(best, q(p.next, a));
    const double target = shaped + (p.done ? 0.0 : cfg_.hyper.gamma * best);
    double& cell = q_at(p.state, p.action);
    cell += cfg_.q_alpha * (target - cell);
    return;
  }
  const AdvantageSignal signal = feedback ? AdvantageSignal{feedback->value(), SignalSource::human}
                                          : AdvantageSignal{p.delta, SignalSource::td};
  update_policy(policy_, p.state, p.action, signal);
}

EpisodeRecord Agent::end_episode() {
  active_ = false;
  ++episode_;
  return record_;
}

std::optional<FeedbackValue> Agent::simulated_feedback(const PendingStep& p) {
  if (!oracle_) return std::nullopt;
  return apply_model(model_, oracle_->feedback(p.state, p.action, cfg_.feedback_magnitude),
                     feedback_rng_);
}

std::vector<EpisodeRecord> Agent::run(int episodes) {
  std::vector<EpisodeRecord> out;
  out.reserve(static_cast<std::size_t>(std::max(episodes, 0)));
  for (int e = 0; e < episodes; ++e) {
    begin_episode();
    while (episode_active()) {
      const PendingStep p = execute_step();
      finalize_step(p, simulated_feedback(p));
    }
    out.push_back(end_episode());
  }
  return out;
}

std::vector<std::string> Agent::remaining_plan() const {
  std::vector<std::string> out;
  for (std::size_t i = plan_pos_; i < plan_steps_.size(); ++i) {
    out.push_back(env_->actions()[plan_steps_[i].second]);
  }
  return out;
}

namespace {

std::vector<EpisodeRecord> run_one(ExperimentConfig cfg, AgentKind kind, std::uint64_t seed) {
  cfg.agent = kind;
  validate(cfg);
  Agent agent(cfg, make_environment(cfg.domain, cfg.layout), seed);
  return agent.run(cfg.episodes);
}

}  // namespace

std::vector<EpisodeRecord> run_pacman(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_one(cfg, AgentKind::pacman, seed);
}

std::vector<EpisodeRecord> run_ac_feedback(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_one(cfg, AgentKind::ac, seed);
}

std::vector<EpisodeRecord> run_q_shaping(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_one(cfg, AgentKind::qshape, seed);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  // Fail on a bad layout before spawning workers.
  make_environment(cfg.domain, cfg.layout);
  ExperimentResult result;
  result.runs.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      try {
        result.runs[i] = run_one(cfg, cfg.agent, cfg.seeds[i]);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::min<int>(cfg.jobs, static_cast<int>(cfg.seeds.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.summary = aggregate(result.runs);
  return result;
}

std::string curve_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "episode,mean,variance";
  for (std::size_t r = 0; r < result.runs.size(); ++r) os << ",run_" << r;
  os << '\n';
  for (std::size_t e = 0; e < result.summary.mean.size(); ++e) {
    os << e + 1 << ',' << format_double(result.summary.mean[e]) << ','
       << format_double(result.summary.variance[e]);
    for (const auto& run : result.runs) os << ',' << format_double(run[e].ret);
    os << '\n';
  }
  return os.str();
}

std::string records_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "run,episode,return,steps,plan_length,feedback_count,no_plan\n";
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    for (const auto& rec : result.runs[r]) {
      os << r << ',' << rec.episode + 1 << ',' << format_double(rec.ret) << ',' << rec.steps << ','
         << rec.plan_length << ',' << rec.feedback_count << ',' << (rec.no_plan ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

std::string manifest_json(const ExperimentConfig& cfg) {
  const auto env = make_environment(cfg.domain, cfg.layout);
  const LayoutInfo layout = env->layout();
  nlohmann::ordered_json j;
  j["format"] = "pac-experiment";
  j["version"] = 1;
  j["code_version"] = code_version();
  nlohmann::ordered_json c;
  c["domain"] = cfg.domain;
  c["layout"] = cfg.layout;
  c["agent"] = to_string(cfg.agent);
  c["scenario"] = to_string(cfg.scenario);
  c["noise"] = to_string(cfg.noise);
  c["episodes"] = cfg.episodes;
  c["runs"] = cfg.runs();
  c["alpha"] = cfg.hyper.alpha;
  c["beta"] = cfg.hyper.beta;
  c["gamma"] = cfg.hyper.gamma;
  c["maxstamp"] = cfg.planner.maxstamp;
  c["samples_per_state"] = cfg.planner.samples_per_state;
  c["max_plan_actions"] = cfg.planner.max_plan_actions
                              ? nlohmann::ordered_json(*cfg.planner.max_plan_actions)
                              : nlohmann::ordered_json(nullptr);
  c["episode_cap"] = cfg.episode_cap;
  c["q_alpha"] = cfg.q_alpha;
  c["q_epsilon"] = cfg.q_epsilon;
  c["shaping_weight"] = cfg.shaping_weight;
  c["feedback_magnitude"] = cfg.feedback_magnitude;
  c["jobs"] = cfg.jobs;
  j["config"] = std::move(c);
  j["seeds"] = cfg.seeds;
  j["layout"] = {{"name", layout.name}, {"version", layout.version}, {"hash", layout.hash}};
  return j.dump(2) + "\n";
}

ExperimentConfig parse_manifest(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "pac-experiment") throw ConfigError("not an experiment manifest");
    const auto& c = j.at("config");
    ExperimentConfig cfg;
    cfg.domain = c.at("domain").get<std::string>();
    cfg.layout = c.at("layout").get<std::string>();
    cfg.agent = parse_agent(c.at("agent").get<std::string>()).value();
    cfg.scenario = parse_scenario(c.at("scenario").get<std::string>()).value();
    cfg.noise = parse_noise(c.at("noise").get<std::string>()).value();
    cfg.episodes = c.at("episodes").get<int>();
    cfg.hyper = {c.at("alpha").get<double>(), c.at("beta").get<double>(),
                 c.at("gamma").get<double>()};
    cfg.planner.maxstamp = c.at("maxstamp").get<std::uint32_t>();
    cfg.planner.samples_per_state = c.at("samples_per_state").get<std::uint32_t>();
    if (!c.at("max_plan_actions").is_null()) {
      cfg.planner.max_plan_actions = c.at("max_plan_actions").get<std::uint32_t>();
    }
    cfg.episode_cap = c.at("episode_cap").get<int>();
    cfg.q_alpha = c.at("q_alpha").get<double>();
    cfg.q_epsilon = c.at("q_epsilon").get<double>();
    cfg.shaping_weight = c.at("shaping_weight").get<double>();
    cfg.feedback_magnitude = c.at("feedback_magnitude").get<double>();
    cfg.jobs = c.at("jobs").get<int>();
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  } catch (const std::bad_optional_access&) {
    throw ConfigError("malformed manifest: unknown enum value");
  }
}

void export_results(const ExperimentConfig& cfg, const ExperimentResult& result,
                    const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& body) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
  };
  write("curve.csv", curve_csv(result));
  write("records.csv", records_csv(result));
  write("manifest.json", manifest_json(cfg));
}

}  // namespace pac
