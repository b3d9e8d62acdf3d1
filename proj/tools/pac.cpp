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

// pac run | plan | serve
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure
// (including "no plan within maxstamp" for `plan`).

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pac/action_lang.hpp"
#include "pac/harness.hpp"
#include "pac/planner.hpp"
#include "pac/teach_net.hpp"
#include "pac/teach_service.hpp"
#include "pac/transition.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pac::ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunArgs {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> flags;  // applied after the file
  std::vector<std::string> sets;
  std::string out;
};

int do_run(const RunArgs& args) {
  pac::ExperimentConfig cfg;
  try {
    if (!args.config_file.empty()) pac::apply_config_file(cfg, args.config_file);
    for (const auto& [key, value] : args.flags) pac::apply_config_value(cfg, key, value);
    for (const auto& kv : args.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw pac::ConfigError("--set expects key=value, got '" + kv + "'");
      pac::apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    pac::validate(cfg);
    pac::make_environment(cfg.domain, cfg.layout);
  } catch (const std::exception& e) {
    std::cerr << "pac run: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    const pac::ExperimentResult result = pac::run_experiment(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!args.out.empty()) pac::export_results(cfg, result, args.out);

    const auto& mean = result.summary.mean;
    const std::size_t n = mean.size();
    const std::size_t tail = std::min<std::size_t>(n, 10);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < tail; ++i) {
      first += mean[i];
      last += mean[n - 1 - i];
    }
    int no_plan = 0;
    for (const auto& run : result.runs) {
      for (const auto& r : run) no_plan += r.no_plan ? 1 : 0;
    }
    std::printf("%s %s scenario=%s noise=%s episodes=%d runs=%d\n", cfg.domain.c_str(),
                std::string(pac::to_string(cfg.agent)).c_str(),
                std::string(pac::to_string(cfg.scenario)).c_str(),
                std::string(pac::to_string(cfg.noise)).c_str(), cfg.episodes, cfg.runs());
    if (tail > 0) {
      std::printf("mean return: first %zu = %.4f, last %zu = %.4f\n", tail, first / tail, tail,
                  last / tail);
    }
    if (no_plan > 0) std::printf("null episodes (no plan): %d\n", no_plan);
    if (!args.out.empty()) std::printf("wrote %s\n", args.out.c_str());
    std::printf("%.2f s\n", secs);
  } catch (const std::exception& e) {
    std::cerr << "pac run: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

struct PlanArgs {
  std::string domain_file;
  std::string query_file;
  std::uint32_t maxstamp = 200;
  bool sample = false;
  std::uint64_t seed = 0;
  std::uint32_t samples_per_state = 1;
};

int do_plan(const PlanArgs& args) {
  pac::ActionDescription d;
  pac::Query q;
  std::unique_ptr<pac::TransitionSystem> ts;
  try {
    d = pac::parse_domain(read_file(args.domain_file));
    q = pac::parse_query(read_file(args.query_file), d);
    ts = std::make_unique<pac::TransitionSystem>(pac::ground(d));
  } catch (const pac::ParseError& e) {
    for (const auto& diag : e.diagnostics()) {
      std::cerr << args.domain_file << ":" << diag.to_string() << "\n";
    }
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "pac plan: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    pac::PlannerConfig cfg;
    cfg.maxstamp = args.maxstamp;
    cfg.samples_per_state = args.samples_per_state;
    pac::SolveResult solved;
    if (args.sample) {
      pac::Rng rng(args.seed);
      const std::size_t n = ts->num_actions();
      pac::PolicySampler sampler(
          [n](pac::StateId) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }, n,
          args.samples_per_state, rng);
      solved = pac::solve(q, *ts, sampler, cfg);
    } else {
      pac::FullAvailability all(ts->num_actions());
      solved = pac::solve(q, *ts, all, cfg);
    }
    if (!solved.plan) {
      std::printf("no plan within maxstamp %u\n", args.maxstamp);
      return kRuntimeError;
    }
    std::fputs(pac::format_plan(*solved.plan, *ts).c_str(), stdout);
    std::printf("%% actions %zu, horizon %u\n", solved.plan->action_count(), solved.plan->horizon);
  } catch (const std::exception& e) {
    std::cerr << "pac plan: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

struct ServeArgs {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string log_dir;
};

int do_serve(const ServeArgs& args) {
  try {
    pac::SessionManager manager(args.log_dir);
    pac::TeachServer server(manager, args.address, args.port);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.start();
    std::printf("serving on %s:%u\n", args.address.c_str(), server.port());
    std::fflush(stdout);
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    manager.shutdown();
  } catch (const std::exception& e) {
    std::cerr << "pac serve: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PACMAN planner/actor/critic lab"};
  app.set_version_flag("--version", pac::code_version());
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment and export learning curves");
  run_cmd->add_option("--config", run.config_file, "key = value config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Output directory for curve.csv, records.csv, manifest.json");
  run_cmd->add_option("--set", run.sets, "Extra key=value overrides (repeatable)");
  // Flags map one-to-one onto config keys and override the config file.
  const std::vector<std::pair<const char*, const char*>> keyed = {
      {"domain", "fourrooms | taxi | threegrid"},
      {"layout", "Layout file replacing the canonical map"},
      {"agent", "pacman | ac | qshape"},
      {"scenario", "none | helpful | misleading"},
      {"noise", "ideal | infrequent | inconsistent | both"},
      {"episodes", "Episodes per run"},
      {"runs", "Number of seeds"},
      {"seed", "First seed"},
      {"jobs", "Runs in parallel"},
  };
  for (const auto& [key, help] : keyed) {
    run_cmd->add_option_function<std::string>(
        std::string("--") + key,
        [&run, k = std::string(key)](const std::string& v) { run.flags.emplace_back(k, v); }, help);
  }

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan once for a domain and query");
  plan_cmd->add_option("--domain", plan.domain_file, "Action description file")
      ->required()
      ->check(CLI::ExistingFile);
  plan_cmd->add_option("--query", plan.query_file, "Query file (init/goal)")
      ->required()
      ->check(CLI::ExistingFile);
  plan_cmd->add_option("--maxstamp", plan.maxstamp, "Horizon cap")->check(CLI::PositiveNumber);
  plan_cmd->add_flag("--sample", plan.sample,
                     "Gate actions by a uniform policy instead of allowing all of them");
  plan_cmd->add_option("--seed", plan.seed, "Seed for --sample");
  plan_cmd->add_option("--samples-per-state", plan.samples_per_state, "Draws per state for --sample")
      ->check(CLI::PositiveNumber);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve live teaching sessions");
  serve_cmd->add_option("--port", serve.port, "TCP port (0 picks one)");
  serve_cmd->add_option("--address", serve.address, "Bind address");
  serve_cmd->add_option("--log-dir", serve.log_dir, "Append each session's events to DIR/<id>.jsonl");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run_cmd) return do_run(run);
  if (*plan_cmd) return do_plan(plan);
  if (*serve_cmd) return do_serve(serve);
  return kConfigError;
}
