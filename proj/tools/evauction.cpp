// Copyright 2026 The EVAuction Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evauction/auction.hpp"
#include "evauction/genbench.hpp"
#include "evauction/io.hpp"
#include "evauction/lp_export.hpp"
#include "evauction/model.hpp"
#include "evauction/oracle.hpp"
#include "evauction/solver.hpp"

namespace {

using namespace evauction;

// Relative output paths land in $EVAUCTION_OUT_DIR when it is set.
std::string resolve_out_path(const std::string& path) {
  const char* base = std::getenv("EVAUCTION_OUT_DIR");
  if (base == nullptr || path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

std::ofstream open_out(const std::string& path) {
  std::string resolved = resolve_out_path(path);
  std::ofstream out(resolved);
  if (!out) throw std::runtime_error("cannot open output file: " + resolved);
  return out;
}

Instance load_with_report(const std::string& path, bool quiet = false) {
  LoadReport report;
  Instance instance = load_instance_file(path, &report);
  if (!quiet) {
    for (const std::string& note : report.notes) std::cerr << "note: " << note << "\n";
    for (const std::string& drop : report.dropped_atoms) std::cerr << "warning: " << drop << "\n";
  }
  return instance;
}

void print_schedule(const Instance& instance, const Schedule& schedule) {
  std::cout << "objective: " << schedule.objective << "\n";
  std::cout << "agent  atom  point  position  start\n";
  for (const Assignment& a : schedule.assignments) {
    std::cout << "  " << a.agent_id << "     " << (a.bid_index < 0 ? std::string("-")
                                                                   : std::to_string(a.bid_index))
              << "     " << a.point_id << "      " << a.position << "        " << a.start_time
              << "\n";
  }
  std::cout << schedule.assignments.size() << " of " << instance.num_agents()
            << " agents selected\n";
}

std::vector<std::uint64_t> load_seeds(const std::string& seeds_file, int num_seeds,
                                      std::uint64_t base_seed) {
  std::vector<std::uint64_t> seeds;
  if (!seeds_file.empty()) {
    std::ifstream in(seeds_file);
    if (!in) throw std::runtime_error("cannot open seeds file: " + seeds_file);
    std::uint64_t s;
    while (in >> s) seeds.push_back(s);
    if (seeds.empty()) throw std::runtime_error("seeds file is empty");
  } else {
    for (int i = 0; i < num_seeds; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
  }
  return seeds;
}

int cmd_generate(const std::string& group, int n, int m, double alpha, std::uint64_t seed,
                 const std::string& out_path) {
  GeneratorConfig config;
  if (!group.empty()) {
    config = GeneratorConfig::group(group, seed);
  } else {
    config.num_agents = n;
    config.num_points = m;
    config.alpha = alpha;
    config.seed = seed;
  }
  Instance instance = generate(config);
  if (out_path.empty()) {
    save_instance(std::cout, instance);
  } else {
    std::ofstream out = open_out(out_path);
    save_instance(out, instance);
    std::cout << "wrote " << instance.num_agents() << " agents / " << instance.num_points
              << " points to " << resolve_out_path(out_path) << "\n";
  }
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& mode,
              const std::string& weights, bool check_oracle, const std::string& lp_path) {
  Instance instance = load_with_report(instance_path);
  if (mode == "central") {
    SolveResult result = solve_centralized(instance);
    print_schedule(instance, result.schedule);
    std::cout << "nodes: " << result.stats.nodes_expanded
              << "  pruned: " << result.stats.pruned_by_bound << "  time: " << result.stats.wall_seconds
              << "s\n";
    if (check_oracle) {
      Money reference = oracle::brute_force_centralized(instance);
      bool equal = reference == result.schedule.objective;
      std::cout << "oracle check: solver " << result.schedule.objective << " vs exhaustive "
                << reference << " -> " << (equal ? "equal" : "MISMATCH") << "\n";
      if (!equal) return 1;
    }
    return 0;
  }
  if (mode != "wdp") throw CLI::ValidationError("--mode must be central or wdp");

  WdpProblem problem = wdp_from_instance(
      instance, weights == "value" ? WdpWeights::kStepValue : WdpWeights::kReservePrice);
  if (!lp_path.empty()) {
    std::ofstream out = open_out(lp_path);
    export_lp(out, problem);
    std::cout << "wrote LP model to " << resolve_out_path(lp_path) << "\n";
  }
  SolveResult result = solve_wdp(problem);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  print_schedule(instance, result.schedule);
  std::cout << "nodes: " << result.stats.nodes_expanded
            << "  pruned: " << result.stats.pruned_by_bound << "  time: " << result.stats.wall_seconds
            << "s\n";
  if (check_oracle) {
    Money reference = oracle::brute_force_wdp(problem);
    bool equal = reference == result.schedule.objective;
    std::cout << "oracle check: solver " << result.schedule.objective << " vs exhaustive "
              << reference << " -> " << (equal ? "equal" : "MISMATCH") << "\n";
    if (!equal) return 1;
  }
  return 0;
}

int cmd_auction(const std::string& instance_path, double epsilon_dollars,
                const std::string& strategy, const std::vector<std::string>& agent_strategies,
                const std::string& trace_path) {
  Instance instance = load_with_report(instance_path);
  AuctionConfig config;
  config.epsilon = Money::from_dollars(epsilon_dollars);
  config.default_strategy = parse_strategy(strategy);
  for (const std::string& spec : agent_strategies) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--agent-strategy expects <agent_id>=<strategy>");
    }
    int agent_id = std::stoi(spec.substr(0, eq));
    int index = instance.index_of_agent(agent_id);
    if (index < 0) throw CLI::ValidationError("unknown agent id " + std::to_string(agent_id));
    config.per_agent_strategy[index] = parse_strategy(spec.substr(eq + 1));
  }

  AuctionResult result = run_auction(instance, config);
  std::cout << "rounds: " << result.rounds.size() << " (bound " << result.round_bound << ")\n";
  std::cout << "revenue: " << result.revenue() << "\n";
  print_schedule(instance, result.final_schedule);
  std::cout << "payments:";
  for (int i = 0; i < instance.num_agents(); ++i) {
    if (result.payments[static_cast<std::size_t>(i)] != kZeroMoney) {
      std::cout << "  agent " << instance.requests[static_cast<std::size_t>(i)].agent_id << ": "
                << result.payments[static_cast<std::size_t>(i)];
    }
  }
  std::cout << "\n";
  std::cout << "round revenue:";
  for (const RoundRecord& r : result.rounds) std::cout << " " << r.revenue;
  std::cout << "\n";

  if (!trace_path.empty()) {
    std::ofstream out = open_out(trace_path);
    write_trace(out, instance, config.epsilon, result);
    std::cout << "wrote trace to " << resolve_out_path(trace_path) << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& groups_arg, const std::string& epsilons_arg,
                   const std::string& seeds_file, int num_seeds, std::uint64_t base_seed,
                   const std::string& out_path) {
  ExperimentSpec spec;
  spec.groups.clear();
  {
    std::stringstream ss(groups_arg);
    std::string item;
    while (std::getline(ss, item, ',')) spec.groups.push_back(item);
  }
  spec.epsilons.clear();
  {
    std::stringstream ss(epsilons_arg);
    std::string item;
    while (std::getline(ss, item, ',')) spec.epsilons.push_back(Money::from_dollars(std::stod(item)));
  }
  spec.seeds = load_seeds(seeds_file, num_seeds, base_seed);

  std::vector<MetricsReport> rows = run_experiment(spec);
  if (out_path.empty()) {
    write_results_csv(std::cout, rows);
  } else {
    std::ofstream out = open_out(out_path);
    write_results_csv(out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << resolve_out_path(out_path) << "\n";
  }
  return 0;
}

int cmd_replay(const std::string& instance_path, const std::string& trace_path) {
  Instance instance = load_with_report(instance_path, /*quiet=*/true);
  std::ifstream trace(trace_path);
  if (!trace) throw std::runtime_error("cannot open trace file: " + trace_path);
  ReplayReport report = replay_trace(instance, trace);
  std::cout << "checked " << report.rounds_checked << " rounds\n";
  for (const std::string& p : report.problems) std::cout << "problem: " << p << "\n";
  std::cout << (report.ok ? "trace is consistent" : "trace FAILED validation") << "\n";
  return report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reservation-based charging-station scheduling: exact solver and "
               "iterative-auction simulator"};
  app.require_subcommand(1);

  // generate
  std::string gen_group, gen_out;
  int gen_n = 6, gen_m = 2;
  double gen_alpha = 4.0;
  std::uint64_t gen_seed = 1;
  auto* generate_cmd = app.add_subcommand("generate", "Draw a random instance file");
  generate_cmd->add_option("--group", gen_group, "Preset: 1 (6 EV/2 CP), 2 (8/2), 3 (10/3), xl (100/20)");
  generate_cmd->add_option("--n", gen_n, "Number of agents (when no --group)");
  generate_cmd->add_option("--m", gen_m, "Number of charging points (when no --group)");
  generate_cmd->add_option("--alpha", gen_alpha, "Charging duration scale (when no --group)");
  generate_cmd->add_option("--seed", gen_seed, "RNG seed");
  generate_cmd->add_option("--out", gen_out, "Output file (stdout when omitted)");

  // solve
  std::string solve_instance, solve_mode = "central", solve_weights = "price", solve_lp;
  bool solve_oracle = false;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance exactly");
  solve_cmd->add_option("--instance", solve_instance, "Instance file")->required();
  solve_cmd->add_option("--mode", solve_mode, "central | wdp");
  solve_cmd->add_option("--weights", solve_weights, "wdp weights: price | value");
  solve_cmd->add_flag("--check-oracle", solve_oracle, "Cross-check against exhaustive enumeration");
  solve_cmd->add_option("--export-lp", solve_lp, "Write the WDP as a big-M MILP in LP format");

  // auction
  std::string auc_instance, auc_strategy = "best_response", auc_trace;
  std::vector<std::string> auc_agent_strategies;
  double auc_epsilon = 1.0;
  auto* auction_cmd = app.add_subcommand("auction", "Run the iterative bidding protocol");
  auction_cmd->add_option("--instance", auc_instance, "Instance file")->required();
  auction_cmd->add_option("--epsilon", auc_epsilon, "Price increment in dollars")->required();
  auction_cmd->add_option("--strategy", auc_strategy,
                          "Default strategy: best_response | aggressive:<inc> | early_final:<round> "
                          "| withdraw:<round>");
  auction_cmd->add_option("--agent-strategy", auc_agent_strategies,
                          "Per-agent override, <agent_id>=<strategy> (repeatable)");
  auction_cmd->add_option("--trace-out", auc_trace, "Write the per-round trace here");

  // experiment
  std::string exp_groups = "1,2,3", exp_epsilons = "1,2", exp_seeds_file, exp_out;
  int exp_num_seeds = 10;
  std::uint64_t exp_base_seed = 1;
  auto* experiment_cmd = app.add_subcommand("experiment", "Batch metrics over random instances");
  experiment_cmd->add_option("--groups", exp_groups, "Comma-separated groups (1,2,3,xl)");
  experiment_cmd->add_option("--epsilons", exp_epsilons, "Comma-separated increments in dollars");
  experiment_cmd->add_option("--seeds-file", exp_seeds_file, "File with one seed per line");
  experiment_cmd->add_option("--num-seeds", exp_num_seeds, "Number of consecutive seeds");
  experiment_cmd->add_option("--base-seed", exp_base_seed, "First seed when --seeds-file is absent");
  experiment_cmd->add_option("--out", exp_out, "Results CSV (stdout when omitted)");

  // replay
  std::string rep_instance, rep_trace;
  auto* replay_cmd = app.add_subcommand("replay", "Re-validate a recorded auction trace");
  replay_cmd->add_option("--instance", rep_instance, "Instance file")->required();
  replay_cmd->add_option("--trace", rep_trace, "Trace file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate_cmd->parsed()) {
      return cmd_generate(gen_group, gen_n, gen_m, gen_alpha, gen_seed, gen_out);
    }
    if (solve_cmd->parsed()) {
      return cmd_solve(solve_instance, solve_mode, solve_weights, solve_oracle, solve_lp);
    }
    if (auction_cmd->parsed()) {
      return cmd_auction(auc_instance, auc_epsilon, auc_strategy, auc_agent_strategies, auc_trace);
    }
    if (experiment_cmd->parsed()) {
      return cmd_experiment(exp_groups, exp_epsilons, exp_seeds_file, exp_num_seeds, exp_base_seed,
                            exp_out);
    }
    if (replay_cmd->parsed()) {
      return cmd_replay(rep_instance, rep_trace);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
