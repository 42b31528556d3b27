#pragma once
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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "evauction/agents.hpp"
#include "evauction/model.hpp"
#include "evauction/money.hpp"
#include "evauction/solver.hpp"

namespace evauction {

/// Everything the auctioneer saw and decided in one round.
struct RoundRecord {
  int round = 0;  // 1-based
  std::vector<SubmittedBid> submitted;          // one entry per agent, index-aligned
  std::vector<AgentStatus> statuses;            // status when the round was solved
  std::vector<std::vector<Money>> price_table;  // full per-atom price snapshot
  Schedule provisional;
  Money revenue;  // == provisional.objective
  bool terminal = false;
  // False only when a node-budgeted solve returned a bounded rather than a
  // proven-optimal provisional schedule.
  bool proven_optimal = true;
};

enum class TerminationReason { kConverged, kAllWithdrawn };

struct AuctionResult {
  Schedule final_schedule;
  std::vector<Money> payments;  // per agent index; zero for everyone not selected
  std::vector<RoundRecord> rounds;
  TerminationReason reason = TerminationReason::kConverged;
  std::int64_t round_bound = 0;  // theoretical termination bound used by the fuse
  SearchStats total_wdp_stats;
  bool all_rounds_proven_optimal = true;

  Money revenue() const {
    Money total;
    for (Money p : payments) total += p;
    return total;
  }
};

struct AuctionConfig {
  Money epsilon = Money::from_dollars(static_cast<std::int64_t>(1));
  Strategy default_strategy = Strategy::best_response();
  std::unordered_map<int, Strategy> per_agent_strategy;  // keyed by agent index
  SolverLimits solver_limits;
  int fuse_factor = 10;  // hard stop at fuse_factor * round_bound
};

struct BidRejection {
  int agent_index = 0;
  int bid_index = -1;  // -1 when the whole submission was rejected
  std::string reason;
};

struct ValidatedBids {
  std::vector<SubmittedBid> valid;  // index-aligned with the agents; may hold empty bids
  std::vector<BidRejection> rejections;
};

/// Auctioneer-side screening: drops atoms priced below the reserve, whole
/// submissions that are malformed (out-of-order or duplicated start times,
/// prices increasing with later starts), withdrawn agents, and — outside the
/// terminal round — the frozen bids of final-status agents.
inline ValidatedBids validate_bids(const std::vector<SubmittedBid>& bids,
                                   const std::vector<AgentState>& states,
                                   bool terminal_round) {
  ValidatedBids out;
  out.valid.resize(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const AgentState& state = states[i];
    out.valid[i].agent_id = state.request.agent_id;
    if (state.status == AgentStatus::kWithdrawn) {
      out.rejections.push_back({static_cast<int>(i), -1, "withdrawn"});
      continue;
    }
    if (state.status == AgentStatus::kFinal && !terminal_round) {
      out.rejections.push_back({static_cast<int>(i), -1, "final status"});
      continue;
    }
    bool malformed = false;
    for (std::size_t a = 0; a + 1 < bids[i].atoms.size() && !malformed; ++a) {
      if (bids[i].atoms[a + 1].latest_start <= bids[i].atoms[a].latest_start + 1e-9) {
        malformed = true;
      }
      if (bids[i].atoms[a + 1].price > bids[i].atoms[a].price) malformed = true;
    }
    if (malformed) {
      out.rejections.push_back({static_cast<int>(i), -1, "malformed xor bid"});
      continue;
    }
    for (const SubmittedAtom& atom : bids[i].atoms) {
      if (atom.price < state.reserve[static_cast<std::size_t>(atom.bid_index)]) {
        out.rejections.push_back({static_cast<int>(i), atom.bid_index, "below reserve"});
        continue;
      }
      out.valid[i].atoms.push_back(atom);
    }
  }
  return out;
}

/// The convergence test: true once every still-active agent has repeated her
/// previous submission, atom set and prices alike.
inline bool check_termination(const std::vector<SubmittedBid>& current,
                              const std::vector<SubmittedBid>& previous,
                              const std::vector<AgentState>& states) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].status != AgentStatus::kActive) continue;
    if (!(current[i] == previous[i])) return false;
  }
  return true;
}

/// Rounds the protocol can need at most: every price can only climb from the
/// reserve to the value in epsilon steps, at least one step happens per
/// non-terminal round, plus the opening and terminal rounds.
inline std::int64_t round_bound(const Instance& instance, Money epsilon) {
  std::int64_t total = 0;
  for (int i = 0; i < instance.num_agents(); ++i) {
    const auto& values = instance.profiles[static_cast<std::size_t>(i)].bid_values;
    const auto& reserves = instance.reserve_prices[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < values.size(); ++k) {
      total += increments_to_cover(values[k] - reserves[k], epsilon);
    }
  }
  return total + 2;
}

namespace detail {

inline WdpProblem wdp_from_bids(const Instance& instance,
                                const std::vector<SubmittedBid>& bids) {
  WdpProblem problem;
  problem.num_points = instance.num_points;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (bids[i].atoms.empty()) continue;
    const ChargingRequest& req = instance.requests[i];
    WdpJob job;
    job.agent_id = req.agent_id;
    job.arrival = req.earliest_arrival;
    job.duration = req.duration;
    for (const SubmittedAtom& atom : bids[i].atoms) {
      job.atoms.push_back(WdpAtom{atom.bid_index, atom.latest_start, atom.price});
    }
    problem.jobs.push_back(std::move(job));
  }
  return problem;
}

}  // namespace detail

/// Runs the full iterative bidding protocol.
///
/// Round 1 collects reserve-price bids. Every later round lets unselected
/// agents raise their last-round atoms by the increment (or act per their
/// strategy) and recompute their utility-maximizing atoms. The auctioneer
/// keeps every atom an agent has ever put forward on the table at its
/// current price (revelation only grows), validates the pooled bids, and
/// checks for convergence: once every active agent repeats her bids, winner
/// determination runs once more over the active plus the re-included
/// final-status bids, that schedule is implemented, and winners pay their
/// bid prices.
inline AuctionResult run_auction(const Instance& instance, const AuctionConfig& config) {
  validate_instance(instance);
  if (config.epsilon <= kZeroMoney) throw std::invalid_argument("epsilon must be positive");

  const int n = instance.num_agents();
  AuctionResult result;
  result.round_bound = round_bound(instance, config.epsilon);
  const std::int64_t fuse =
      std::max<std::int64_t>(result.round_bound * config.fuse_factor, 16);

  std::vector<AgentState> states;
  states.reserve(static_cast<std::size_t>(n));
  std::vector<SubmittedBid> submissions(static_cast<std::size_t>(n));
  std::vector<Strategy> strategies(static_cast<std::size_t>(n), config.default_strategy);
  for (auto& [index, strategy] : config.per_agent_strategy) {
    strategies.at(static_cast<std::size_t>(index)) = strategy;
  }

  // Everything an agent has revealed so far, by atom index. The pooled
  // submission of a round is this set at the agent's current prices.
  std::vector<std::vector<bool>> revealed(static_cast<std::size_t>(n));

  auto pooled_submission = [&](int i, const SubmittedBid& fresh) {
    auto& seen = revealed[static_cast<std::size_t>(i)];
    for (const SubmittedAtom& atom : fresh.atoms) seen[static_cast<std::size_t>(atom.bid_index)] = true;
    const AgentState& state = states[static_cast<std::size_t>(i)];
    SubmittedBid pooled;
    pooled.agent_id = state.request.agent_id;
    for (int k = 0; k < state.num_atoms(); ++k) {
      if (seen[static_cast<std::size_t>(k)]) {
        pooled.atoms.push_back(SubmittedAtom{k, state.latest_start(k),
                                             state.prices[static_cast<std::size_t>(k)]});
      }
    }
    return pooled;
  };

  for (int i = 0; i < n; ++i) {
    states.push_back(make_agent_state(instance, i));
    revealed[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(states.back().num_atoms()), false);
    submissions[static_cast<std::size_t>(i)] = pooled_submission(i, initialize_agent(states.back()));
  }

  auto snapshot_prices = [&states]() {
    std::vector<std::vector<Money>> table;
    table.reserve(states.size());
    for (const AgentState& s : states) table.push_back(s.prices);
    return table;
  };

  auto mark_selected = [&states](const Schedule& schedule) {
    for (AgentState& s : states) s.selected_last = schedule.selects(s.request.agent_id);
  };

  auto solve_round = [&](const std::vector<SubmittedBid>& valid) {
    SolveResult solved = solve_wdp(detail::wdp_from_bids(instance, valid), config.solver_limits);
    result.total_wdp_stats.nodes_expanded += solved.stats.nodes_expanded;
    result.total_wdp_stats.pruned_by_bound += solved.stats.pruned_by_bound;
    result.total_wdp_stats.wall_seconds += solved.stats.wall_seconds;
    result.all_rounds_proven_optimal &= solved.proven_optimal;
    return solved;
  };

  auto record_round = [&](int round, const std::vector<SubmittedBid>& submitted,
                          Schedule provisional, bool terminal, bool proven_optimal) {
    RoundRecord record;
    record.round = round;
    record.submitted = submitted;
    record.statuses.reserve(states.size());
    for (const AgentState& s : states) record.statuses.push_back(s.status);
    record.price_table = snapshot_prices();
    record.revenue = provisional.objective;
    record.provisional = std::move(provisional);
    record.terminal = terminal;
    record.proven_optimal = proven_optimal;
    result.rounds.push_back(std::move(record));
  };

  // Round 1: reserve-price bids, no termination check yet.
  ValidatedBids validated = validate_bids(submissions, states, /*terminal_round=*/false);
  SolveResult solved = solve_round(validated.valid);
  mark_selected(solved.schedule);
  record_round(1, submissions, solved.schedule, false, solved.proven_optimal);
  std::vector<SubmittedBid> previous_valid = validated.valid;

  for (int round = 2;; ++round) {
    if (round > fuse) {
      throw std::runtime_error("auction exceeded the round fuse (" + std::to_string(fuse) +
                               "); protocol failed to converge");
    }
    for (int i = 0; i < n; ++i) {
      AgentState& state = states[static_cast<std::size_t>(i)];
      if (state.status != AgentStatus::kActive) continue;
      apply_strategy(state, strategies[static_cast<std::size_t>(i)], round, config.epsilon);
      if (state.status == AgentStatus::kActive) {
        SubmittedBid bid = utility_max_bids(state);
        state.submitted_last.clear();
        for (const SubmittedAtom& atom : bid.atoms) state.submitted_last.push_back(atom.bid_index);
        submissions[static_cast<std::size_t>(i)] = pooled_submission(i, bid);
      }
      // Agents that just froze (final) or left (withdrawn) keep their last
      // pooled submission on file; validation decides whether it participates.
    }

    validated = validate_bids(submissions, states, /*terminal_round=*/false);

    bool any_alive = false;
    bool any_active = false;
    for (const AgentState& s : states) {
      any_alive |= s.status != AgentStatus::kWithdrawn;
      any_active |= s.status == AgentStatus::kActive;
    }
    if (!any_alive) {
      result.reason = TerminationReason::kAllWithdrawn;
      result.final_schedule = Schedule{};
      record_round(round, submissions, Schedule{}, true, true);
      break;
    }

    bool converged = check_termination(validated.valid, previous_valid, states);
    if (converged || !any_active) {
      // Terminal round: final-status agents re-enter with their frozen bids.
      ValidatedBids terminal = validate_bids(submissions, states, /*terminal_round=*/true);
      solved = solve_round(terminal.valid);
      mark_selected(solved.schedule);
      record_round(round, submissions, solved.schedule, true, solved.proven_optimal);
      result.final_schedule = result.rounds.back().provisional;
      result.reason = TerminationReason::kConverged;
      break;
    }

    solved = solve_round(validated.valid);
    mark_selected(solved.schedule);
    record_round(round, submissions, solved.schedule, false, solved.proven_optimal);
    previous_valid = validated.valid;
  }

  if (static_cast<std::int64_t>(result.rounds.size()) > result.round_bound) {
    throw std::runtime_error("auction ran " + std::to_string(result.rounds.size()) +
                             " rounds, past the theoretical bound of " +
                             std::to_string(result.round_bound));
  }

  result.payments.assign(static_cast<std::size_t>(n), kZeroMoney);
  for (const Assignment& a : result.final_schedule.assignments) {
    int idx = instance.index_of_agent(a.agent_id);
    result.payments[static_cast<std::size_t>(idx)] =
        states[static_cast<std::size_t>(idx)].prices[static_cast<std::size_t>(a.bid_index)];
  }
  return result;
}

/// Audit used across the test suite: every winner pays her bid, no more than
/// her value for the won start time; losers pay nothing; no price anywhere in
/// the trace ever exceeds the corresponding value.
struct RationalityReport {
  bool ok = true;
  std::string detail;
};

inline RationalityReport audit_individual_rationality(const Instance& instance,
                                                      const AuctionResult& result) {
  RationalityReport report;
  auto fail = [&report](std::string detail) {
    report.ok = false;
    report.detail = std::move(detail);
    return report;
  };
  for (int i = 0; i < instance.num_agents(); ++i) {
    const Assignment* a = result.final_schedule.find(instance.requests[i].agent_id);
    Money payment = result.payments[static_cast<std::size_t>(i)];
    if (a == nullptr) {
      if (payment != kZeroMoney) return fail("loser pays a non-zero amount");
      continue;
    }
    Money value =
        instance.profiles[static_cast<std::size_t>(i)].bid_values[static_cast<std::size_t>(a->bid_index)];
    if (payment > value) {
      return fail("agent " + std::to_string(a->agent_id) + " pays above her value");
    }
  }
  for (const RoundRecord& round : result.rounds) {
    for (int i = 0; i < instance.num_agents(); ++i) {
      const auto& values = instance.profiles[static_cast<std::size_t>(i)].bid_values;
      const auto& prices = round.price_table[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (prices[k] > values[k]) {
          return fail("round " + std::to_string(round.round) + ": price above value for agent " +
                      std::to_string(instance.requests[i].agent_id));
        }
      }
    }
  }
  return report;
}

}  // namespace evauction
