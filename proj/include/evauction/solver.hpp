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

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evauction/model.hpp"
#include "evauction/money.hpp"

namespace evauction {

/// A candidate way to schedule one job: start no later than `start_deadline`
/// for a weight of `weight`. In winner determination one atom per bid,
/// weighted by its price (or by its step value when benchmarking); in the
/// centralized problem a single mode covering the full window, where the
/// realized weight additionally depends on the start time.
struct WdpAtom {
  int bid_index = 0;
  double latest_start = 0.0;
  Money weight;
};

struct WdpJob {
  int agent_id = 0;
  double arrival = 0.0;
  double duration = 0.0;
  std::vector<WdpAtom> atoms;  // at most one may be chosen
};

struct WdpProblem {
  int num_points = 1;
  std::vector<WdpJob> jobs;
};

struct SearchStats {
  std::uint64_t nodes_expanded = 0;
  std::uint64_t pruned_by_bound = 0;
  double wall_seconds = 0.0;
};

/// What to do when the node budget runs out: fail loudly, or stop and return
/// the best schedule found together with a certified upper bound on the true
/// optimum (the maximum bound over all abandoned subtrees). There is no mode
/// that returns a suboptimal answer silently.
enum class NodeBudgetPolicy { kThrow, kReturnBounded };

struct SolverLimits {
  int max_agents = 128;
  // Hard ceiling on search nodes; 0 means unlimited.
  std::uint64_t max_nodes = 0;
  NodeBudgetPolicy on_budget = NodeBudgetPolicy::kThrow;
  // Disables the upper-bound cut; the search then enumerates the full
  // insertion tree. Exists so tests can confirm the bound is admissible.
  bool disable_bound_pruning = false;
};

struct SolveResult {
  Schedule schedule;
  SearchStats stats;
  std::vector<std::string> warnings;  // e.g. dropped infeasible atoms
  // False only under NodeBudgetPolicy::kReturnBounded when the budget ran
  // out; the true optimum then lies in [schedule.objective, upper_bound].
  bool proven_optimal = true;
  Money objective_upper_bound;
};

class SearchLimitExceeded : public std::runtime_error {
 public:
  explicit SearchLimitExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Places an ordered sequence of jobs on one point: the first starts at its
/// arrival, each next at max(own arrival, predecessor finish). Returns the
/// start times, or nothing if some job would start past its deadline.
struct SequencedJob {
  double arrival = 0.0;
  double duration = 0.0;
  double start_deadline = 0.0;
};

inline std::optional<std::vector<double>> earliest_start_evaluate(
    std::span<const SequencedJob> sequence) {
  std::vector<double> starts;
  starts.reserve(sequence.size());
  double prev_end = 0.0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    double st = i == 0 ? sequence[i].arrival : std::max(sequence[i].arrival, prev_end);
    if (st > sequence[i].start_deadline + 1e-9) return std::nullopt;
    starts.push_back(st);
    prev_end = st + sequence[i].duration;
  }
  return starts;
}

namespace detail {

struct EngineMode {
  int bid_index = -1;
  double start_deadline = 0.0;
  Money max_weight;  // exact weight for fixed-price modes, peak value otherwise
};

struct EngineJob {
  int input_index = 0;  // position in the caller's job list
  int agent_id = 0;
  double arrival = 0.0;
  double duration = 0.0;
  std::vector<EngineMode> modes;
  Money best_mode_weight;
  // Set for the centralized problem, where the realized weight of a placement
  // is the continuous valuation at the assigned start time.
  const ValueProfile* profile = nullptr;
  const ChargingRequest* request = nullptr;

  Money realized_weight(int mode, double start) const {
    if (profile != nullptr) return value_at(*profile, *request, start);
    return modes[static_cast<std::size_t>(mode)].max_weight;
  }
};

struct PlacedJob {
  int job = 0;   // index into the engine's job array
  int mode = 0;
  double start = 0.0;
  Money realized;
};

// Depth-first branch and bound over (take which mode -> onto which point ->
// at which position) decisions, processing agents in a fixed order. Inserting
// a job re-runs the earliest-start chain of the target point, so every leaf
// is a left-shifted schedule; since weights never increase with later starts,
// some optimal schedule is always left-shifted and the search is exact.
//
// Points are interchangeable, so a job may only open the first still-empty
// point. The upper bound at a node is the realized weight of everything
// placed plus the best mode weight of every undecided job (all scheduling
// constraints dropped), which never underestimates a completion. Ties in the
// objective are broken deterministically by keeping the first optimum found
// in this fixed exploration order.
class BranchAndBound {
 public:
  BranchAndBound(std::vector<EngineJob> jobs, int num_points, const SolverLimits& limits)
      : jobs_(std::move(jobs)), num_points_(num_points), limits_(limits) {
    // EDF-like processing order: first-atom deadline, then input order.
    std::sort(jobs_.begin(), jobs_.end(), [](const EngineJob& a, const EngineJob& b) {
      double da = a.modes.front().start_deadline;
      double db = b.modes.front().start_deadline;
      if (da != db) return da < db;
      return a.input_index < b.input_index;
    });
    suffix_best_.assign(jobs_.size() + 1, kZeroMoney);
    for (std::size_t i = jobs_.size(); i-- > 0;) {
      suffix_best_[i] = suffix_best_[i + 1] + jobs_[i].best_mode_weight;
    }
    machines_.assign(static_cast<std::size_t>(num_points_), {});
  }

  SolveResult run() {
    auto t0 = std::chrono::steady_clock::now();
    dive(0);
    auto t1 = std::chrono::steady_clock::now();
    stats_.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

    SolveResult result;
    result.schedule = best_;
    result.stats = stats_;
    result.proven_optimal = !aborted_;
    result.objective_upper_bound = aborted_ ? max(best_.objective, frontier_bound_)
                                            : best_.objective;
    std::sort(result.schedule.assignments.begin(), result.schedule.assignments.end(),
              [](const Assignment& a, const Assignment& b) { return a.agent_id < b.agent_id; });
    return result;
  }

 private:
  void dive(std::size_t depth) {
    ++stats_.nodes_expanded;
    if (limits_.max_nodes != 0 && stats_.nodes_expanded > limits_.max_nodes && !aborted_) {
      if (limits_.on_budget == NodeBudgetPolicy::kThrow) {
        throw SearchLimitExceeded("search exceeded the node budget of " +
                                  std::to_string(limits_.max_nodes));
      }
      aborted_ = true;
    }
    if (aborted_) {
      // This subtree stays unexplored; its entry bound certifies everything
      // underneath it.
      frontier_bound_ = max(frontier_bound_, placed_total_ + suffix_best_[depth]);
      return;
    }
    if (depth == jobs_.size()) {
      if (!have_best_ || placed_total_ > best_.objective) {
        record_leaf();
      }
      return;
    }
    if (!limits_.disable_bound_pruning && have_best_) {
      Money bound = placed_total_ + suffix_best_[depth];
      if (bound <= best_.objective) {
        ++stats_.pruned_by_bound;
        return;
      }
    }

    const EngineJob& job = jobs_[depth];
    int open_points = 0;
    while (open_points < num_points_ && !machines_[static_cast<std::size_t>(open_points)].empty()) {
      ++open_points;
    }
    int last_point = std::min(open_points, num_points_ - 1);

    // Enumerate every feasible placement with its immediate objective change,
    // then explore the most promising first: a near-greedy first descent
    // gives the bound a strong incumbent to prune against. Ties prefer
    // placements that waste the least idle time and leave empty points free.
    std::vector<PlacementOption> options;
    for (std::size_t mode = 0; mode < job.modes.size(); ++mode) {
      for (int point = 0; point <= last_point; ++point) {
        const auto& seq = machines_[static_cast<std::size_t>(point)];
        for (int pos = static_cast<int>(seq.size()); pos >= 0; --pos) {
          PlacementOption option;
          if (evaluate_insert(point, pos, static_cast<int>(depth), static_cast<int>(mode),
                              option)) {
            options.push_back(option);
          }
        }
      }
    }
    std::sort(options.begin(), options.end(),
              [](const PlacementOption& a, const PlacementOption& b) {
                if (a.delta != b.delta) return a.delta > b.delta;
                if (a.idle != b.idle) return a.idle < b.idle;
                if (a.point != b.point) return a.point < b.point;
                if (a.pos != b.pos) return a.pos > b.pos;
                return a.mode < b.mode;
              });
    for (const PlacementOption& option : options) {
      commit_insert(option, static_cast<int>(depth));
      dive(depth + 1);
      undo_insert();
      if (aborted_) {
        frontier_bound_ = max(frontier_bound_, placed_total_ + suffix_best_[depth]);
        return;
      }
    }
    dive(depth + 1);  // leave this agent out
  }

  struct PlacementOption {
    Money delta;        // objective change: the new job plus successor shifts
    double idle = 0.0;  // gap opened before the inserted job
    double start = 0.0;
    int mode = 0;
    int point = 0;
    int pos = 0;
  };

  // Checks whether jobs_[job] fits at `pos` on `point` (every deadline on the
  // chain still met) and computes the objective change; no state is touched.
  bool evaluate_insert(int point, int pos, int job, int mode, PlacementOption& out) {
    const auto& seq = machines_[static_cast<std::size_t>(point)];
    const EngineJob& jb = jobs_[static_cast<std::size_t>(job)];
    const EngineMode& md = jb.modes[static_cast<std::size_t>(mode)];

    double prev_end = 0.0;
    if (pos > 0) {
      const PlacedJob& before = seq[static_cast<std::size_t>(pos - 1)];
      prev_end = before.start + jobs_[static_cast<std::size_t>(before.job)].duration;
    }
    double start = pos == 0 ? jb.arrival : std::max(jb.arrival, prev_end);
    if (start > md.start_deadline + 1e-9) return false;

    Money delta = jb.realized_weight(mode, start);
    double chain_end = start + jb.duration;
    for (std::size_t i = static_cast<std::size_t>(pos); i < seq.size(); ++i) {
      const EngineJob& other = jobs_[static_cast<std::size_t>(seq[i].job)];
      double ns = std::max(other.arrival, chain_end);
      if (ns > other.modes[static_cast<std::size_t>(seq[i].mode)].start_deadline + 1e-9) {
        return false;
      }
      if (ns != seq[i].start) {
        delta += other.realized_weight(seq[i].mode, ns) - seq[i].realized;
      }
      chain_end = ns + other.duration;
    }
    out.delta = delta;
    out.idle = start - prev_end;
    out.start = start;
    out.mode = mode;
    out.point = point;
    out.pos = pos;
    return true;
  }

  void commit_insert(const PlacementOption& option, int job) {
    auto& seq = machines_[static_cast<std::size_t>(option.point)];
    const EngineJob& jb = jobs_[static_cast<std::size_t>(job)];

    UndoRecord undo;
    undo.point = option.point;
    undo.pos = option.pos;
    undo.old_tail.assign(seq.begin() + option.pos, seq.end());
    undo.old_total = placed_total_;
    undo_stack_.push_back(std::move(undo));

    seq.resize(static_cast<std::size_t>(option.pos));
    PlacedJob placed{job, option.mode, option.start,
                     jb.realized_weight(option.mode, option.start)};
    placed_total_ += placed.realized;
    seq.push_back(placed);
    double end = option.start + jb.duration;
    for (const PlacedJob& old : undo_stack_.back().old_tail) {
      const EngineJob& other = jobs_[static_cast<std::size_t>(old.job)];
      double ns = std::max(other.arrival, end);
      PlacedJob moved = old;
      moved.start = ns;
      moved.realized = other.realized_weight(old.mode, ns);
      placed_total_ += moved.realized - old.realized;
      seq.push_back(moved);
      end = ns + other.duration;
    }
  }

  void undo_insert() {
    UndoRecord& undo = undo_stack_.back();
    auto& seq = machines_[static_cast<std::size_t>(undo.point)];
    seq.resize(static_cast<std::size_t>(undo.pos));
    seq.insert(seq.end(), undo.old_tail.begin(), undo.old_tail.end());
    placed_total_ = undo.old_total;
    undo_stack_.pop_back();
  }

  void record_leaf() {
#ifdef EVAUCTION_DEBUG_INCUMBENTS
    std::fprintf(stderr, "incumbent %lld cents at node %llu\n",
                 static_cast<long long>(placed_total_.cents()),
                 static_cast<unsigned long long>(stats_.nodes_expanded));
#endif
    best_.assignments.clear();
    best_.objective = placed_total_;
    for (int point = 0; point < num_points_; ++point) {
      const auto& seq = machines_[static_cast<std::size_t>(point)];
      for (std::size_t slot = 0; slot < seq.size(); ++slot) {
        const EngineJob& jb = jobs_[static_cast<std::size_t>(seq[slot].job)];
        Assignment a;
        a.agent_id = jb.agent_id;
        a.bid_index = jb.modes[static_cast<std::size_t>(seq[slot].mode)].bid_index;
        a.point_id = point;
        a.position = static_cast<int>(slot);
        a.start_time = seq[slot].start;
        best_.assignments.push_back(a);
      }
    }
    have_best_ = true;
  }

  struct UndoRecord {
    int point = 0;
    int pos = 0;
    std::vector<PlacedJob> old_tail;
    Money old_total;
  };

  std::vector<EngineJob> jobs_;
  int num_points_;
  SolverLimits limits_;
  std::vector<std::vector<PlacedJob>> machines_;
  std::vector<Money> suffix_best_;
  std::vector<UndoRecord> undo_stack_;
  Money placed_total_;
  Schedule best_;
  bool have_best_ = false;
  bool aborted_ = false;
  Money frontier_bound_;
  SearchStats stats_;
};

}  // namespace detail

/// Exact winner determination: picks at most one atom per job and schedules
/// the winners on the available points so that the total weight is maximal.
/// Atoms whose latest start precedes the job's arrival can never be
/// scheduled and are dropped with a warning. Deterministic.
inline SolveResult solve_wdp(const WdpProblem& problem, const SolverLimits& limits = {}) {
  if (static_cast<int>(problem.jobs.size()) > limits.max_agents) {
    throw SearchLimitExceeded("winner determination over " + std::to_string(problem.jobs.size()) +
                              " agents exceeds the limit of " + std::to_string(limits.max_agents));
  }
  if (problem.num_points < 1) throw std::invalid_argument("need at least one charging point");

  SolveResult pre;
  std::vector<detail::EngineJob> jobs;
  jobs.reserve(problem.jobs.size());
  for (std::size_t i = 0; i < problem.jobs.size(); ++i) {
    const WdpJob& in = problem.jobs[i];
    detail::EngineJob job;
    job.input_index = static_cast<int>(i);
    job.agent_id = in.agent_id;
    job.arrival = in.arrival;
    job.duration = in.duration;
    for (const WdpAtom& atom : in.atoms) {
      if (atom.latest_start < in.arrival - 1e-9) {
        pre.warnings.push_back("agent " + std::to_string(in.agent_id) + ": atom " +
                               std::to_string(atom.bid_index) +
                               " has latest start before arrival; dropped");
        continue;
      }
      if (atom.weight < kZeroMoney) throw std::invalid_argument("atom weight must be non-negative");
      job.modes.push_back(detail::EngineMode{atom.bid_index, atom.latest_start, atom.weight});
    }
    if (job.modes.empty()) continue;
    std::sort(job.modes.begin(), job.modes.end(),
              [](const detail::EngineMode& a, const detail::EngineMode& b) {
                if (a.max_weight != b.max_weight) return a.max_weight > b.max_weight;
                return a.bid_index < b.bid_index;
              });
    job.best_mode_weight = job.modes.front().max_weight;
    jobs.push_back(std::move(job));
  }

  detail::BranchAndBound engine(std::move(jobs), problem.num_points, limits);
  SolveResult result = engine.run();
  result.warnings = std::move(pre.warnings);
  return result;
}

/// Exact social-welfare benchmark: selects agents and assigns continuous
/// start times inside their windows so that the total valuation (full value
/// up to the preferred start, linearly discounted after) is maximal.
inline SolveResult solve_centralized(const Instance& instance, const SolverLimits& limits = {}) {
  if (instance.num_agents() > limits.max_agents) {
    throw SearchLimitExceeded("centralized solve over " + std::to_string(instance.num_agents()) +
                              " agents exceeds the limit of " + std::to_string(limits.max_agents));
  }
  std::vector<detail::EngineJob> jobs;
  jobs.reserve(instance.requests.size());
  for (int i = 0; i < instance.num_agents(); ++i) {
    const ChargingRequest& req = instance.requests[i];
    detail::EngineJob job;
    job.input_index = i;
    job.agent_id = req.agent_id;
    job.arrival = req.earliest_arrival;
    job.duration = req.duration;
    job.modes.push_back(
        detail::EngineMode{-1, req.latest_feasible_start(), instance.profiles[i].peak_value});
    job.best_mode_weight = instance.profiles[i].peak_value;
    job.profile = &instance.profiles[static_cast<std::size_t>(i)];
    job.request = &instance.requests[static_cast<std::size_t>(i)];
    jobs.push_back(std::move(job));
  }
  detail::BranchAndBound engine(std::move(jobs), instance.num_points, limits);
  return engine.run();
}

/// Winner determination input built from an instance's full bids, weighted
/// either by reserve price or by step value.
enum class WdpWeights { kReservePrice, kStepValue };

inline WdpProblem wdp_from_instance(const Instance& instance, WdpWeights weights) {
  WdpProblem problem;
  problem.num_points = instance.num_points;
  for (int i = 0; i < instance.num_agents(); ++i) {
    const ChargingRequest& req = instance.requests[i];
    WdpJob job;
    job.agent_id = req.agent_id;
    job.arrival = req.earliest_arrival;
    job.duration = req.duration;
    const auto& values = instance.profiles[static_cast<std::size_t>(i)].bid_values;
    const auto& reserves = instance.reserve_prices[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < values.size(); ++k) {
      Money w = weights == WdpWeights::kStepValue ? values[k] : reserves[k];
      job.atoms.push_back(WdpAtom{static_cast<int>(k), instance.latest_start(i, static_cast<int>(k)), w});
    }
    problem.jobs.push_back(std::move(job));
  }
  return problem;
}

}  // namespace evauction
