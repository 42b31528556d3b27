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
#include <numeric>
#include <stdexcept>
#include <vector>

#include "evauction/model.hpp"
#include "evauction/money.hpp"
#include "evauction/solver.hpp"

// Exhaustive reference solvers. Deliberately naive and fully independent of
// the branch-and-bound search path: every subset of atoms (at most one per
// agent), every partition of the chosen jobs onto the points, and every
// per-point permutation, each evaluated by greedy earliest-start placement.

namespace evauction::oracle {

namespace detail {

struct FlatJob {
  double arrival = 0.0;
  double duration = 0.0;
  double deadline = 0.0;       // latest admissible start
  Money fixed_weight;          // winner-determination weight
  const ValueProfile* profile = nullptr;   // set for centralized valuation
  const ChargingRequest* request = nullptr;
};

// All permutations of one point's job set, greedily placed; returns the best
// achievable total weight on that point, or nothing if no order is feasible.
inline std::optional<Money> best_single_point(std::vector<int> members,
                                              const std::vector<FlatJob>& jobs) {
  std::sort(members.begin(), members.end());
  std::optional<Money> best;
  do {
    double prev_end = 0.0;
    Money total;
    bool ok = true;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const FlatJob& job = jobs[static_cast<std::size_t>(members[i])];
      double st = i == 0 ? job.arrival : std::max(job.arrival, prev_end);
      if (st > job.deadline + 1e-9) {
        ok = false;
        break;
      }
      prev_end = st + job.duration;
      total += job.profile != nullptr ? value_at(*job.profile, *job.request, st) : job.fixed_weight;
    }
    if (ok && (!best.has_value() || total > *best)) best = total;
  } while (std::next_permutation(members.begin(), members.end()));
  return best;
}

// Assigns each selected job to a point, then evaluates points independently.
inline void enumerate_partitions(const std::vector<int>& selected, std::size_t next, int num_points,
                                 std::vector<std::vector<int>>& points,
                                 const std::vector<FlatJob>& jobs, Money& best) {
  if (next == selected.size()) {
    Money total;
    for (const auto& members : points) {
      if (members.empty()) continue;
      auto point_best = best_single_point(members, jobs);
      if (!point_best.has_value()) return;
      total += *point_best;
    }
    if (total > best) best = total;
    return;
  }
  for (int p = 0; p < num_points; ++p) {
    points[static_cast<std::size_t>(p)].push_back(selected[next]);
    enumerate_partitions(selected, next + 1, num_points, points, jobs, best);
    points[static_cast<std::size_t>(p)].pop_back();
  }
}

inline Money exhaustive_best(const std::vector<std::vector<FlatJob>>& choices, int num_points) {
  const std::size_t n = choices.size();
  Money best;
  // Per agent: index of the chosen alternative, or -1 for "not selected".
  std::vector<int> choice(n, -1);
  std::vector<FlatJob> picked(n);
  auto recurse = [&](auto&& self, std::size_t agent) -> void {
    if (agent == n) {
      std::vector<int> selected;
      for (std::size_t i = 0; i < n; ++i) {
        if (choice[i] >= 0) selected.push_back(static_cast<int>(i));
      }
      std::vector<std::vector<int>> points(static_cast<std::size_t>(num_points));
      enumerate_partitions(selected, 0, num_points, points, picked, best);
      return;
    }
    choice[agent] = -1;
    self(self, agent + 1);
    for (std::size_t a = 0; a < choices[agent].size(); ++a) {
      choice[agent] = static_cast<int>(a);
      picked[agent] = choices[agent][a];
      self(self, agent + 1);
    }
    choice[agent] = -1;
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace detail

/// Maximum total bid price over every feasible selection and schedule.
/// Guarded against factorial blow-up; meant for small test instances only.
inline Money brute_force_wdp(const WdpProblem& problem) {
  std::size_t total_atoms = 0;
  for (const WdpJob& job : problem.jobs) total_atoms += job.atoms.size();
  if (problem.jobs.size() > 7 || total_atoms > 14 || problem.num_points > 3) {
    throw std::invalid_argument("instance too large for exhaustive enumeration");
  }
  std::vector<std::vector<detail::FlatJob>> choices(problem.jobs.size());
  for (std::size_t i = 0; i < problem.jobs.size(); ++i) {
    for (const WdpAtom& atom : problem.jobs[i].atoms) {
      detail::FlatJob flat;
      flat.arrival = problem.jobs[i].arrival;
      flat.duration = problem.jobs[i].duration;
      flat.deadline = atom.latest_start;
      flat.fixed_weight = atom.weight;
      if (flat.deadline < flat.arrival - 1e-9) continue;  // can never be scheduled
      choices[i].push_back(flat);
    }
  }
  return detail::exhaustive_best(choices, problem.num_points);
}

/// Maximum total valuation over every selection, partition and per-point
/// order, with earliest-start placement and the continuous value function.
inline Money brute_force_centralized(const Instance& instance) {
  if (instance.num_agents() > 7 || instance.num_points > 3) {
    throw std::invalid_argument("instance too large for exhaustive enumeration");
  }
  std::vector<std::vector<detail::FlatJob>> choices(
      static_cast<std::size_t>(instance.num_agents()));
  for (int i = 0; i < instance.num_agents(); ++i) {
    const ChargingRequest& req = instance.requests[static_cast<std::size_t>(i)];
    detail::FlatJob flat;
    flat.arrival = req.earliest_arrival;
    flat.duration = req.duration;
    flat.deadline = req.latest_feasible_start();
    flat.profile = &instance.profiles[static_cast<std::size_t>(i)];
    flat.request = &req;
    choices[static_cast<std::size_t>(i)].push_back(flat);
  }
  return detail::exhaustive_best(choices, instance.num_points);
}

}  // namespace evauction::oracle
