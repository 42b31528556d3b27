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

#include <ostream>
#include <string>
#include <vector>

#include "evauction/solver.hpp"

namespace evauction {

/// Writes a winner-determination problem as a big-M MILP in CPLEX LP format,
/// so third-party solvers can cross-check the native search. The in-process
/// solver enforces the same feasible set structurally and never materializes
/// H; it exists only in this export.
///
/// Variables: x_<i>_<k> selects atom k of agent i; st_<i> is the continuous
/// start time; y_0_<i> / y_<j>_<i> / y_<i>_end encode first / immediately
/// after j / last on a point; z_<i> linearizes the product "selected and
/// first" that the point-capacity constraint needs.
inline void export_lp(std::ostream& os, const WdpProblem& problem, double big_m = 1e4) {
  const auto& jobs = problem.jobs;
  const std::size_t n = jobs.size();
  auto id = [&](std::size_t i) { return std::to_string(jobs[i].agent_id); };
  auto xvar = [&](std::size_t i, std::size_t k) {
    return "x_" + id(i) + "_" + std::to_string(jobs[i].atoms[k].bid_index);
  };
  auto fmt = [](double v) {
    std::string s = std::to_string(v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  const std::string H = fmt(big_m);

  os << "\\ Winner determination: select at most one atom per agent and\n"
     << "\\ sequence the winners on " << problem.num_points
     << " point(s); big-M linearization with H = " << H << ".\n";
  os << "Maximize\n obj:";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) {
      os << (first ? " " : " + ") << fmt(jobs[i].atoms[k].weight.dollars()) << " " << xvar(i, k);
      first = false;
    }
  }
  if (first) os << " 0 x_dummy";
  os << "\nSubject To\n";

  // One atom per agent.
  for (std::size_t i = 0; i < n; ++i) {
    os << " xor_" << id(i) << ":";
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) {
      os << (k == 0 ? " " : " + ") << xvar(i, k);
    }
    os << " <= 1\n";
  }

  // Window: at * x <= st and st <= lst + H (1 - x).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) {
      os << " win_lo_" << id(i) << "_" << jobs[i].atoms[k].bid_index << ": "
         << fmt(jobs[i].arrival) << " " << xvar(i, k) << " - st_" << id(i) << " <= 0\n";
      os << " win_hi_" << id(i) << "_" << jobs[i].atoms[k].bid_index << ": st_" << id(i) << " + "
         << H << " " << xvar(i, k) << " <= " << fmt(jobs[i].atoms[k].latest_start + big_m) << "\n";
    }
  }

  // Point capacity over "selected and first", via z_i = (sum_k x_i_k) * y_0_i.
  os << " cap:";
  for (std::size_t i = 0; i < n; ++i) os << (i == 0 ? " " : " + ") << "z_" << id(i);
  os << " <= " << problem.num_points << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    os << " z_sel_" << id(i) << ": z_" << id(i);
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) os << " - " << xvar(i, k);
    os << " <= 0\n";
    os << " z_first_" << id(i) << ": z_" << id(i) << " - y_0_" << id(i) << " <= 0\n";
    os << " z_and_" << id(i) << ":";
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) os << (k == 0 ? " " : " + ") << xvar(i, k);
    os << " + y_0_" << id(i) << " - z_" << id(i) << " <= 1\n";
  }

  // A selected agent charges first or right after somebody (and, mirrored,
  // last or right before somebody).
  for (std::size_t i = 0; i < n; ++i) {
    os << " pred_" << id(i) << ": y_0_" << id(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) os << " + y_" << id(j) << "_" << id(i);
    }
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) os << " - " << xvar(i, k);
    os << " = 0\n";
    os << " succ_" << id(i) << ": y_" << id(i) << "_end";
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) os << " + y_" << id(i) << "_" << id(j);
    }
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) os << " - " << xvar(i, k);
    os << " = 0\n";
  }

  // Two selected agents have at most one adjacency direction.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      os << " adj_" << id(i) << "_" << id(j) << ": y_" << id(j) << "_" << id(i) << " + y_" << id(i)
         << "_" << id(j);
      for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) os << " + " << H << " " << xvar(i, k);
      for (std::size_t k = 0; k < jobs[j].atoms.size(); ++k) os << " + " << H << " " << xvar(j, k);
      os << " <= " << fmt(2.0 * big_m + 1.0) << "\n";
    }
  }

  // If i charges immediately after j, i does not start before j completes.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) {
        for (std::size_t kp = 0; kp < jobs[j].atoms.size(); ++kp) {
          os << " seq_" << id(j) << "_" << id(i) << "_" << jobs[i].atoms[k].bid_index << "_"
             << jobs[j].atoms[kp].bid_index << ": st_" << id(j) << " - st_" << id(i) << " + " << H
             << " " << xvar(i, k) << " + " << H << " " << xvar(j, kp) << " + " << H << " y_" << id(j)
             << "_" << id(i) << " <= " << fmt(3.0 * big_m - jobs[j].duration) << "\n";
        }
      }
    }
  }

  os << "Bounds\n";
  for (std::size_t i = 0; i < n; ++i) os << " st_" << id(i) << " >= 0\n";
  os << "Binaries\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < jobs[i].atoms.size(); ++k) os << " " << xvar(i, k) << "\n";
    os << " y_0_" << id(i) << "\n y_" << id(i) << "_end\n z_" << id(i) << "\n";
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) os << " y_" << id(i) << "_" << id(j) << "\n";
    }
  }
  os << "End\n";
}

}  // namespace evauction
