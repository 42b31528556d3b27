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
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "evauction/money.hpp"

namespace evauction {

// Time is a real-valued hour axis over the day (9.0 == 9 a.m.). Start times
// in the centralized schedule are continuous; only the latest start times
// carried by bids are restricted to integers on this axis.
inline bool is_integer_hour(double t) {
  return std::abs(t - std::llround(t)) < 1e-9;
}

/// One user's charging request: available window, preferred start, duration.
struct ChargingRequest {
  int agent_id = 0;
  double earliest_arrival = 0.0;   // earliest time charging may begin
  double latest_departure = 0.0;   // charging must be finished by this time
  double preferred_start = 0.0;    // start times up to here carry full value
  double duration = 0.0;           // hours of charging required

  double latest_feasible_start() const { return latest_departure - duration; }
};

inline void validate_request(const ChargingRequest& r) {
  if (r.duration <= 0.0) throw std::invalid_argument("charging duration must be positive");
  if (r.earliest_arrival < 0.0) throw std::invalid_argument("arrival time must be non-negative");
  if (r.earliest_arrival > r.preferred_start + 1e-9 ||
      r.preferred_start > r.latest_feasible_start() + 1e-9) {
    throw std::invalid_argument(
        "request window violated: need arrival <= preferred start <= departure - duration");
  }
}

/// A user's private valuation: full value at the preferred start, a linear
/// delay cost for later starts, and the step values attached to each latest
/// start time she may bid on (index k, non-increasing).
struct ValueProfile {
  Money peak_value;
  Money cost_slope;               // dollars per hour of start delay past preferred_start
  std::vector<Money> bid_values;  // bid_values[0] == peak_value

  int num_atoms() const { return static_cast<int>(bid_values.size()); }
};

inline void validate_profile(const ValueProfile& p) {
  if (p.bid_values.empty()) throw std::invalid_argument("profile needs at least one bid value");
  if (p.bid_values.front() != p.peak_value) {
    throw std::invalid_argument("bid_values[0] must equal the peak value");
  }
  for (std::size_t k = 0; k < p.bid_values.size(); ++k) {
    if (p.bid_values[k] < kZeroMoney) throw std::invalid_argument("bid values must be non-negative");
    if (k > 0 && p.bid_values[k] > p.bid_values[k - 1]) {
      throw std::invalid_argument("bid values must be non-increasing in k");
    }
  }
}

/// One offer: the request may start no later than `latest_start` for `price`.
struct AtomicBid {
  int agent_id = 0;
  int bid_index = 0;      // k
  double latest_start = 0.0;
  Money price;
};

/// An agent's complete preference bid: all her atomic bids joined so that at
/// most one can be accepted. Latest start times are integers, one hour apart,
/// starting at the preferred start; prices slope downwards.
struct XorBid {
  int agent_id = 0;
  std::vector<AtomicBid> atoms;  // ordered by bid_index
};

/// Validates the full-bid invariants. The last latest-start normally equals
/// departure - duration; a shorter list is tolerated (some source data ends
/// early) but the list may never extend past the window.
inline void validate_xor_bid(const XorBid& bid, const ChargingRequest& request) {
  if (bid.atoms.empty()) throw std::invalid_argument("xor bid needs at least one atom");
  for (std::size_t k = 0; k < bid.atoms.size(); ++k) {
    const AtomicBid& a = bid.atoms[k];
    if (a.agent_id != bid.agent_id) throw std::invalid_argument("atom agent mismatch");
    if (!is_integer_hour(a.latest_start)) {
      throw std::invalid_argument("latest start times must be integer hours");
    }
    if (a.price < kZeroMoney) throw std::invalid_argument("bid price must be non-negative");
    if (k == 0) {
      if (std::abs(a.latest_start - request.preferred_start) > 1e-9) {
        throw std::invalid_argument("first atom must sit at the preferred start");
      }
    } else {
      if (std::abs(a.latest_start - bid.atoms[k - 1].latest_start - 1.0) > 1e-9) {
        throw std::invalid_argument("consecutive latest starts must differ by one hour");
      }
      if (a.price > bid.atoms[k - 1].price) {
        throw std::invalid_argument("prices must be non-increasing across atoms");
      }
    }
    if (a.latest_start > request.latest_feasible_start() + 1e-9) {
      throw std::invalid_argument("latest start exceeds departure - duration");
    }
  }
}

/// Builds an agent's full XOR bid from a price vector, one atom per hour
/// starting at the preferred start.
inline XorBid make_full_bid(const ChargingRequest& request, const std::vector<Money>& prices) {
  XorBid bid;
  bid.agent_id = request.agent_id;
  bid.atoms.reserve(prices.size());
  for (std::size_t k = 0; k < prices.size(); ++k) {
    bid.atoms.push_back(AtomicBid{request.agent_id, static_cast<int>(k),
                                  request.preferred_start + static_cast<double>(k), prices[k]});
  }
  validate_xor_bid(bid, request);
  return bid;
}

/// A full problem instance: m charging points plus per-agent requests,
/// value profiles and reserve prices (the imposed first-round prices).
struct Instance {
  int num_points = 1;
  std::vector<ChargingRequest> requests;
  std::vector<ValueProfile> profiles;
  std::vector<std::vector<Money>> reserve_prices;
  std::uint64_t rng_seed = 0;

  int num_agents() const { return static_cast<int>(requests.size()); }

  /// Latest start time of atom k for agent index `i` (unit grid from pst).
  double latest_start(int i, int k) const {
    return requests[i].preferred_start + static_cast<double>(k);
  }

  int index_of_agent(int agent_id) const {
    for (int i = 0; i < num_agents(); ++i) {
      if (requests[i].agent_id == agent_id) return i;
    }
    return -1;
  }
};

inline void validate_instance(const Instance& inst) {
  if (inst.num_points < 1) throw std::invalid_argument("need at least one charging point");
  const std::size_t n = inst.requests.size();
  if (inst.profiles.size() != n || inst.reserve_prices.size() != n) {
    throw std::invalid_argument("requests, profiles and reserve prices must have equal length");
  }
  std::unordered_map<int, int> seen;
  for (std::size_t i = 0; i < n; ++i) {
    validate_request(inst.requests[i]);
    validate_profile(inst.profiles[i]);
    if (seen.count(inst.requests[i].agent_id)) {
      throw std::invalid_argument("duplicate agent id");
    }
    seen[inst.requests[i].agent_id] = static_cast<int>(i);
    if (inst.reserve_prices[i].size() != inst.profiles[i].bid_values.size()) {
      throw std::invalid_argument("reserve price list must match the bid value list");
    }
    for (std::size_t k = 0; k < inst.reserve_prices[i].size(); ++k) {
      if (inst.reserve_prices[i][k] > inst.profiles[i].bid_values[k]) {
        throw std::invalid_argument("reserve price exceeds the bid value");
      }
      if (inst.reserve_prices[i][k] < kZeroMoney) {
        throw std::invalid_argument("reserve price must be non-negative");
      }
    }
  }
}

/// One selected agent in a schedule. `bid_index` is -1 when the schedule was
/// produced against the full time window rather than a specific atom.
struct Assignment {
  int agent_id = 0;
  int bid_index = -1;
  int point_id = 0;
  int position = 0;       // sequence slot on the point, 0 = first to charge
  double start_time = 0.0;
};

struct Schedule {
  std::vector<Assignment> assignments;
  Money objective;  // sum of selected prices or values, per the caller

  bool selects(int agent_id) const {
    return std::any_of(assignments.begin(), assignments.end(),
                       [&](const Assignment& a) { return a.agent_id == agent_id; });
  }
  const Assignment* find(int agent_id) const {
    for (const Assignment& a : assignments) {
      if (a.agent_id == agent_id) return &a;
    }
    return nullptr;
  }
};

// --- Operations -----------------------------------------------------------

/// Hours needed to charge a battery of `battery_kwh` from `soc_initial` to
/// `soc_target` at a constant `rate_kw`.
inline double charging_duration(double battery_kwh, double soc_initial, double soc_target,
                                double rate_kw) {
  if (battery_kwh <= 0.0) throw std::invalid_argument("battery capacity must be positive");
  if (rate_kw <= 0.0) throw std::invalid_argument("charging rate must be positive");
  if (soc_initial < 0.0 || soc_target > 1.0 || soc_target <= soc_initial) {
    throw std::invalid_argument("need 0 <= initial SoC < target SoC <= 1");
  }
  return battery_kwh * (soc_target - soc_initial) / rate_kw;
}

/// The continuous valuation: full value up to the preferred start, then a
/// linear cost per hour of delay (never below zero), and zero outside the
/// feasible window.
inline Money value_at(const ValueProfile& profile, const ChargingRequest& request, double start) {
  if (start < request.earliest_arrival - 1e-9) return kZeroMoney;
  if (start > request.latest_feasible_start() + 1e-9) return kZeroMoney;
  if (start <= request.preferred_start + 1e-9) return profile.peak_value;
  Money cost = scale_by_hours(profile.cost_slope, start - request.preferred_start);
  return max(kZeroMoney, profile.peak_value - cost);
}

/// The step-wise valuation used by all auction-side accounting: the value of
/// the earliest atom whose latest start covers `start`, zero past the last.
inline Money step_value_at(const ValueProfile& profile, const XorBid& bid, double start) {
  for (const AtomicBid& atom : bid.atoms) {
    if (start <= atom.latest_start + 1e-9) {
      return profile.bid_values[static_cast<std::size_t>(atom.bid_index)];
    }
  }
  return kZeroMoney;
}

// --- Schedule validation ---------------------------------------------------

enum class ScheduleViolation {
  kNone,
  kDuplicateAgent,    // more than one assignment for an agent
  kUnknownAgent,      // assignment references nobody in the instance
  kUnknownBid,        // bid index out of range for the agent
  kStartsBeforeArrival,
  kStartsAfterDeadline,  // past the atom's latest start / past departure - duration
  kPointCapacity,     // more points used than exist
  kBadPosition,       // positions on a point are not 0..count-1
  kOverlap,           // a job starts before its predecessor completes
};

inline const char* to_string(ScheduleViolation v) {
  switch (v) {
    case ScheduleViolation::kNone: return "ok";
    case ScheduleViolation::kDuplicateAgent: return "duplicate-agent";
    case ScheduleViolation::kUnknownAgent: return "unknown-agent";
    case ScheduleViolation::kUnknownBid: return "unknown-bid";
    case ScheduleViolation::kStartsBeforeArrival: return "starts-before-arrival";
    case ScheduleViolation::kStartsAfterDeadline: return "starts-after-deadline";
    case ScheduleViolation::kPointCapacity: return "point-capacity";
    case ScheduleViolation::kBadPosition: return "bad-position";
    case ScheduleViolation::kOverlap: return "overlap";
  }
  return "unknown";
}

struct ValidationReport {
  ScheduleViolation violation = ScheduleViolation::kNone;
  std::string detail;

  bool ok() const { return violation == ScheduleViolation::kNone; }
};

/// Checks every schedule invariant: one assignment per agent, start times
/// inside the window (and under the chosen atom's latest start when bids are
/// given), point capacity, and non-overlapping sequences per point. Reports
/// the first violation found; never throws.
inline ValidationReport validate_schedule(const Instance& inst, const Schedule& schedule,
                                          const std::vector<XorBid>* bids = nullptr) {
  ValidationReport report;
  auto fail = [&report](ScheduleViolation v, std::string detail) {
    report.violation = v;
    report.detail = std::move(detail);
    return report;
  };

  std::unordered_map<int, int> count_by_agent;
  for (const Assignment& a : schedule.assignments) {
    if (++count_by_agent[a.agent_id] > 1) {
      return fail(ScheduleViolation::kDuplicateAgent,
                  "agent " + std::to_string(a.agent_id) + " assigned twice");
    }
  }

  for (const Assignment& a : schedule.assignments) {
    int idx = inst.index_of_agent(a.agent_id);
    if (idx < 0) {
      return fail(ScheduleViolation::kUnknownAgent,
                  "agent " + std::to_string(a.agent_id) + " not in instance");
    }
    const ChargingRequest& req = inst.requests[idx];
    if (a.start_time < req.earliest_arrival - 1e-9) {
      return fail(ScheduleViolation::kStartsBeforeArrival,
                  "agent " + std::to_string(a.agent_id) + " starts before arrival");
    }
    double deadline = req.latest_feasible_start();
    if (bids != nullptr && a.bid_index >= 0) {
      const XorBid& bid = (*bids)[static_cast<std::size_t>(idx)];
      const AtomicBid* atom = nullptr;
      for (const AtomicBid& candidate : bid.atoms) {
        if (candidate.bid_index == a.bid_index) atom = &candidate;
      }
      if (atom == nullptr) {
        return fail(ScheduleViolation::kUnknownBid,
                    "agent " + std::to_string(a.agent_id) + " bid " + std::to_string(a.bid_index));
      }
      deadline = atom->latest_start;
    }
    if (a.start_time > deadline + 1e-9) {
      return fail(ScheduleViolation::kStartsAfterDeadline,
                  "agent " + std::to_string(a.agent_id) + " starts past its deadline");
    }
  }

  std::unordered_map<int, std::vector<const Assignment*>> by_point;
  for (const Assignment& a : schedule.assignments) {
    by_point[a.point_id].push_back(&a);
  }
  if (static_cast<int>(by_point.size()) > inst.num_points) {
    return fail(ScheduleViolation::kPointCapacity,
                std::to_string(by_point.size()) + " points used, only " +
                    std::to_string(inst.num_points) + " exist");
  }
  for (auto& [point, jobs] : by_point) {
    std::sort(jobs.begin(), jobs.end(),
              [](const Assignment* a, const Assignment* b) { return a->position < b->position; });
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i]->position != static_cast<int>(i)) {
        return fail(ScheduleViolation::kBadPosition,
                    "point " + std::to_string(point) + " has a gap in its sequence");
      }
      if (i > 0) {
        const Assignment& prev = *jobs[i - 1];
        int prev_idx = inst.index_of_agent(prev.agent_id);
        double prev_end = prev.start_time + inst.requests[prev_idx].duration;
        if (jobs[i]->start_time < prev_end - 1e-9) {
          return fail(ScheduleViolation::kOverlap,
                      "agent " + std::to_string(jobs[i]->agent_id) +
                          " starts before its predecessor completes");
        }
      }
    }
  }
  return report;
}

}  // namespace evauction
