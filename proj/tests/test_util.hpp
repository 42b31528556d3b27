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

// Seeded generators for oracle-sized random problems, kept independent of the
// library's own instance generator so the solver cross-checks do not share a
// randomization path with the code under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "evauction/model.hpp"
#include "evauction/money.hpp"
#include "evauction/solver.hpp"

namespace testutil {

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

/// Random winner-determination problem within the enumeration oracle's
/// guards: up to 6 agents, 2 points, 2 atoms per agent, integer weights.
inline evauction::WdpProblem random_wdp(std::uint64_t seed) {
  Rand rng(seed);
  evauction::WdpProblem problem;
  problem.num_points = rng.uniform_int(1, 2);
  int n = rng.uniform_int(1, 6);
  for (int i = 0; i < n; ++i) {
    evauction::WdpJob job;
    job.agent_id = i + 1;
    job.arrival = rng.uniform(9.0, 11.0);
    job.duration = rng.uniform(0.5, 3.0);
    int atoms = rng.uniform_int(1, 2);
    double first = std::floor(job.arrival) + rng.uniform_int(0, 2);
    for (int k = 0; k < atoms; ++k) {
      evauction::WdpAtom atom;
      atom.bid_index = k;
      atom.latest_start = first + k;
      atom.weight = evauction::Money::from_dollars(
          static_cast<std::int64_t>(rng.uniform_int(atoms - k, 20)));
      job.atoms.push_back(atom);
    }
    if (job.atoms.size() == 2 && job.atoms[1].weight > job.atoms[0].weight) {
      std::swap(job.atoms[0].weight, job.atoms[1].weight);
    }
    problem.jobs.push_back(std::move(job));
  }
  return problem;
}

/// Random instance within the centralized oracle's guards: up to 5 agents,
/// 2 points, integer-dollar values with the usual monotone step chains.
inline evauction::Instance random_small_instance(std::uint64_t seed, int max_agents = 5) {
  Rand rng(seed);
  evauction::Instance inst;
  inst.num_points = rng.uniform_int(1, 2);
  inst.rng_seed = seed;
  int n = rng.uniform_int(1, max_agents);
  for (int i = 0; i < n; ++i) {
    evauction::ChargingRequest req;
    req.agent_id = i + 1;
    req.earliest_arrival = rng.uniform(9.0, 11.0);
    req.preferred_start = std::floor(req.earliest_arrival) + rng.uniform_int(1, 2);
    req.duration = rng.uniform(0.5, 3.0);
    int atoms = rng.uniform_int(1, 3);
    req.latest_departure = req.preferred_start + req.duration + (atoms - 1);

    evauction::ValueProfile profile;
    std::int64_t value = rng.uniform_int(6, 15);
    for (int k = 0; k < atoms && value >= 1; ++k) {
      profile.bid_values.push_back(evauction::Money::from_dollars(value));
      value -= rng.uniform_int(2, 3);
    }
    req.latest_departure =
        req.preferred_start + req.duration + (static_cast<int>(profile.bid_values.size()) - 1);
    profile.peak_value = profile.bid_values.front();
    profile.cost_slope = evauction::Money::from_dollars(static_cast<std::int64_t>(2));

    std::vector<evauction::Money> reserves;
    for (const evauction::Money& v : profile.bid_values) {
      auto gap = evauction::Money::from_dollars(static_cast<std::int64_t>(rng.uniform_int(2, 4)));
      reserves.push_back(evauction::max(evauction::kZeroMoney, v - gap));
    }
    inst.requests.push_back(req);
    inst.profiles.push_back(std::move(profile));
    inst.reserve_prices.push_back(std::move(reserves));
  }
  return inst;
}

}  // namespace testutil
