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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "evauction/auction.hpp"
#include "evauction/model.hpp"
#include "evauction/money.hpp"
#include "evauction/solver.hpp"

namespace evauction {

/// Distribution parameters for random instances. The defaults model a
/// day-ahead charging station: arrivals in mid-morning, preferred starts one
/// to two hours later, durations scaled by `alpha`, step values tied to the
/// charging duration, and reserve prices a few dollars under the values.
struct GeneratorConfig {
  int num_agents = 6;
  int num_points = 2;
  double alpha = 4.0;         // duration scale: cd ~ alpha * U(0.3, 1)
  double beta = 2.0;          // delay cost in dollars per hour
  double gamma_lo = 2.0, gamma_hi = 3.0;          // peak value ~ gamma * cd
  double arrival_lo = 9.0, arrival_hi = 11.0;     // at ~ U(lo, hi)
  double pst_offset_lo = 1.0, pst_offset_hi = 2.0;
  double duration_lo = 0.3, duration_hi = 1.0;
  double value_step_lo = 2.0, value_step_hi = 3.0;  // per-hour value drop
  double price_gap_lo = 2.0, price_gap_hi = 4.0;    // value minus reserve
  int max_atoms = 5;
  std::uint64_t seed = 0;

  static GeneratorConfig group1(std::uint64_t seed) {
    GeneratorConfig c;
    c.num_agents = 6;
    c.num_points = 2;
    c.seed = seed;
    return c;
  }
  static GeneratorConfig group2(std::uint64_t seed) {
    GeneratorConfig c;
    c.num_agents = 8;
    c.num_points = 2;
    c.seed = seed;
    return c;
  }
  static GeneratorConfig group3(std::uint64_t seed) {
    GeneratorConfig c;
    c.num_agents = 10;
    c.num_points = 3;
    c.seed = seed;
    return c;
  }
  /// The large scalability case: 100 EVs on 20 points, shorter charges,
  /// arrivals spread over the whole morning.
  static GeneratorConfig group_xl(std::uint64_t seed) {
    GeneratorConfig c;
    c.num_agents = 100;
    c.num_points = 20;
    c.alpha = 2.0;
    c.arrival_lo = 6.0;
    c.arrival_hi = 12.0;
    c.seed = seed;
    return c;
  }
  static GeneratorConfig group(const std::string& name, std::uint64_t seed) {
    if (name == "1") return group1(seed);
    if (name == "2") return group2(seed);
    if (name == "3") return group3(seed);
    if (name == "xl") return group_xl(seed);
    throw std::invalid_argument("unknown group: " + name + " (expected 1, 2, 3 or xl)");
  }
};

namespace detail {

// Hand-rolled draws on top of mt19937_64 so that generated instances are
// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
  std::int64_t uniform_dollars(double lo, double hi) { return std::llround(uniform(lo, hi)); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

/// Draws one instance. Deterministic under the seed. Value chains are drawn
/// stepwise in whole dollars and truncated before they reach zero, so every
/// emitted atom keeps a positive value and reserve <= value holds atom-wise.
inline Instance generate(const GeneratorConfig& config) {
  if (config.num_agents < 1 || config.num_points < 1) {
    throw std::invalid_argument("need at least one agent and one point");
  }
  if (config.max_atoms < 1) throw std::invalid_argument("max_atoms must be at least 1");

  detail::Rng rng(config.seed);
  Instance inst;
  inst.num_points = config.num_points;
  inst.rng_seed = config.seed;

  for (int i = 0; i < config.num_agents; ++i) {
    constexpr int kMaxRetries = 100;
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
      double arrival = rng.uniform(config.arrival_lo, config.arrival_hi);
      // Latest start times are integer hours, so the preferred start that
      // anchors them lands on the integer grid.
      double pst = static_cast<double>(std::llround(arrival + rng.uniform(config.pst_offset_lo,
                                                                          config.pst_offset_hi)));
      double duration = config.alpha * rng.uniform(config.duration_lo, config.duration_hi);
      int want_atoms = rng.uniform_int(1, config.max_atoms);

      std::int64_t peak = std::llround(rng.uniform(config.gamma_lo, config.gamma_hi) * duration);
      if (peak < 1) continue;  // degenerate draw, retry this agent

      std::vector<Money> values{Money::from_dollars(peak)};
      for (int k = 1; k < want_atoms; ++k) {
        std::int64_t next = peak - rng.uniform_dollars(config.value_step_lo, config.value_step_hi);
        if (next < 1) break;  // truncate the chain instead of going non-positive
        values.push_back(Money::from_dollars(next));
        peak = next;
      }
      int atoms = static_cast<int>(values.size());

      std::vector<Money> reserves;
      reserves.reserve(values.size());
      for (const Money& v : values) {
        std::int64_t gap = rng.uniform_dollars(config.price_gap_lo, config.price_gap_hi);
        reserves.push_back(max(kZeroMoney, v - Money::from_dollars(gap)));
      }

      ChargingRequest request;
      request.agent_id = i + 1;
      request.earliest_arrival = arrival;
      request.preferred_start = pst;
      request.duration = duration;
      request.latest_departure = pst + duration + static_cast<double>(atoms - 1);

      ValueProfile profile;
      profile.peak_value = values.front();
      profile.cost_slope = Money::from_dollars(config.beta);
      profile.bid_values = std::move(values);

      inst.requests.push_back(request);
      inst.profiles.push_back(std::move(profile));
      inst.reserve_prices.push_back(std::move(reserves));
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("generator failed to draw agent " + std::to_string(i + 1) +
                               " after repeated retries");
    }
  }
  validate_instance(inst);
  return inst;
}

// --- Metrics ----------------------------------------------------------------

/// Sum of the winners' step values in the final schedule.
inline Money final_schedule_value(const Instance& instance, const AuctionResult& result) {
  Money total;
  for (const Assignment& a : result.final_schedule.assignments) {
    int idx = instance.index_of_agent(a.agent_id);
    total += instance.profiles[static_cast<std::size_t>(idx)]
                 .bid_values[static_cast<std::size_t>(a.bid_index)];
  }
  return total;
}

/// Auction value over the centralized optimum; empty when the optimum is
/// zero (the ratio is undefined then).
inline std::optional<double> efficiency(const Instance& instance, const AuctionResult& result,
                                        const Schedule& optimal) {
  if (optimal.objective == kZeroMoney) return std::nullopt;
  Money value = final_schedule_value(instance, result);
  return static_cast<double>(value.cents()) / static_cast<double>(optimal.objective.cents());
}

/// How much of their value the winners had to reveal. `eq22_ratio` divides
/// the summed final prices by the summed values over the winning atoms;
/// `per_agent_mean` averages the per-winner price/value ratio instead. Both
/// are reported because the two readings differ on heterogeneous winners.
struct InfoRevelation {
  std::optional<double> eq22_ratio;
  std::optional<double> per_agent_mean;
};

inline InfoRevelation info_revelation(const Instance& instance, const AuctionResult& result) {
  InfoRevelation info;
  Money price_sum, value_sum;
  double ratio_sum = 0.0;
  int winners = 0;
  for (const Assignment& a : result.final_schedule.assignments) {
    int idx = instance.index_of_agent(a.agent_id);
    Money price = result.payments[static_cast<std::size_t>(idx)];
    Money value = instance.profiles[static_cast<std::size_t>(idx)]
                      .bid_values[static_cast<std::size_t>(a.bid_index)];
    price_sum += price;
    value_sum += value;
    if (value > kZeroMoney) {
      ratio_sum += static_cast<double>(price.cents()) / static_cast<double>(value.cents());
      ++winners;
    }
  }
  if (value_sum > kZeroMoney) {
    info.eq22_ratio = static_cast<double>(price_sum.cents()) / static_cast<double>(value_sum.cents());
  }
  if (winners > 0) info.per_agent_mean = ratio_sum / winners;
  return info;
}

/// Number of agents in the final schedule.
inline int accommodation(const AuctionResult& result) {
  return static_cast<int>(result.final_schedule.assignments.size());
}

struct MetricsReport {
  std::string group;
  int case_id = 0;
  std::uint64_t seed = 0;
  Money epsilon;
  std::optional<double> efficiency;
  std::optional<double> info_eq22;
  std::optional<double> info_per_agent;
  int accommodation = 0;
  int rounds = 0;
  double auction_ms = 0.0;
  double central_ms = 0.0;
  Money auction_revenue;
  Money central_objective;
};

/// Generates, solves the centralized benchmark, runs the auction per
/// increment, and aggregates one metrics row per (case, epsilon) cell.
/// Timings cover only the solve and bidding loops.
struct ExperimentSpec {
  std::vector<std::string> groups{"1", "2", "3"};
  std::vector<Money> epsilons{Money::from_dollars(static_cast<std::int64_t>(1)),
                              Money::from_dollars(static_cast<std::int64_t>(2))};
  std::vector<std::uint64_t> seeds;
  SolverLimits solver_limits;
};

inline std::vector<MetricsReport> run_experiment(const ExperimentSpec& spec) {
  using clock = std::chrono::steady_clock;
  std::vector<MetricsReport> rows;
  for (const std::string& group : spec.groups) {
    int case_id = 0;
    for (std::uint64_t seed : spec.seeds) {
      ++case_id;
      Instance instance = generate(GeneratorConfig::group(group, seed));

      auto c0 = clock::now();
      SolveResult central = solve_centralized(instance, spec.solver_limits);
      double central_ms = std::chrono::duration<double, std::milli>(clock::now() - c0).count();

      for (Money eps : spec.epsilons) {
        AuctionConfig config;
        config.epsilon = eps;
        config.solver_limits = spec.solver_limits;

        auto a0 = clock::now();
        AuctionResult result = run_auction(instance, config);
        double auction_ms = std::chrono::duration<double, std::milli>(clock::now() - a0).count();

        MetricsReport row;
        row.group = group;
        row.case_id = case_id;
        row.seed = seed;
        row.epsilon = eps;
        row.efficiency = efficiency(instance, result, central.schedule);
        InfoRevelation info = info_revelation(instance, result);
        row.info_eq22 = info.eq22_ratio;
        row.info_per_agent = info.per_agent_mean;
        row.accommodation = accommodation(result);
        row.rounds = static_cast<int>(result.rounds.size());
        row.auction_ms = auction_ms;
        row.central_ms = central_ms;
        row.auction_revenue = result.revenue();
        row.central_objective = central.schedule.objective;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace evauction
