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

#include <stdexcept>
#include <string>
#include <vector>

#include "evauction/model.hpp"
#include "evauction/money.hpp"

namespace evauction {

enum class AgentStatus { kActive, kFinal, kWithdrawn };

inline const char* to_string(AgentStatus s) {
  switch (s) {
    case AgentStatus::kActive: return "active";
    case AgentStatus::kFinal: return "final";
    case AgentStatus::kWithdrawn: return "withdrawn";
  }
  return "unknown";
}

/// The subset of an agent's atoms submitted in one round. Unlike the full
/// preference bid, the submitted set may skip hours: the atoms of a round are
/// exactly the utility-maximizing ones and ties need not be adjacent.
struct SubmittedAtom {
  int bid_index = 0;
  double latest_start = 0.0;
  Money price;
};

struct SubmittedBid {
  int agent_id = 0;
  std::vector<SubmittedAtom> atoms;  // ordered by bid_index

  bool operator==(const SubmittedBid& other) const {
    if (agent_id != other.agent_id || atoms.size() != other.atoms.size()) return false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].bid_index != other.atoms[i].bid_index) return false;
      if (atoms[i].price != other.atoms[i].price) return false;
    }
    return true;
  }
};

/// Mutable bidder state owned by the auction engine. Prices start at the
/// reserve, rise by the increment while the agent is left out, and are capped
/// at the value: a rational agent never offers more than a start time is
/// worth to her.
struct AgentState {
  int index = 0;  // position within the instance
  ChargingRequest request;
  ValueProfile profile;
  std::vector<Money> reserve;
  std::vector<Money> prices;
  std::vector<int> submitted_last;  // bid indices submitted in the previous round
  AgentStatus status = AgentStatus::kActive;
  bool selected_last = false;

  int num_atoms() const { return profile.num_atoms(); }

  Money utility(int k) const {
    return profile.bid_values[static_cast<std::size_t>(k)] -
           prices[static_cast<std::size_t>(k)];
  }

  double latest_start(int k) const {
    return request.preferred_start + static_cast<double>(k);
  }
};

inline AgentState make_agent_state(const Instance& instance, int index) {
  AgentState state;
  state.index = index;
  state.request = instance.requests[static_cast<std::size_t>(index)];
  state.profile = instance.profiles[static_cast<std::size_t>(index)];
  state.reserve = instance.reserve_prices[static_cast<std::size_t>(index)];
  state.prices = state.reserve;
  return state;
}

/// All atoms attaining the maximum utility at the current prices, joined as
/// one submission. Ties are included deliberately: equally good start times
/// widen the auctioneer's options without costing the agent anything.
inline SubmittedBid utility_max_bids(const AgentState& state) {
  SubmittedBid bid;
  bid.agent_id = state.request.agent_id;
  Money best = state.utility(0);
  for (int k = 1; k < state.num_atoms(); ++k) best = max(best, state.utility(k));
  for (int k = 0; k < state.num_atoms(); ++k) {
    if (state.utility(k) == best) {
      bid.atoms.push_back(SubmittedAtom{k, state.latest_start(k),
                                        state.prices[static_cast<std::size_t>(k)]});
    }
  }
  return bid;
}

/// Round-one setup: prices drop to the reserve and the agent submits her
/// utility-maximizing atoms (always including the preferred start, which has
/// the highest utility at reserve prices whenever values fall faster than
/// reserves do).
inline SubmittedBid initialize_agent(AgentState& state) {
  if (state.status != AgentStatus::kActive) {
    throw std::logic_error("only active agents can initialize");
  }
  state.prices = state.reserve;
  SubmittedBid bid = utility_max_bids(state);
  state.submitted_last.clear();
  for (const SubmittedAtom& atom : bid.atoms) state.submitted_last.push_back(atom.bid_index);
  return bid;
}

/// The price-update policy. A selected agent repeats her bids unchanged. An
/// unselected agent raises the price of every atom she submitted last round
/// by `epsilon`, never past its value; if all of them were already at their
/// value before the update she has nothing left to concede and enters the
/// final bid status instead.
inline void update_prices(AgentState& state, bool selected_last_round, Money epsilon) {
  if (state.status != AgentStatus::kActive) {
    throw std::logic_error("only active agents update prices");
  }
  if (epsilon <= kZeroMoney) throw std::invalid_argument("epsilon must be positive");
  if (selected_last_round) return;

  bool all_capped = true;
  for (int k : state.submitted_last) {
    if (state.prices[static_cast<std::size_t>(k)] <
        state.profile.bid_values[static_cast<std::size_t>(k)]) {
      all_capped = false;
      break;
    }
  }
  if (all_capped) {
    state.status = AgentStatus::kFinal;
    return;
  }
  for (int k : state.submitted_last) {
    auto idx = static_cast<std::size_t>(k);
    state.prices[idx] = min(state.prices[idx] + epsilon, state.profile.bid_values[idx]);
  }
}

// --- Strategies -------------------------------------------------------------

/// How an agent behaves when she was left out of the provisional schedule.
/// `best_response` raises by the auction increment and resubmits the
/// utility-maximizing atoms; the alternatives exist for strategy experiments.
struct Strategy {
  enum class Kind { kBestResponse, kAggressive, kEarlyFinal, kWithdraw };
  Kind kind = Kind::kBestResponse;
  Money increment_override;  // aggressive: raise by this instead of epsilon
  int trigger_round = 0;     // early_final / withdraw: act from this round on

  static Strategy best_response() { return Strategy{}; }
  static Strategy aggressive(Money increment) {
    Strategy s;
    s.kind = Kind::kAggressive;
    s.increment_override = increment;
    return s;
  }
  static Strategy early_final(int round) {
    Strategy s;
    s.kind = Kind::kEarlyFinal;
    s.trigger_round = round;
    return s;
  }
  static Strategy withdraw(int round) {
    Strategy s;
    s.kind = Kind::kWithdraw;
    s.trigger_round = round;
    return s;
  }
};

/// Parses "best_response", "aggressive:<dollars>", "early_final:<round>" or
/// "withdraw:<round>".
inline Strategy parse_strategy(const std::string& name) {
  auto colon = name.find(':');
  std::string head = name.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  if (head == "best_response") {
    if (!arg.empty()) throw std::invalid_argument("best_response takes no argument");
    return Strategy::best_response();
  }
  if (head == "aggressive") {
    if (arg.empty()) throw std::invalid_argument("aggressive needs an increment, e.g. aggressive:4");
    return Strategy::aggressive(Money::from_dollars(std::stod(arg)));
  }
  if (head == "early_final") {
    if (arg.empty()) throw std::invalid_argument("early_final needs a round, e.g. early_final:2");
    return Strategy::early_final(std::stoi(arg));
  }
  if (head == "withdraw") {
    if (arg.empty()) throw std::invalid_argument("withdraw needs a round, e.g. withdraw:3");
    return Strategy::withdraw(std::stoi(arg));
  }
  throw std::invalid_argument("unknown strategy: " + name);
}

/// Advances one agent at the start of round `round` (round >= 2) under the
/// given strategy, mutating prices and status. The engine recomputes the
/// submission afterwards for agents that stay active.
inline void apply_strategy(AgentState& state, const Strategy& strategy, int round,
                           Money epsilon) {
  if (state.status != AgentStatus::kActive) return;
  switch (strategy.kind) {
    case Strategy::Kind::kBestResponse:
      update_prices(state, state.selected_last, epsilon);
      break;
    case Strategy::Kind::kAggressive: {
      Money inc = max(strategy.increment_override, epsilon);
      update_prices(state, state.selected_last, inc);
      break;
    }
    case Strategy::Kind::kEarlyFinal:
      if (!state.selected_last && round >= strategy.trigger_round) {
        state.status = AgentStatus::kFinal;  // freeze prices from here on
      } else {
        update_prices(state, state.selected_last, epsilon);
      }
      break;
    case Strategy::Kind::kWithdraw:
      // Unconditional exit at the trigger round, selected or not; useful for
      // probing how the schedule degrades when participants leave.
      if (round >= strategy.trigger_round) {
        state.status = AgentStatus::kWithdrawn;
      } else {
        update_prices(state, state.selected_last, epsilon);
      }
      break;
  }
}

}  // namespace evauction
