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

#include <catch2/catch_amalgamated.hpp>

#include "evauction/agents.hpp"
#include "evauction/model.hpp"

using namespace evauction;

namespace {

Money dollars(std::int64_t d) { return Money::from_dollars(d); }

AgentState state_with(std::vector<std::int64_t> values, std::vector<std::int64_t> reserves,
                      double at = 9.0, double pst = 10.0, double cd = 2.0) {
  AgentState s;
  s.index = 0;
  s.request.agent_id = 1;
  s.request.earliest_arrival = at;
  s.request.preferred_start = pst;
  s.request.duration = cd;
  s.request.latest_departure = pst + cd + static_cast<double>(values.size() - 1);
  for (std::int64_t v : values) s.profile.bid_values.push_back(dollars(v));
  s.profile.peak_value = s.profile.bid_values.front();
  s.profile.cost_slope = dollars(2);
  for (std::int64_t r : reserves) s.reserve.push_back(dollars(r));
  s.prices = s.reserve;
  return s;
}

std::vector<int> atom_indices(const SubmittedBid& bid) {
  std::vector<int> ks;
  for (const SubmittedAtom& a : bid.atoms) ks.push_back(a.bid_index);
  return ks;
}

}  // namespace

TEST_CASE("first-round bids maximize utility at the reserve") {
  SECTION("unique argmax: only the preferred start") {
    AgentState s = state_with({14, 12, 10}, {10, 9, 8});  // utilities 4, 3, 2
    SubmittedBid bid = initialize_agent(s);
    CHECK(atom_indices(bid) == std::vector<int>{0});
    CHECK(bid.atoms[0].price == dollars(10));
    CHECK(bid.atoms[0].latest_start == Catch::Approx(10.0));
  }
  SECTION("tied utilities join both atoms in one bid") {
    AgentState s = state_with({8, 6}, {5, 3});  // utilities 3, 3
    SubmittedBid bid = initialize_agent(s);
    CHECK(atom_indices(bid) == std::vector<int>{0, 1});
  }
  SECTION("worked-example agent 1 opens with her preferred start at $10") {
    AgentState s = state_with({13, 10, 8, 5, 4}, {10, 8, 5, 3, 2});
    SubmittedBid bid = initialize_agent(s);
    // Utilities (3, 2, 3, 2, 2): the preferred start is always in the set.
    CHECK(atom_indices(bid) == std::vector<int>{0, 2});
    CHECK(bid.atoms[0].bid_index == 0);
    CHECK(bid.atoms[0].price == dollars(10));
  }
}

TEST_CASE("price updates follow the increment policy") {
  SECTION("selected agents repeat") {
    AgentState s = state_with({14, 12}, {10, 9});
    initialize_agent(s);
    std::vector<Money> before = s.prices;
    update_prices(s, /*selected_last_round=*/true, dollars(2));
    CHECK(s.prices == before);
    CHECK(s.status == AgentStatus::kActive);
  }

  SECTION("unselected agents raise their last-round atoms by epsilon") {
    AgentState s = state_with({14, 12}, {10, 9});
    initialize_agent(s);  // submits atom 0 only
    update_prices(s, false, dollars(2));
    CHECK(s.prices[0] == dollars(12));
    CHECK(s.prices[1] == dollars(9));  // untouched: not submitted yet
  }

  SECTION("the raise is capped at the value") {
    AgentState s = state_with({14, 12}, {13, 12});  // utilities 1, 0: atom 0 wins
    initialize_agent(s);
    update_prices(s, false, dollars(2));
    CHECK(s.prices[0] == dollars(14));
    CHECK(s.status == AgentStatus::kActive);
  }

  SECTION("an agent with nothing left to concede goes final") {
    AgentState s = state_with({14, 12}, {14, 9});  // atom 0 already at value
    initialize_agent(s);                           // argmax is atom 1 (utility 3 beats 0)
    CHECK(atom_indices(utility_max_bids(s)) == std::vector<int>{1});
    s.submitted_last = {0};  // force the capped atom as her last submission
    update_prices(s, false, dollars(2));
    CHECK(s.status == AgentStatus::kFinal);
    CHECK(s.prices[0] == dollars(14));  // unchanged
  }

  SECTION("epsilon must be positive") {
    AgentState s = state_with({14, 12}, {10, 9});
    initialize_agent(s);
    CHECK_THROWS_AS(update_prices(s, false, kZeroMoney), std::invalid_argument);
  }
}

TEST_CASE("utility-maximizing bids include every tie") {
  SECTION("unique maximum") {
    AgentState s = state_with({10, 8, 6}, {6, 6, 5});  // utilities 4, 2, 1
    CHECK(atom_indices(utility_max_bids(s)) == std::vector<int>{0});
  }
  SECTION("partial tie") {
    AgentState s = state_with({10, 8, 6}, {8, 6, 6});  // utilities 2, 2, 0
    CHECK(atom_indices(utility_max_bids(s)) == std::vector<int>{0, 1});
  }
  SECTION("all prices at value: everything is submitted at zero utility") {
    AgentState s = state_with({10, 8, 6}, {10, 8, 6});
    CHECK(atom_indices(utility_max_bids(s)) == std::vector<int>{0, 1, 2});
  }
  SECTION("submitted atoms always carry monotone prices") {
    // Equal utility forces price differences to equal value differences,
    // so the submitted subset slopes downward even when it skips hours.
    AgentState s = state_with({13, 10, 8, 5, 4}, {10, 8, 5, 3, 2});
    SubmittedBid bid = utility_max_bids(s);
    for (std::size_t i = 1; i < bid.atoms.size(); ++i) {
      CHECK(bid.atoms[i].price <= bid.atoms[i - 1].price);
    }
  }
}

TEST_CASE("strategies modify only the update step") {
  SECTION("aggressive raises faster but still caps at the value") {
    AgentState s = state_with({14, 12}, {10, 9});
    initialize_agent(s);
    s.selected_last = false;
    apply_strategy(s, Strategy::aggressive(dollars(5)), 2, dollars(2));
    CHECK(s.prices[0] == dollars(14));  // 10 + 5, capped at the value 14
  }
  SECTION("early final freezes prices from the trigger round") {
    AgentState s = state_with({14, 12}, {10, 9});
    initialize_agent(s);
    s.selected_last = false;
    apply_strategy(s, Strategy::early_final(3), 2, dollars(2));
    CHECK(s.status == AgentStatus::kActive);  // trigger not reached: normal raise
    CHECK(s.prices[0] == dollars(12));
    apply_strategy(s, Strategy::early_final(3), 3, dollars(2));
    CHECK(s.status == AgentStatus::kFinal);
    CHECK(s.prices[0] == dollars(12));
  }
  SECTION("withdraw leaves the auction") {
    AgentState s = state_with({14, 12}, {10, 9});
    initialize_agent(s);
    s.selected_last = false;
    apply_strategy(s, Strategy::withdraw(2), 2, dollars(2));
    CHECK(s.status == AgentStatus::kWithdrawn);
  }
}

TEST_CASE("strategy names parse") {
  CHECK(parse_strategy("best_response").kind == Strategy::Kind::kBestResponse);
  Strategy a = parse_strategy("aggressive:4");
  CHECK(a.kind == Strategy::Kind::kAggressive);
  CHECK(a.increment_override == dollars(4));
  Strategy e = parse_strategy("early_final:2");
  CHECK(e.kind == Strategy::Kind::kEarlyFinal);
  CHECK(e.trigger_round == 2);
  Strategy w = parse_strategy("withdraw:3");
  CHECK(w.kind == Strategy::Kind::kWithdraw);
  CHECK(w.trigger_round == 3);
  CHECK_THROWS_AS(parse_strategy("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy("aggressive"), std::invalid_argument);
}
