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

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evauction/auction.hpp"
#include "evauction/genbench.hpp"
#include "evauction/model.hpp"
#include "evauction/money.hpp"

namespace evauction {

inline constexpr const char* kInstanceSchema = "evauction-instance/1";
inline constexpr const char* kTraceSchema = "evauction-trace/1";
inline constexpr const char* kResultsSchema = "evauction-results/1";

/// What the loader changed or noticed while reading an instance file.
/// Source data occasionally carries atoms outside the agent's own window or
/// off the hourly grid; those cannot be scheduled under the bid semantics and
/// are dropped here, recorded rather than repaired silently.
struct LoadReport {
  std::vector<std::string> dropped_atoms;
  std::vector<std::string> notes;
};

namespace detail {

inline double money_to_json(Money m) { return m.dollars(); }

inline Money money_from_json(const nlohmann::json& j) {
  return Money::from_dollars(j.get<double>());
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["schema"] = kInstanceSchema;
  j["m"] = inst.num_points;
  j["seed"] = inst.rng_seed;
  nlohmann::json agents = nlohmann::json::array();
  for (int i = 0; i < inst.num_agents(); ++i) {
    const ChargingRequest& r = inst.requests[static_cast<std::size_t>(i)];
    const ValueProfile& p = inst.profiles[static_cast<std::size_t>(i)];
    nlohmann::json agent;
    agent["id"] = r.agent_id;
    agent["at"] = r.earliest_arrival;
    agent["dt"] = r.latest_departure;
    agent["pst"] = r.preferred_start;
    agent["cd"] = r.duration;
    agent["beta"] = detail::money_to_json(p.cost_slope);
    nlohmann::json values = nlohmann::json::array();
    nlohmann::json reserves = nlohmann::json::array();
    for (std::size_t k = 0; k < p.bid_values.size(); ++k) {
      values.push_back(detail::money_to_json(p.bid_values[k]));
      reserves.push_back(detail::money_to_json(inst.reserve_prices[static_cast<std::size_t>(i)][k]));
    }
    agent["values"] = values;
    agent["reserves"] = reserves;
    agents.push_back(agent);
  }
  j["agents"] = agents;
  return j;
}

inline void save_instance(std::ostream& os, const Instance& inst) {
  os << instance_to_json(inst).dump(2) << "\n";
}

/// Reads an instance file. Agents may carry an explicit `lst` list when the
/// atoms do not simply run pst, pst+1, ...; entries that fall off the hourly
/// chain or outside [pst, dt - cd] are dropped (with their value/reserve
/// entries) and reported.
inline Instance load_instance(const nlohmann::json& j, LoadReport* report = nullptr) {
  if (!j.contains("schema") || j["schema"] != kInstanceSchema) {
    throw std::invalid_argument("not an instance file (expected schema " +
                                std::string(kInstanceSchema) + ")");
  }
  Instance inst;
  inst.num_points = j.at("m").get<int>();
  inst.rng_seed = j.value("seed", std::uint64_t{0});
  double default_beta = j.value("beta", 2.0);

  if (report != nullptr && j.contains("interpretation")) {
    const auto& interp = j["interpretation"];
    if (interp.contains("readings")) {
      for (const auto& line : interp["readings"]) {
        report->notes.push_back(line.get<std::string>());
      }
    }
  }

  for (const auto& agent : j.at("agents")) {
    ChargingRequest request;
    request.agent_id = agent.at("id").get<int>();
    request.earliest_arrival = agent.at("at").get<double>();
    request.latest_departure = agent.at("dt").get<double>();
    request.preferred_start = agent.at("pst").get<double>();
    request.duration = agent.at("cd").get<double>();

    std::vector<Money> raw_values, raw_reserves;
    for (const auto& v : agent.at("values")) raw_values.push_back(detail::money_from_json(v));
    for (const auto& r : agent.at("reserves")) raw_reserves.push_back(detail::money_from_json(r));
    if (raw_values.size() != raw_reserves.size()) {
      throw std::invalid_argument("agent " + std::to_string(request.agent_id) +
                                  ": values and reserves differ in length");
    }

    std::vector<double> lst;
    if (agent.contains("lst")) {
      for (const auto& t : agent["lst"]) lst.push_back(t.get<double>());
      if (lst.size() != raw_values.size()) {
        throw std::invalid_argument("agent " + std::to_string(request.agent_id) +
                                    ": lst list does not match values");
      }
    } else {
      for (std::size_t k = 0; k < raw_values.size(); ++k) {
        lst.push_back(request.preferred_start + static_cast<double>(k));
      }
    }

    // Keep the longest prefix chain pst, pst+1, ... that stays inside the
    // window; everything else cannot be expressed as a valid atom.
    std::vector<Money> values, reserves;
    double window_end = request.latest_feasible_start();
    for (std::size_t k = 0; k < lst.size(); ++k) {
      double expected = request.preferred_start + static_cast<double>(values.size());
      bool keep = is_integer_hour(lst[k]) && std::abs(lst[k] - expected) < 1e-9 &&
                  lst[k] <= window_end + 1e-9;
      if (keep) {
        values.push_back(raw_values[k]);
        reserves.push_back(raw_reserves[k]);
      } else if (report != nullptr) {
        std::ostringstream msg;
        msg << "agent " << request.agent_id << ": dropped atom with latest start " << lst[k];
        report->dropped_atoms.push_back(msg.str());
      }
    }
    if (values.empty()) {
      throw std::invalid_argument("agent " + std::to_string(request.agent_id) +
                                  " has no usable atoms");
    }

    ValueProfile profile;
    profile.peak_value = values.front();
    profile.cost_slope = Money::from_dollars(agent.value("beta", default_beta));
    profile.bid_values = std::move(values);

    inst.requests.push_back(request);
    inst.profiles.push_back(std::move(profile));
    inst.reserve_prices.push_back(std::move(reserves));
  }
  validate_instance(inst);
  return inst;
}

inline Instance load_instance(std::istream& is, LoadReport* report = nullptr) {
  nlohmann::json j;
  is >> j;
  return load_instance(j, report);
}

inline Instance load_instance_file(const std::string& path, LoadReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return load_instance(in, report);
}

// --- Trace files (one JSON record per line) ---------------------------------

inline nlohmann::json schedule_to_json(const Schedule& schedule) {
  nlohmann::json out = nlohmann::json::array();
  for (const Assignment& a : schedule.assignments) {
    nlohmann::json row;
    row["agent"] = a.agent_id;
    row["k"] = a.bid_index;
    row["point"] = a.point_id;
    row["position"] = a.position;
    row["start"] = a.start_time;
    out.push_back(row);
  }
  return out;
}

inline void write_trace(std::ostream& os, const Instance& instance, Money epsilon,
                        const AuctionResult& result) {
  nlohmann::json header;
  header["schema"] = kTraceSchema;
  header["epsilon"] = detail::money_to_json(epsilon);
  header["agents"] = instance.num_agents();
  header["m"] = instance.num_points;
  header["rounds"] = result.rounds.size();
  os << header.dump() << "\n";
  for (const RoundRecord& round : result.rounds) {
    nlohmann::json rec;
    rec["round"] = round.round;
    rec["terminal"] = round.terminal;
    rec["revenue"] = detail::money_to_json(round.revenue);
    nlohmann::json submitted = nlohmann::json::array();
    for (std::size_t i = 0; i < round.submitted.size(); ++i) {
      nlohmann::json bid;
      bid["agent"] = round.submitted[i].agent_id;
      bid["status"] = to_string(round.statuses[i]);
      nlohmann::json atoms = nlohmann::json::array();
      for (const SubmittedAtom& atom : round.submitted[i].atoms) {
        nlohmann::json a;
        a["k"] = atom.bid_index;
        a["lst"] = atom.latest_start;
        a["price"] = detail::money_to_json(atom.price);
        atoms.push_back(a);
      }
      bid["atoms"] = atoms;
      submitted.push_back(bid);
    }
    rec["submitted"] = submitted;
    rec["schedule"] = schedule_to_json(round.provisional);
    nlohmann::json prices = nlohmann::json::array();
    for (const auto& row : round.price_table) {
      nlohmann::json p = nlohmann::json::array();
      for (Money m : row) p.push_back(detail::money_to_json(m));
      prices.push_back(p);
    }
    rec["prices"] = prices;
    os << rec.dump() << "\n";
  }
}

struct ReplayReport {
  bool ok = true;
  int rounds_checked = 0;
  std::vector<std::string> problems;
};

/// Re-validates a recorded trace against its instance: every provisional
/// schedule must pass the schedule checks, every selected atom must have
/// been submitted in that round, start no later than its latest start, and
/// the round revenue must equal the sum of the selected prices.
inline ReplayReport replay_trace(const Instance& instance, std::istream& trace) {
  ReplayReport report;
  auto complain = [&report](int round, const std::string& what) {
    report.ok = false;
    report.problems.push_back("round " + std::to_string(round) + ": " + what);
  };

  std::string line;
  if (!std::getline(trace, line)) {
    report.ok = false;
    report.problems.push_back("empty trace");
    return report;
  }
  nlohmann::json header = nlohmann::json::parse(line);
  if (!header.contains("schema") || header["schema"] != kTraceSchema) {
    report.ok = false;
    report.problems.push_back("missing trace schema header");
    return report;
  }

  while (std::getline(trace, line)) {
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line);
    int round = rec.at("round").get<int>();
    ++report.rounds_checked;

    Schedule schedule;
    for (const auto& row : rec.at("schedule")) {
      Assignment a;
      a.agent_id = row.at("agent").get<int>();
      a.bid_index = row.at("k").get<int>();
      a.point_id = row.at("point").get<int>();
      a.position = row.at("position").get<int>();
      a.start_time = row.at("start").get<double>();
      schedule.assignments.push_back(a);
    }
    schedule.objective = detail::money_from_json(rec.at("revenue"));

    ValidationReport validation = validate_schedule(instance, schedule, nullptr);
    if (!validation.ok()) {
      complain(round, std::string(to_string(validation.violation)) + ": " + validation.detail);
    }

    Money recomputed;
    for (const Assignment& a : schedule.assignments) {
      bool found = false;
      for (const auto& bid : rec.at("submitted")) {
        if (bid.at("agent").get<int>() != a.agent_id) continue;
        for (const auto& atom : bid.at("atoms")) {
          if (atom.at("k").get<int>() == a.bid_index) {
            found = true;
            recomputed += detail::money_from_json(atom.at("price"));
            if (a.start_time > atom.at("lst").get<double>() + 1e-9) {
              complain(round, "agent " + std::to_string(a.agent_id) +
                                  " scheduled past the atom's latest start");
            }
          }
        }
      }
      if (!found) {
        complain(round, "agent " + std::to_string(a.agent_id) +
                            " selected without a matching submitted atom");
      }
    }
    if (recomputed != detail::money_from_json(rec.at("revenue"))) {
      complain(round, "revenue does not match the sum of selected prices");
    }
  }
  return report;
}

// --- Results CSV -------------------------------------------------------------

inline void write_results_csv(std::ostream& os, const std::vector<MetricsReport>& rows) {
  os << "# schema: " << kResultsSchema << "\n";
  os << "group,case_id,seed,epsilon,efficiency,info_eq22,info_per_agent,accommodation,rounds,"
        "auction_ms,central_ms\n";
  os << std::setprecision(10);
  auto opt = [](const std::optional<double>& v) {
    return v.has_value() ? std::to_string(*v) : std::string("nan");
  };
  for (const MetricsReport& row : rows) {
    os << row.group << ',' << row.case_id << ',' << row.seed << ',' << row.epsilon.dollars() << ','
       << opt(row.efficiency) << ',' << opt(row.info_eq22) << ',' << opt(row.info_per_agent) << ','
       << row.accommodation << ',' << row.rounds << ',' << row.auction_ms << ',' << row.central_ms
       << "\n";
  }
}

}  // namespace evauction
