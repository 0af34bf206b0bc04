#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evcharge/model.hpp"

namespace evcharge {

// Reads a scenario JSON file. Missing fleet fields take their defaults. Throws ParseError for
// malformed content and ValidationError when invariants (including the layout's) do not hold.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const nlohmann::json& doc, const std::string& source = "<json>");
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

nlohmann::ordered_json fleet_to_json(const FleetParams& fleet);
nlohmann::ordered_json layout_to_json(const ChargerLayout& layout);
ChargerLayout layout_from_json(const nlohmann::json& doc, const std::string& source = "<json>");

// Demand CSV: header `id,arrival_min,ox_km,oy_km,dx_km,dy_km,passengers`. Lines starting with
// '#' are comments. Returned requests are sorted by arrival (stable on file order).
std::vector<Request> load_demand(const std::string& path);
std::vector<Request> read_demand_csv(std::istream& in, const std::string& source = "<csv>");
void write_demand_csv(std::ostream& out, const std::vector<Request>& requests);

DemandProfile profile_from_json(const nlohmann::json& doc, const std::string& source = "<json>");
nlohmann::ordered_json profile_to_json(const DemandProfile& profile);

struct SyntheticScenarioSpec {
  int sites = 30;
  int slow_chargers_per_site = 1;
  int fast_cap_per_site = 2;
  int depots = 13;
  int vehicles = 50;
  int fast_chargers_total = 10;
  Region region{0.0, 0.0, 50.0, 50.0};
};

// Random site placement in the region; depots sit on the first `depots` sites, vehicles are
// spread over depots as evenly as possible. The initial layout fills sites 0, 1, ... one
// charger each (wrapping while caps allow).
Scenario make_synthetic_scenario(const SyntheticScenarioSpec& spec, std::uint64_t seed);

}  // namespace evcharge
