#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "evcharge/demand.hpp"
#include "evcharge/error.hpp"
#include "evcharge/scenario_io.hpp"

using namespace evcharge;

namespace {

const char* kScenario = R"({
  "sites": [
    {"id": "A", "x_km": 0, "y_km": 0, "slow_chargers": 1, "fast_cap": 2},
    {"id": "B", "x_km": 5, "y_km": 5, "slow_chargers": 0, "fast_cap": 1}
  ],
  "depots": [{"site": "A", "vehicles": 3}],
  "fleet": {"capacity": 6},
  "fast_chargers_total": 2,
  "layout": {"A": 1, "B": 1}
})";

}  // namespace

TEST(ScenarioJson, ParsesSitesDepotsFleetAndLayout) {
  const Scenario sc = scenario_from_json(nlohmann::json::parse(kScenario));
  ASSERT_EQ(sc.sites.size(), 2u);
  EXPECT_EQ(sc.sites[1].coord, (Point{5, 5}));
  EXPECT_EQ(sc.fleet_size(), 3);
  EXPECT_EQ(sc.fleet.capacity, 6);
  EXPECT_DOUBLE_EQ(sc.fleet.battery_capacity, 35.8);  // untouched default
  EXPECT_EQ(sc.layout.at("B"), 1);
}

TEST(ScenarioJson, RoundTripsThroughSerialisation) {
  const Scenario a = make_synthetic_scenario({}, 11);
  const Scenario b = scenario_from_json(nlohmann::json::parse(scenario_to_json(a).dump()));
  EXPECT_EQ(scenario_to_json(a).dump(), scenario_to_json(b).dump());
}

TEST(ScenarioJson, AggregatesValidationProblems) {
  auto doc = nlohmann::json::parse(kScenario);
  doc["depots"][0]["site"] = "nowhere";
  doc["layout"]["A"] = 5;
  try {
    scenario_from_json(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.problems().size(), 3u);  // depot site, cap, total
  }
}

TEST(ScenarioJson, MissingFieldNamesThePath) {
  auto doc = nlohmann::json::parse(kScenario);
  doc["sites"][1].erase("x_km");
  try {
    scenario_from_json(doc, "s.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "sites[1].x_km");
    EXPECT_EQ(e.source(), "s.json");
  }
}

TEST(ScenarioJson, SyntaxErrorsCarryALineNumber) {
  const std::string path = ::testing::TempDir() + "broken_scenario.json";
  {
    std::ofstream f(path);
    f << "{\n  \"sites\": [\n    {\"id\": \"A\",,}\n  ]\n}\n";
  }
  try {
    load_scenario(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::remove(path.c_str());
}

TEST(DemandCsv, RoundTripIsExact) {
  const auto demand = generate_demand(DemandProfile::weekday(), 50, 3);
  std::stringstream buf;
  write_demand_csv(buf, demand);
  const auto back = read_demand_csv(buf);
  ASSERT_EQ(back.size(), demand.size());
  for (std::size_t i = 0; i < demand.size(); ++i) {
    EXPECT_EQ(back[i].id, demand[i].id);
    EXPECT_EQ(back[i].arrival, demand[i].arrival);
    EXPECT_EQ(back[i].origin, demand[i].origin);
    EXPECT_EQ(back[i].destination, demand[i].destination);
  }
}

TEST(DemandCsv, SkipsCommentsAndSortsByArrival) {
  std::stringstream in(
      "# generated\n"
      "id,arrival_min,ox_km,oy_km,dx_km,dy_km,passengers\n"
      "0,500,0,0,1,1,1\n"
      "# mid-file comment\n"
      "1,400,0,0,2,2,2\n");
  const auto d = read_demand_csv(in);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].id, 1);
  EXPECT_EQ(d[0].passengers, 2);
}

TEST(DemandCsv, BadCellsReportLineAndField) {
  std::stringstream in(
      "id,arrival_min,ox_km,oy_km,dx_km,dy_km,passengers\n"
      "0,500,0,0,1,1,1\n"
      "1,abc,0,0,2,2,1\n");
  try {
    read_demand_csv(in, "d.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "arrival_min");
  }
}

TEST(DemandCsv, RejectsWrongHeaderAndColumnCount) {
  std::stringstream bad_header("id,time,ox_km,oy_km,dx_km,dy_km,passengers\n");
  EXPECT_THROW(read_demand_csv(bad_header), ParseError);
  std::stringstream short_row(
      "id,arrival_min,ox_km,oy_km,dx_km,dy_km,passengers\n0,1,2,3\n");
  EXPECT_THROW(read_demand_csv(short_row), ParseError);
  std::stringstream empty("");
  EXPECT_THROW(read_demand_csv(empty), ParseError);
}

TEST(DemandCsv, RejectsZeroPassengersAndDegenerateTrips) {
  std::stringstream zero("id,arrival_min,ox_km,oy_km,dx_km,dy_km,passengers\n0,1,0,0,1,1,0\n");
  EXPECT_THROW(read_demand_csv(zero), ParseError);
  std::stringstream same("id,arrival_min,ox_km,oy_km,dx_km,dy_km,passengers\n0,1,2,2,2,2,1\n");
  EXPECT_THROW(read_demand_csv(same), ParseError);
}

TEST(Profile, JsonRoundTrip) {
  DemandProfile p = DemandProfile::weekday();
  p.trip_len_mean = 8.0;
  const DemandProfile q = profile_from_json(nlohmann::json::parse(profile_to_json(p).dump()));
  EXPECT_EQ(q.hourly_weights, p.hourly_weights);
  EXPECT_DOUBLE_EQ(q.trip_len_mean, 8.0);
}

TEST(Synthetic, DeterministicAndValid) {
  SyntheticScenarioSpec spec;
  const Scenario a = make_synthetic_scenario(spec, 5);
  const Scenario b = make_synthetic_scenario(spec, 5);
  EXPECT_EQ(scenario_to_json(a).dump(), scenario_to_json(b).dump());
  EXPECT_TRUE(a.problems().empty());
  EXPECT_EQ(a.fleet_size(), 50);
  EXPECT_EQ(a.sites.size(), 30u);
  EXPECT_EQ(a.layout.total(), 10);
  EXPECT_TRUE(validate_layout(a.layout, a.sites, a.fast_chargers_total).empty());
}
