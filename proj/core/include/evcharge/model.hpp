#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evcharge {

// Planar coordinates in kilometres.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Default battery of an 8-seat electric minibus (kWh) and its driving efficiency (kWh/km).
inline constexpr double kDefaultBatteryKwh = 35.8;
inline constexpr double kDefaultEfficiencyKwhPerKm = 0.2387;
// Charger power in kWh per minute.
inline constexpr double kSlowPowerKwhPerMin = 22.0 / 60.0;
inline constexpr double kFastPowerKwhPerMin = 50.0 / 60.0;

struct FleetParams {
  double battery_capacity = kDefaultBatteryKwh;     // kWh
  double efficiency = kDefaultEfficiencyKwhPerKm;   // kWh per km
  double e_min = 0.1 * kDefaultBatteryKwh;          // reserve on arrival at a charger
  double e_max = 0.8 * kDefaultBatteryKwh;          // level after every recharge
  double recharge_threshold = 0.2 * kDefaultBatteryKwh;
  int capacity = 8;                                 // passengers per vehicle
  double speed_kmh = 50.0;
  double circuity = 1.0;                            // road / straight-line distance
  double alpha = 0.5;                               // dispatch: operator vs customer weight
  double beta = 0.025;                              // dispatch: future-delay weight on T^2
  double epoch_min = 30.0;
  double horizon_start = 6.5 * 60.0;                // clock minutes
  double horizon_end = 22.0 * 60.0;
  double slow_power = kSlowPowerKwhPerMin;
  double fast_power = kFastPowerKwhPerMin;
  std::optional<double> initial_soc;                // defaults to e_max

  double start_soc() const { return initial_soc.value_or(e_max); }

  // Empty when all invariants hold.
  std::vector<std::string> problems() const;

  // Rescales e_min, e_max and the threshold to 10%, 80% and 20% of a new capacity.
  static FleetParams with_battery(double capacity_kwh);
};

struct Site {
  std::string id;
  Point coord;
  int slow_chargers = 0;
  int fast_charger_cap = 0;
};

struct Depot {
  std::string site;
  int vehicles = 0;
};

enum class ChargerKind { slow, fast };

struct Charger {
  int id = 0;
  int site = 0;  // index into the scenario's site list
  Point location;
  double power = kSlowPowerKwhPerMin;  // kWh per minute
  ChargerKind kind = ChargerKind::slow;
};

// Fast chargers installed per candidate site. Sites absent from the map hold zero.
struct ChargerLayout {
  std::map<std::string, int> counts;

  int total() const;
  int at(const std::string& site) const;
  // Dense vector in the order of `sites`.
  std::vector<int> as_vector(const std::vector<Site>& sites) const;
  static ChargerLayout from_vector(const std::vector<Site>& sites, const std::vector<int>& u);

  friend bool operator==(const ChargerLayout&, const ChargerLayout&) = default;
};

enum class LayoutConstraint { total_mismatch, negative, above_cap };

struct LayoutViolation {
  LayoutConstraint constraint;
  std::string site;  // empty for total_mismatch
  std::string message;
};

// Checks sum(u) == total and 0 <= u_k <= cap_k. Throws InputError if the layout names a site
// that is not in `sites`.
std::vector<LayoutViolation> validate_layout(const ChargerLayout& layout,
                                             const std::vector<Site>& sites, int total);

struct Request {
  int id = 0;
  double arrival = 0.0;  // clock minutes
  Point origin;
  Point destination;
  int passengers = 1;
};

struct Leg {
  double minutes = 0.0;
  double km = 0.0;
};

// Straight-line distance scaled by the circuity factor, driven at constant speed.
Leg travel(const Point& a, const Point& b, const FleetParams& params);

struct Region {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(const Point& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

struct DemandProfile {
  std::array<double, 24> hourly_weights{};
  double trip_len_mean = 11.9;  // km
  double trip_len_var = 23.5;   // km^2
  Region region{0.0, 0.0, 50.0, 50.0};
  double horizon_start = 6.5 * 60.0;
  double horizon_end = 22.0 * 60.0;
  int passengers = 1;

  std::vector<std::string> problems() const;

  // Two-peak weekday shape (7-8h and 17-18h) over a 50x50 km region.
  static DemandProfile weekday();
  static DemandProfile uniform();
};

struct Scenario {
  std::vector<Site> sites;
  std::vector<Depot> depots;
  FleetParams fleet;
  ChargerLayout layout;
  int fast_chargers_total = 0;  // U

  int fleet_size() const;
  std::optional<std::size_t> site_index(const std::string& id) const;
  std::vector<std::string> problems() const;
};

// Slow chargers from the site list plus the fast chargers of `layout`, ids 0..n-1 in site order.
std::vector<Charger> build_chargers(const Scenario& scenario, const ChargerLayout& layout);

}  // namespace evcharge
