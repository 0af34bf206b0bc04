#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evcharge/model.hpp"

namespace evcharge {

enum class StopKind { pickup, dropoff, charger, depot };

struct Stop {
  StopKind kind = StopKind::pickup;
  int ref = 0;                  // request id, or charger id for charger stops
  Point location;
  double planned_arrival = 0.0; // clock minutes, filled by schedule()
  int passengers = 0;           // boarding (pickup) or alighting (dropoff) count
  double request_arrival = 0.0; // when the request was placed
};

// Remaining stops of a vehicle, in visiting order.
struct Tour {
  std::vector<Stop> stops;
  int onboard_start = 0;  // passengers on board before the first stop

  bool empty() const { return stops.empty(); }
  // onboard[k] = passengers on board after visiting stops[k].
  std::vector<int> onboard_profile() const;
  // Empty when pickups precede their dropoffs, load stays within [0, capacity] and planned
  // arrivals are non-decreasing.
  std::vector<std::string> problems(int capacity) const;
};

// Recomputes planned arrivals for a vehicle leaving `from` at `now`.
void schedule(Tour& tour, const Point& from, double now, const FleetParams& params);
// Kilometres from `from` through every stop, plus the final leg to `end` when given.
double tour_km(const Tour& tour, const Point& from, const FleetParams& params,
               const std::optional<Point>& end = std::nullopt);

enum class VehicleStatus { idle, serving, to_charger, queued, charging, deferred };

const char* to_string(VehicleStatus status);

struct VehicleState {
  int id = 0;
  int depot_site = 0;
  Point depot;
  Point location;         // where the current leg started (or where the vehicle stands)
  double leg_start = 0.0; // clock time at `location`
  double soc = 0.0;       // kWh at `location`
  Tour tour;
  VehicleStatus status = VehicleStatus::idle;
  bool flagged = false;                 // below the recharge threshold, awaiting or en route
  std::optional<int> planned_charger;   // charger chosen but not yet reached
  double flagged_at = 0.0;

  bool moving() const { return !tour.empty(); }
  // Interpolated position and charge at `now` along the current leg.
  Point position_at(double now, const FleetParams& params) const;
  double soc_at(double now, const FleetParams& params) const;
};

}  // namespace evcharge
