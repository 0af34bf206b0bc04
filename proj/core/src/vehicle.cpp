#include "evcharge/vehicle.hpp"

#include <algorithm>
#include <map>

namespace evcharge {

std::vector<int> Tour::onboard_profile() const {
  std::vector<int> out;
  out.reserve(stops.size());
  int load = onboard_start;
  for (const auto& s : stops) {
    if (s.kind == StopKind::pickup) load += s.passengers;
    if (s.kind == StopKind::dropoff) load -= s.passengers;
    out.push_back(load);
  }
  return out;
}

std::vector<std::string> Tour::problems(int capacity) const {
  std::vector<std::string> out;
  std::map<int, std::size_t> pickup_at;
  for (std::size_t k = 0; k < stops.size(); ++k) {
    const auto& s = stops[k];
    if (s.kind == StopKind::pickup) pickup_at[s.ref] = k;
    if (s.kind == StopKind::dropoff) {
      // A dropoff without a pickup in the tour belongs to a passenger already on board.
      for (std::size_t j = k + 1; j < stops.size(); ++j) {
        if (stops[j].kind == StopKind::pickup && stops[j].ref == s.ref)
          out.push_back("request " + std::to_string(s.ref) + " dropped off before pickup");
      }
    }
    if (k > 0 && s.planned_arrival < stops[k - 1].planned_arrival - 1e-9)
      out.push_back("planned arrivals decrease at stop " + std::to_string(k));
  }
  if (onboard_start < 0 || onboard_start > capacity) out.emplace_back("initial load out of range");
  for (int load : onboard_profile()) {
    if (load < 0 || load > capacity) {
      out.push_back("load " + std::to_string(load) + " outside [0, " + std::to_string(capacity) + "]");
      break;
    }
  }
  return out;
}

void schedule(Tour& tour, const Point& from, double now, const FleetParams& params) {
  Point at = from;
  double t = now;
  for (auto& s : tour.stops) {
    t += travel(at, s.location, params).minutes;
    s.planned_arrival = t;
    at = s.location;
  }
}

double tour_km(const Tour& tour, const Point& from, const FleetParams& params,
               const std::optional<Point>& end) {
  double km = 0.0;
  Point at = from;
  for (const auto& s : tour.stops) {
    km += travel(at, s.location, params).km;
    at = s.location;
  }
  if (end) km += travel(at, *end, params).km;
  return km;
}

const char* to_string(VehicleStatus status) {
  switch (status) {
    case VehicleStatus::idle: return "idle";
    case VehicleStatus::serving: return "serving";
    case VehicleStatus::to_charger: return "to_charger";
    case VehicleStatus::queued: return "queued";
    case VehicleStatus::charging: return "charging";
    case VehicleStatus::deferred: return "deferred";
  }
  return "unknown";
}

namespace {

double leg_fraction(const VehicleState& v, double now, const FleetParams& params) {
  if (!v.moving()) return 0.0;
  const double duration = travel(v.location, v.tour.stops.front().location, params).minutes;
  if (duration <= 0.0) return 1.0;
  return std::clamp((now - v.leg_start) / duration, 0.0, 1.0);
}

}  // namespace

Point VehicleState::position_at(double now, const FleetParams& params) const {
  if (!moving()) return location;
  const double f = leg_fraction(*this, now, params);
  const Point& to = tour.stops.front().location;
  return {location.x + f * (to.x - location.x), location.y + f * (to.y - location.y)};
}

double VehicleState::soc_at(double now, const FleetParams& params) const {
  if (!moving()) return soc;
  const double f = leg_fraction(*this, now, params);
  const double km = travel(location, tour.stops.front().location, params).km;
  return soc - params.efficiency * km * f;
}

}  // namespace evcharge
