#include "evcharge/dispatch.hpp"

#include <algorithm>
#include <limits>

namespace evcharge {

DispatchCost tour_cost(const Point& from, double now, const Tour& tour, double alpha, double beta,
                       const FleetParams& params) {
  DispatchCost cost;
  Point at = from;
  double t = now;
  for (const auto& s : tour.stops) {
    t += travel(at, s.location, params).minutes;
    at = s.location;
    if (s.kind == StopKind::dropoff) cost.passenger_burden += s.passengers * (t - s.request_arrival);
  }
  cost.travel = t - now;
  cost.combined =
      alpha * cost.travel + (1.0 - alpha) * (beta * cost.travel * cost.travel + cost.passenger_burden);
  return cost;
}

DispatchCost tour_cost(const VehicleState& vehicle, double now, double alpha, double beta,
                       const FleetParams& params) {
  return tour_cost(vehicle.position_at(now, params), now, vehicle.tour, alpha, beta, params);
}

std::vector<Insertion> feasible_insertions(const Tour& tour, int passengers, int capacity) {
  std::vector<Insertion> out;
  const std::size_t n = tour.stops.size();
  const std::vector<int> load = tour.onboard_profile();
  // Load while travelling towards stops[k] is the load after stops[k-1].
  const auto load_before = [&](std::size_t k) { return k == 0 ? tour.onboard_start : load[k - 1]; };
  for (std::size_t p = 0; p <= n; ++p) {
    if (load_before(p) + passengers > capacity) continue;
    for (std::size_t q = p; q <= n; ++q) {
      // Stops p..q-1 are visited with the new passengers aboard.
      if (q > p && load[q - 1] + passengers > capacity) break;
      out.push_back({p, q});
    }
  }
  return out;
}

Tour insert_request(const Tour& tour, const Request& request, const Insertion& at) {
  Tour out;
  out.onboard_start = tour.onboard_start;
  out.stops.reserve(tour.stops.size() + 2);
  const Stop pickup{StopKind::pickup, request.id, request.origin, 0.0, request.passengers,
                    request.arrival};
  const Stop dropoff{StopKind::dropoff, request.id, request.destination, 0.0, request.passengers,
                     request.arrival};
  for (std::size_t k = 0; k <= tour.stops.size(); ++k) {
    if (k == at.pickup_pos) out.stops.push_back(pickup);
    if (k == at.dropoff_pos) out.stops.push_back(dropoff);
    if (k < tour.stops.size()) out.stops.push_back(tour.stops[k]);
  }
  return out;
}

bool accepts_customers(const VehicleState& v) {
  if (v.flagged || v.planned_charger) return false;
  return v.status == VehicleStatus::idle || v.status == VehicleStatus::serving;
}

std::optional<InsertionChoice> best_insertion(const VehicleState& vehicle, const Request& request,
                                              double now, const FleetParams& params) {
  const Point from = vehicle.position_at(now, params);
  const double soc = vehicle.soc_at(now, params);
  const double base = tour_cost(from, now, vehicle.tour, params.alpha, params.beta, params).combined;

  std::optional<InsertionChoice> best;
  for (const Insertion& ins : feasible_insertions(vehicle.tour, request.passengers, params.capacity)) {
    Tour candidate = insert_request(vehicle.tour, request, ins);
    const double km = tour_km(candidate, from, params, vehicle.depot);
    if (soc - params.efficiency * km < params.e_min) continue;
    const double marginal =
        tour_cost(from, now, candidate, params.alpha, params.beta, params).combined - base;
    if (!best || marginal < best->marginal) {
      schedule(candidate, from, now, params);
      best = InsertionChoice{ins, std::move(candidate), marginal};
    }
  }
  return best;
}

std::vector<std::size_t> candidate_vehicles(const Request& request,
                                            const std::vector<VehicleState>& fleet, double now,
                                            const FleetParams& params) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (!accepts_customers(fleet[i])) continue;
    if (best_insertion(fleet[i], request, now, params)) out.push_back(i);
  }
  return out;
}

std::optional<DispatchDecision> dispatch_request(const Request& request,
                                                 const std::vector<VehicleState>& fleet,
                                                 double now, const FleetParams& params) {
  std::optional<DispatchDecision> best;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (!accepts_customers(fleet[i])) continue;
    auto choice = best_insertion(fleet[i], request, now, params);
    if (!choice) continue;
    const bool better =
        !best || choice->marginal < best->choice.marginal ||
        (choice->marginal == best->choice.marginal && fleet[i].id < fleet[best->vehicle].id);
    if (better) best = DispatchDecision{i, std::move(*choice)};
  }
  return best;
}

}  // namespace evcharge
