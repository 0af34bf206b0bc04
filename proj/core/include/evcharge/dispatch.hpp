#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "evcharge/model.hpp"
#include "evcharge/vehicle.hpp"

namespace evcharge {

struct DispatchCost {
  double travel = 0.0;            // T: minutes to finish the tour
  double passenger_burden = 0.0;  // sum over assigned passengers of wait + ride, minutes
  double combined = 0.0;          // alpha*T + (1 - alpha)*(beta*T^2 + burden)
};

// Cost of a vehicle that leaves `from` at `now` and drives `tour`. Each passenger contributes
// (dropoff time - request time), which is its waiting plus riding time.
DispatchCost tour_cost(const Point& from, double now, const Tour& tour, double alpha, double beta,
                       const FleetParams& params);
DispatchCost tour_cost(const VehicleState& vehicle, double now, double alpha, double beta,
                       const FleetParams& params);

struct Insertion {
  std::size_t pickup_pos = 0;   // index in the original stop list before which the pickup goes
  std::size_t dropoff_pos = 0;  // same for the dropoff, pickup_pos <= dropoff_pos

  friend bool operator==(const Insertion&, const Insertion&) = default;
};

// All (p, q) with p <= q that keep the load within `capacity`. Existing stops keep their order.
std::vector<Insertion> feasible_insertions(const Tour& tour, int passengers, int capacity);

Tour insert_request(const Tour& tour, const Request& request, const Insertion& at);

// True when the vehicle may take new customers at all: not flagged, no charging plan and not
// busy with charging.
bool accepts_customers(const VehicleState& vehicle);

struct InsertionChoice {
  Insertion insertion;
  Tour tour;               // scheduled tour after insertion
  double marginal = 0.0;   // c(v, new tour) - c(v, old tour)
};

// Cheapest capacity- and energy-feasible insertion for one vehicle. Energy-feasible means the
// charge left after the new tour plus the leg back to the depot stays >= e_min.
std::optional<InsertionChoice> best_insertion(const VehicleState& vehicle, const Request& request,
                                              double now, const FleetParams& params);

// Vehicles (by index into `fleet`) that accept customers and admit an energy-feasible insertion.
std::vector<std::size_t> candidate_vehicles(const Request& request,
                                            const std::vector<VehicleState>& fleet, double now,
                                            const FleetParams& params);

struct DispatchDecision {
  std::size_t vehicle = 0;  // index into the fleet
  InsertionChoice choice;
};

// Minimum marginal cost over all candidates and insertions; ties go to the lower vehicle id.
// nullopt means the request is rejected.
std::optional<DispatchDecision> dispatch_request(const Request& request,
                                                 const std::vector<VehicleState>& fleet,
                                                 double now, const FleetParams& params);

}  // namespace evcharge
