#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evcharge/assignment.hpp"
#include "evcharge/model.hpp"
#include "evcharge/vehicle.hpp"

namespace evcharge {

enum class Policy { ncp, fcfs, ocp, ocp_a };

const char* to_string(Policy policy);
std::optional<Policy> parse_policy(const std::string& name);
inline constexpr Policy kAllPolicies[] = {Policy::ncp, Policy::fcfs, Policy::ocp, Policy::ocp_a};

// Epoch h covers [t0 + h*delta, t0 + (h+1)*delta).
struct EpochClock {
  double t0 = 0.0;
  double delta = 30.0;
  int index = 0;

  double start_of(int h) const { return t0 + h * delta; }
  int epoch_of(double t) const;
  double next_boundary(double t) const;
};

// Occupancy of one charger as the dispatching centre sees it.
struct ChargerState {
  struct Waiting {
    int vehicle = 0;
    double arrived = 0.0;
    double session = 0.0;  // minutes of charging needed
  };
  struct Inbound {
    int vehicle = 0;
    double session = 0.0;  // expected minutes of charging on arrival
  };

  Charger charger;
  std::optional<int> current;    // vehicle plugged in
  double session_end = 0.0;      // valid while `current` is set
  std::deque<Waiting> queue;     // FIFO, physically at the charger
  std::vector<Inbound> en_route; // departed towards this charger
  int reservations = 0;          // planned vehicles that have not departed yet

  // Plugged-in or queued vehicles present.
  bool physically_occupied() const { return current.has_value() || !queue.empty(); }
  // Nothing plugged in, queued, driving here or planned here.
  bool free_and_unclaimed() const {
    return !physically_occupied() && en_route.empty() && reservations == 0;
  }
  // Remaining session plus queued sessions.
  double residual_busy(double now) const;
};

// t_j^A: remaining session, queued sessions and sessions of vehicles already driving here.
// Planned vehicles that have not left yet are not counted.
double charger_availability(const ChargerState& charger, double now);

// soc < threshold (strict) and not already flagged or charging.
bool flag_low_battery(const VehicleState& vehicle, double soc, const FleetParams& params);

// Charge left on arrival at `charger`, and whether it respects the e_min reserve.
double arrival_soc(const Point& from, double soc, const Charger& charger, const FleetParams& params);

// Nearest charger (by travel time) that is not physically occupied, among chargers the vehicle
// can reach with the reserve intact; falls back to the nearest reachable one when all are
// occupied. Ties go to the lower charger id. nullopt when no charger is reachable.
std::optional<int> ncp_select(const Point& from, double soc, std::span<const ChargerState> chargers,
                              double now, const FleetParams& params);

struct FcfsEstimate {
  int charger = 0;
  double travel = 0.0;
  double charge = 0.0;
  double wait = 0.0;
  double total = 0.0;
};

// argmin over reachable chargers of travel + (e_max - arrival soc)/power + expected wait, where
// the expected wait is max(0, residual busy time - travel). nullopt signals a stranded vehicle.
std::optional<FcfsEstimate> fcfs_select(const Point& from, double soc,
                                        std::span<const ChargerState> chargers, double now,
                                        const FleetParams& params);

enum class EpochMode { ocp, ocp_a };

struct PlannedCharge {
  int charger = 0;
  double planned_departure = 0.0;
  ArcCost estimate;
};

struct EpochPlan {
  std::map<int, PlannedCharge> plan;  // vehicle id -> planned charge
  std::vector<int> deferred;          // vehicle ids, in pending order
  AssignmentInstance instance;        // vehicle ids are positions in the pending list
  AssignmentSolution solution;
};

// Solves one epoch's assignment. `pending` lists previously deferred vehicles first; earlier
// entries win exact ties. OCP offers every charger with its availability, OCP-A only chargers
// that are free and unclaimed, each with zero availability.
EpochPlan epoch_assign(std::span<const VehicleState* const> pending,
                       std::span<const ChargerState> chargers, EpochMode mode, double now,
                       const FleetParams& params);

}  // namespace evcharge
