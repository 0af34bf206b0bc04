#include "evcharge/policies.hpp"

#include <cmath>
#include <limits>

namespace evcharge {

const char* to_string(Policy policy) {
  switch (policy) {
    case Policy::ncp: return "ncp";
    case Policy::fcfs: return "fcfs";
    case Policy::ocp: return "ocp";
    case Policy::ocp_a: return "ocp-a";
  }
  return "?";
}

std::optional<Policy> parse_policy(const std::string& name) {
  for (Policy p : kAllPolicies) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

int EpochClock::epoch_of(double t) const { return static_cast<int>(std::floor((t - t0) / delta)); }

double EpochClock::next_boundary(double t) const { return start_of(epoch_of(t) + 1); }

double ChargerState::residual_busy(double now) const {
  double busy = current ? std::max(0.0, session_end - now) : 0.0;
  for (const auto& w : queue) busy += w.session;
  return busy;
}

double charger_availability(const ChargerState& charger, double now) {
  double t = charger.residual_busy(now);
  for (const auto& e : charger.en_route) t += e.session;
  return t;
}

bool flag_low_battery(const VehicleState& vehicle, double soc, const FleetParams& params) {
  if (vehicle.flagged || vehicle.planned_charger) return false;
  switch (vehicle.status) {
    case VehicleStatus::to_charger:
    case VehicleStatus::queued:
    case VehicleStatus::charging:
    case VehicleStatus::deferred:
      return false;
    default:
      break;
  }
  return soc < params.recharge_threshold;
}

double arrival_soc(const Point& from, double soc, const Charger& charger, const FleetParams& params) {
  return soc - params.efficiency * travel(from, charger.location, params).km;
}

std::optional<int> ncp_select(const Point& from, double soc, std::span<const ChargerState> chargers,
                              double /*now*/, const FleetParams& params) {
  const ChargerState* best_free = nullptr;
  const ChargerState* best_any = nullptr;
  double t_free = std::numeric_limits<double>::infinity();
  double t_any = t_free;
  for (const auto& c : chargers) {
    if (arrival_soc(from, soc, c.charger, params) < params.e_min) continue;
    const double t = travel(from, c.charger.location, params).minutes;
    const auto closer = [&](double t_best, const ChargerState* best) {
      return t < t_best || (t == t_best && best && c.charger.id < best->charger.id);
    };
    if (closer(t_any, best_any)) {
      t_any = t;
      best_any = &c;
    }
    if (!c.physically_occupied() && closer(t_free, best_free)) {
      t_free = t;
      best_free = &c;
    }
  }
  if (best_free) return best_free->charger.id;
  if (best_any) return best_any->charger.id;
  return std::nullopt;
}

std::optional<FcfsEstimate> fcfs_select(const Point& from, double soc,
                                        std::span<const ChargerState> chargers, double now,
                                        const FleetParams& params) {
  std::optional<FcfsEstimate> best;
  for (const auto& c : chargers) {
    const Leg leg = travel(from, c.charger.location, params);
    const double arrive = soc - params.efficiency * leg.km;
    if (arrive < params.e_min) continue;
    FcfsEstimate e;
    e.charger = c.charger.id;
    e.travel = leg.minutes;
    e.charge = std::max(0.0, params.e_max - arrive) / c.charger.power;
    e.wait = std::max(0.0, c.residual_busy(now) - leg.minutes);
    e.total = e.travel + e.charge + e.wait;
    if (!best || e.total < best->total || (e.total == best->total && e.charger < best->charger))
      best = e;
  }
  return best;
}

EpochPlan epoch_assign(std::span<const VehicleState* const> pending,
                       std::span<const ChargerState> chargers, EpochMode mode, double now,
                       const FleetParams& params) {
  EpochPlan out;
  out.instance.params = params;
  for (std::size_t k = 0; k < pending.size(); ++k) {
    const VehicleState& v = *pending[k];
    out.instance.vehicles.push_back(
        {static_cast<int>(k), v.soc_at(now, params), v.position_at(now, params)});
  }
  for (const auto& c : chargers) {
    if (mode == EpochMode::ocp_a) {
      if (!c.free_and_unclaimed()) continue;
      out.instance.chargers.push_back({c.charger.id, c.charger.power, 0.0, c.charger.location});
    } else {
      out.instance.chargers.push_back(
          {c.charger.id, c.charger.power, charger_availability(c, now), c.charger.location});
    }
  }
  out.solution = solve_exact(out.instance);
  for (std::size_t k = 0; k < pending.size(); ++k) {
    const VehicleState& v = *pending[k];
    auto it = out.solution.pairs.find(static_cast<int>(k));
    if (it == out.solution.pairs.end()) {
      out.deferred.push_back(v.id);
      continue;
    }
    PlannedCharge pc;
    pc.charger = it->second;
    pc.estimate = out.solution.per_pair.at(static_cast<int>(k));
    pc.planned_departure = v.tour.empty() ? now : std::max(now, v.tour.stops.back().planned_arrival);
    out.plan[v.id] = pc;
  }
  return out;
}

}  // namespace evcharge
