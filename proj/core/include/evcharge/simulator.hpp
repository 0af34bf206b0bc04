#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evcharge/model.hpp"
#include "evcharge/policies.hpp"

namespace evcharge {

enum class EventKind { epoch_tick, charge_done, stop_reached, request_arrival };

// Calendar entry. Same-time events run epoch ticks first, then by kind, then by entity id.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::request_arrival;
  int id = 0;               // request, vehicle, charger or epoch index
  std::uint64_t seq = 0;    // insertion order, last tie-breaker
  std::uint64_t version = 0;
};

bool operator>(const Event& a, const Event& b);

// One row of the optional event log: `time,kind,vehicle,request,charger,soc`.
struct LogEntry {
  double time = 0.0;
  std::string kind;
  int vehicle = -1;
  int request = -1;
  int charger = -1;
  std::optional<double> soc;
};

struct VehicleMetrics {
  int id = 0;
  double access = 0.0;    // T^A: minutes driving to chargers
  double charging = 0.0;  // T^G: minutes plugged in
  double waiting = 0.0;   // T^W: minutes queued at chargers
  double km_driven = 0.0;
  int n_charges = 0;
  double kwh_charged = 0.0;
};

struct RequestMetrics {
  int id = 0;
  bool served = false;
  int vehicle = -1;
  double waited = 0.0;   // pickup - request time
  double journey = 0.0;  // dropoff - request time
};

struct ChargeRecord {
  int vehicle = 0;
  int charger = 0;
  double departed = 0.0;
  double arrived = 0.0;
  double started = 0.0;
  double finished = 0.0;
  double kwh = 0.0;
};

struct EpochRecord {
  double time = 0.0;
  int pending = 0;
  int offered_chargers = 0;
  std::vector<std::pair<int, int>> assigned;  // (vehicle id, charger id)
  std::vector<double> planned_waits;          // W of each assigned arc
  int deferred = 0;
};

struct MetricsReport {
  Policy policy = Policy::ocp_a;
  std::uint64_t seed = 0;
  std::string digest;  // fingerprint of (scenario, layout, demand)

  std::vector<VehicleMetrics> vehicles;
  std::vector<RequestMetrics> requests;
  std::vector<ChargeRecord> charges;
  std::vector<EpochRecord> epochs;
  std::vector<int> unresolved_deferred;  // flagged vehicles never assigned before the drain cap

  double z = 0.0;  // total fleet charging idle time, minutes
  double mwt = 0.0;
  double mjt = 0.0;
  double served_rate = 0.0;
  int served = 0;
  int rejected = 0;
  double total_fleet_wait_hours = 0.0;
  double total_kwh_charged = 0.0;
  double mean_km_per_vehicle = 0.0;
  int reserve_breaches = 0;  // vehicles that had to reach a charger below e_min
  int replans = 0;           // plans cancelled at departure because the charger became unreachable
  double end_time = 0.0;

  std::vector<LogEntry> events;  // only with SimulationOptions::record_events
};

struct SimulationOptions {
  Policy policy = Policy::ocp_a;
  std::uint64_t seed = 0;
  bool record_events = false;
  double max_drain_minutes = 24.0 * 60.0;
};

// Charging minutes needed to go from `soc` to e_max.
double charge_minutes(double soc, double power, const FleetParams& params);

// Vehicle reaches a charger. Starts charging at once (returns the session end) when the charger
// is free and nobody queues, otherwise joins the FIFO queue (returns nullopt).
std::optional<double> charger_arrive(ChargerState& charger, int vehicle, double now, double session);

// Current session ends at `now`; the head of the queue, if any, is plugged in and returned.
std::optional<ChargerState::Waiting> charger_release(ChargerState& charger, double now);

// Simulates one service day from horizon start until every tour and charging session is done.
// Throws ValidationError on an invalid scenario, layout or over-capacity request, InputError on
// a layout naming unknown sites, and ModelViolation when a battery would run empty.
MetricsReport run_simulation(const Scenario& scenario, const ChargerLayout& layout,
                             const std::vector<Request>& demand, const SimulationOptions& options);

double objective(const MetricsReport& report);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 below two values
};

MeanSd mean_sd(const std::vector<double>& xs);

// Per completed recharge: queue wait, access + plug-in time, and their sum.
struct ChargeStats {
  int n = 0;
  MeanSd wait;
  MeanSd time;
  MeanSd total;
};

ChargeStats charge_stats(const MetricsReport& report);

std::string fingerprint(const Scenario& scenario, const ChargerLayout& layout,
                        const std::vector<Request>& demand);

nlohmann::ordered_json report_to_json(const MetricsReport& report, bool with_details = false);
void write_event_log_csv(std::ostream& out, const std::vector<LogEntry>& events);

}  // namespace evcharge
