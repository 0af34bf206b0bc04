#include "evcharge/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <queue>
#include <sstream>

#include "evcharge/dispatch.hpp"
#include "evcharge/error.hpp"
#include "evcharge/scenario_io.hpp"

namespace evcharge {

bool operator>(const Event& a, const Event& b) {
  if (a.time != b.time) return a.time > b.time;
  if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
  if (a.id != b.id) return a.id > b.id;
  return a.seq > b.seq;
}

double charge_minutes(double soc, double power, const FleetParams& params) {
  return std::max(0.0, params.e_max - soc) / power;
}

std::optional<double> charger_arrive(ChargerState& charger, int vehicle, double now, double session) {
  if (!charger.physically_occupied()) {
    charger.current = vehicle;
    charger.session_end = now + session;
    return charger.session_end;
  }
  charger.queue.push_back({vehicle, now, session});
  return std::nullopt;
}

std::optional<ChargerState::Waiting> charger_release(ChargerState& charger, double now) {
  charger.current.reset();
  if (charger.queue.empty()) return std::nullopt;
  ChargerState::Waiting next = charger.queue.front();
  charger.queue.pop_front();
  charger.current = next.vehicle;
  charger.session_end = now + next.session;
  return next;
}

namespace {

class Simulation {
 public:
  Simulation(const Scenario& scenario, const ChargerLayout& layout,
             const std::vector<Request>& demand, const SimulationOptions& options)
      : params_(scenario.fleet), demand_(demand), options_(options) {
    clock_.t0 = params_.horizon_start;
    clock_.delta = params_.epoch_min;
    for (const Charger& c : build_chargers(scenario, layout)) {
      ChargerState s;
      s.charger = c;
      chargers_.push_back(std::move(s));
    }
    int next_id = 0;
    for (const auto& depot : scenario.depots) {
      const auto site = scenario.site_index(depot.site);
      if (!site) throw InputError("depot references unknown site '" + depot.site + "'");
      for (int i = 0; i < depot.vehicles; ++i) {
        VehicleState v;
        v.id = next_id++;
        v.depot_site = static_cast<int>(*site);
        v.depot = scenario.sites[*site].coord;
        v.location = v.depot;
        v.leg_start = params_.horizon_start;
        v.soc = params_.start_soc();
        fleet_.push_back(std::move(v));
      }
    }
    report_.policy = options.policy;
    report_.seed = options.seed;
    report_.vehicles.resize(fleet_.size());
    for (std::size_t i = 0; i < fleet_.size(); ++i) report_.vehicles[i].id = fleet_[i].id;
    report_.requests.resize(demand_.size());
    open_charge_.resize(fleet_.size());
    versions_.assign(fleet_.size(), 0);
  }

  MetricsReport run() {
    const double t0 = params_.horizon_start;
    for (std::size_t r = 0; r < demand_.size(); ++r) {
      report_.requests[r].id = demand_[r].id;
      push(demand_[r].arrival, EventKind::request_arrival, static_cast<int>(r));
    }
    for (auto& v : fleet_) {
      check_flag(v, t0);
      if (v.flagged) vehicle_free(v);
    }
    if (epoch_policy()) push(t0, EventKind::epoch_tick, 0);

    const double cutoff = params_.horizon_end + options_.max_drain_minutes;
    while (!calendar_.empty()) {
      const Event ev = calendar_.top();
      calendar_.pop();
      if (ev.time > cutoff) break;
      now_ = ev.time;
      switch (ev.kind) {
        case EventKind::epoch_tick: on_epoch(ev.id); break;
        case EventKind::charge_done: on_charge_done(ev.id); break;
        case EventKind::stop_reached: on_stop(ev.id, ev.version); break;
        case EventKind::request_arrival: on_request(static_cast<std::size_t>(ev.id)); break;
      }
    }
    finish();
    return std::move(report_);
  }

 private:
  bool epoch_policy() const {
    return options_.policy == Policy::ocp || options_.policy == Policy::ocp_a;
  }

  void push(double time, EventKind kind, int id, std::uint64_t version = 0) {
    calendar_.push({time, kind, id, seq_++, version});
  }

  void log(const char* kind, int vehicle = -1, int request = -1, int charger = -1,
           std::optional<double> soc = std::nullopt) {
    if (options_.record_events) report_.events.push_back({now_, kind, vehicle, request, charger, soc});
  }

  // Moves the vehicle's leg origin to its interpolated position at now_.
  void advance(VehicleState& v) {
    if (!v.moving()) return;
    const Point here = v.position_at(now_, params_);
    const double km = travel(v.location, here, params_).km;
    v.soc -= params_.efficiency * km;
    report_.vehicles[v.id].km_driven += km;
    v.location = here;
    v.leg_start = now_;
  }

  void start_leg(VehicleState& v) {
    ++versions_[v.id];
    v.leg_start = now_;
    schedule(v.tour, v.location, now_, params_);
    push(v.tour.stops.front().planned_arrival, EventKind::stop_reached, v.id, versions_[v.id]);
  }

  void on_request(std::size_t index) {
    const Request& req = demand_[index];
    log("request", -1, req.id);
    if (req.arrival < params_.horizon_start || req.arrival >= params_.horizon_end) {
      ++report_.rejected;
      log("reject", -1, req.id);
      return;
    }
    auto decision = dispatch_request(req, fleet_, now_, params_);
    if (!decision) {
      ++report_.rejected;
      log("reject", -1, req.id);
      return;
    }
    VehicleState& v = fleet_[decision->vehicle];
    advance(v);
    v.tour = std::move(decision->choice.tour);
    v.status = VehicleStatus::serving;
    log("dispatch", v.id, req.id, -1, v.soc);
    start_leg(v);
  }

  void on_stop(int vid, std::uint64_t version) {
    VehicleState& v = fleet_[static_cast<std::size_t>(vid)];
    if (version != versions_[v.id] || v.tour.empty()) return;
    const Stop stop = v.tour.stops.front();
    const double km = travel(v.location, stop.location, params_).km;
    v.soc -= params_.efficiency * km;
    report_.vehicles[v.id].km_driven += km;
    v.location = stop.location;
    v.leg_start = now_;
    v.tour.stops.erase(v.tour.stops.begin());
    if (v.soc <= 0.0) {
      std::ostringstream msg;
      msg << "vehicle " << v.id << " ran out of energy at t=" << now_ << " (soc " << v.soc << ")";
      throw ModelViolation(msg.str());
    }

    switch (stop.kind) {
      case StopKind::pickup: {
        v.tour.onboard_start += stop.passengers;
        auto& rm = report_.requests[request_index(stop.ref)];
        rm.waited = now_ - stop.request_arrival;
        rm.vehicle = v.id;
        log("pickup", v.id, stop.ref, -1, v.soc);
        break;
      }
      case StopKind::dropoff: {
        v.tour.onboard_start -= stop.passengers;
        auto& rm = report_.requests[request_index(stop.ref)];
        rm.served = true;
        rm.journey = now_ - stop.request_arrival;
        log("dropoff", v.id, stop.ref, -1, v.soc);
        break;
      }
      case StopKind::charger:
        arrive_at_charger(v, stop.ref);
        return;
      case StopKind::depot:
        break;
    }
    check_flag(v, now_);
    if (!v.tour.empty()) {
      push(now_ + travel(v.location, v.tour.stops.front().location, params_).minutes,
           EventKind::stop_reached, v.id, versions_[v.id]);
      return;
    }
    vehicle_free(v);
  }

  void check_flag(VehicleState& v, double t) {
    if (!flag_low_battery(v, v.soc, params_)) return;
    v.flagged = true;
    v.flagged_at = t;
    log("flag", v.id, -1, -1, v.soc);
    if (epoch_policy()) flagged_this_epoch_.push_back(v.id);
  }

  // Called whenever a vehicle has no stops left.
  void vehicle_free(VehicleState& v) {
    v.status = VehicleStatus::idle;
    if (v.planned_charger) {
      const int cid = *v.planned_charger;
      ChargerState& c = chargers_[static_cast<std::size_t>(cid)];
      --c.reservations;
      if (arrival_soc(v.location, v.soc, c.charger, params_) >= params_.e_min) {
        depart(v, cid);
      } else {
        // Plan made from a stale position no longer holds; retry with priority next epoch.
        v.planned_charger.reset();
        v.status = VehicleStatus::deferred;
        deferred_.insert(deferred_.begin(), v.id);
        ++report_.replans;
        log("replan", v.id, -1, cid, v.soc);
      }
      return;
    }
    if (!v.flagged) return;
    if (epoch_policy()) {
      v.status = VehicleStatus::deferred;
      return;
    }
    std::optional<int> choice;
    if (options_.policy == Policy::ncp) {
      choice = ncp_select(v.location, v.soc, chargers_, now_, params_);
    } else if (auto est = fcfs_select(v.location, v.soc, chargers_, now_, params_)) {
      choice = est->charger;
    }
    if (!choice) choice = stranded_fallback(v);
    depart(v, *choice);
  }

  bool reaches_any_charger(const VehicleState& v) const {
    for (const auto& c : chargers_)
      if (arrival_soc(v.location, v.soc, c.charger, params_) >= params_.e_min) return true;
    return false;
  }

  int stranded_fallback(const VehicleState& v) {
    std::optional<int> best;
    double best_t = 0.0;
    for (const auto& c : chargers_) {
      if (arrival_soc(v.location, v.soc, c.charger, params_) <= 0.0) continue;
      const double t = travel(v.location, c.charger.location, params_).minutes;
      if (!best || t < best_t) {
        best = c.charger.id;
        best_t = t;
      }
    }
    if (!best) {
      std::ostringstream msg;
      msg << "vehicle " << v.id << " cannot reach any charger at t=" << now_;
      throw ModelViolation(msg.str());
    }
    ++report_.reserve_breaches;
    return *best;
  }

  void depart(VehicleState& v, int cid) {
    ChargerState& c = chargers_[static_cast<std::size_t>(cid)];
    const double arrive = arrival_soc(v.location, v.soc, c.charger, params_);
    c.en_route.push_back({v.id, charge_minutes(arrive, c.charger.power, params_)});
    v.planned_charger = cid;
    v.status = VehicleStatus::to_charger;
    v.tour.stops.clear();
    v.tour.stops.push_back({StopKind::charger, cid, c.charger.location, 0.0, 0, 0.0});
    ChargeRecord& rec = open_charge_[v.id];
    rec = ChargeRecord{};
    rec.vehicle = v.id;
    rec.charger = cid;
    rec.departed = now_;
    log("depart_charger", v.id, -1, cid, v.soc);
    start_leg(v);
  }

  void arrive_at_charger(VehicleState& v, int cid) {
    ChargerState& c = chargers_[static_cast<std::size_t>(cid)];
    std::erase_if(c.en_route, [&](const ChargerState::Inbound& e) { return e.vehicle == v.id; });
    v.planned_charger.reset();
    ChargeRecord& rec = open_charge_[v.id];
    rec.arrived = now_;
    report_.vehicles[v.id].access += now_ - rec.departed;
    log("arrive_charger", v.id, -1, cid, v.soc);
    const double session = charge_minutes(v.soc, c.charger.power, params_);
    if (auto end = charger_arrive(c, v.id, now_, session)) {
      begin_session(v, c, *end);
    } else {
      v.status = VehicleStatus::queued;
    }
  }

  void begin_session(VehicleState& v, const ChargerState& c, double end) {
    v.status = VehicleStatus::charging;
    ChargeRecord& rec = open_charge_[v.id];
    rec.started = now_;
    report_.vehicles[v.id].waiting += now_ - rec.arrived;
    log("charge_start", v.id, -1, c.charger.id, v.soc);
    push(end, EventKind::charge_done, c.charger.id);
  }

  void on_charge_done(int cid) {
    ChargerState& c = chargers_[static_cast<std::size_t>(cid)];
    if (!c.current) return;
    VehicleState& v = fleet_[static_cast<std::size_t>(*c.current)];
    ChargeRecord& rec = open_charge_[v.id];
    rec.finished = now_;
    rec.kwh = std::max(0.0, params_.e_max - v.soc);
    auto& vm = report_.vehicles[v.id];
    vm.charging += now_ - rec.started;
    vm.kwh_charged += rec.kwh;
    ++vm.n_charges;
    report_.charges.push_back(rec);
    v.soc = std::max(v.soc, params_.e_max);
    v.flagged = false;
    v.location = c.charger.location;
    v.leg_start = now_;
    v.tour.stops.clear();
    v.status = VehicleStatus::idle;
    log("charge_done", v.id, -1, cid, v.soc);

    if (auto next = charger_release(c, now_)) {
      VehicleState& w = fleet_[static_cast<std::size_t>(next->vehicle)];
      begin_session(w, c, c.session_end);
    }
    vehicle_free(v);
  }

  void on_epoch(int h) {
    log("epoch_tick");
    std::vector<const VehicleState*> pending;
    for (int id : deferred_) pending.push_back(&fleet_[static_cast<std::size_t>(id)]);
    for (int id : flagged_this_epoch_) {
      const VehicleState& v = fleet_[static_cast<std::size_t>(id)];
      if (v.flagged && !v.planned_charger && v.status != VehicleStatus::to_charger &&
          v.status != VehicleStatus::queued && v.status != VehicleStatus::charging)
        pending.push_back(&v);
    }
    flagged_this_epoch_.clear();
    deferred_.clear();

    if (!pending.empty()) {
      const EpochMode mode = options_.policy == Policy::ocp_a ? EpochMode::ocp_a : EpochMode::ocp;
      const EpochPlan plan = epoch_assign(pending, chargers_, mode, now_, params_);
      EpochRecord rec;
      rec.time = now_;
      rec.pending = static_cast<int>(pending.size());
      rec.offered_chargers = static_cast<int>(plan.instance.chargers.size());
      rec.deferred = static_cast<int>(plan.deferred.size());
      for (const auto& [vid, pc] : plan.plan) {
        rec.assigned.emplace_back(vid, pc.charger);
        rec.planned_waits.push_back(pc.estimate.wait);
      }
      report_.epochs.push_back(std::move(rec));

      for (int vid : plan.deferred) {
        VehicleState& v = fleet_[static_cast<std::size_t>(vid)];
        if (!v.moving() && !reaches_any_charger(v)) {
          // No charger is reachable with the reserve intact, now or later.
          depart(v, stranded_fallback(v));
          continue;
        }
        deferred_.push_back(vid);
        if (!v.moving()) v.status = VehicleStatus::deferred;
        log("defer", vid, -1, -1, v.soc_at(now_, params_));
      }
      for (const auto& [vid, pc] : plan.plan) {
        VehicleState& v = fleet_[static_cast<std::size_t>(vid)];
        v.planned_charger = pc.charger;
        ++chargers_[static_cast<std::size_t>(pc.charger)].reservations;
        log("plan", vid, -1, pc.charger, v.soc_at(now_, params_));
        if (!v.moving()) vehicle_free(v);
      }
    }

    const double next = clock_.start_of(h + 1);
    if (next < params_.horizon_end || !deferred_.empty() || !flagged_this_epoch_.empty() ||
        work_remaining())
      push(next, EventKind::epoch_tick, h + 1);
  }

  // Anything still able to flag a vehicle or awaiting a plan.
  bool work_remaining() const {
    for (const auto& v : fleet_) {
      if (v.moving() || v.flagged || v.status != VehicleStatus::idle) return true;
    }
    return !calendar_.empty();
  }

  std::size_t request_index(int request_id) const {
    // Demand is sorted by arrival; ids are usually positions, fall back to a search.
    const auto pos = static_cast<std::size_t>(request_id);
    if (pos < demand_.size() && demand_[pos].id == request_id) return pos;
    for (std::size_t i = 0; i < demand_.size(); ++i)
      if (demand_[i].id == request_id) return i;
    throw InputError("unknown request id " + std::to_string(request_id));
  }

  void finish() {
    report_.end_time = now_;
    for (const auto& v : fleet_) {
      if (v.flagged && !v.planned_charger && v.status != VehicleStatus::to_charger &&
          v.status != VehicleStatus::queued && v.status != VehicleStatus::charging)
        report_.unresolved_deferred.push_back(v.id);
    }
    std::sort(report_.unresolved_deferred.begin(), report_.unresolved_deferred.end());

    double z = 0.0, km = 0.0, wait = 0.0, kwh = 0.0;
    for (const auto& vm : report_.vehicles) {
      z += vm.access + vm.charging + vm.waiting;
      km += vm.km_driven;
      wait += vm.waiting;
      kwh += vm.kwh_charged;
    }
    report_.z = z;
    report_.total_fleet_wait_hours = wait / 60.0;
    report_.total_kwh_charged = kwh;
    report_.mean_km_per_vehicle = fleet_.empty() ? 0.0 : km / static_cast<double>(fleet_.size());

    double sum_wait = 0.0, sum_journey = 0.0;
    report_.served = 0;
    for (const auto& r : report_.requests) {
      if (!r.served) continue;
      ++report_.served;
      sum_wait += r.waited;
      sum_journey += r.journey;
    }
    if (report_.served > 0) {
      report_.mwt = sum_wait / report_.served;
      report_.mjt = sum_journey / report_.served;
    }
    report_.served_rate = demand_.empty() ? 1.0
                                          : static_cast<double>(report_.served) /
                                                static_cast<double>(demand_.size());
  }

  FleetParams params_;
  const std::vector<Request>& demand_;
  SimulationOptions options_;
  EpochClock clock_;
  std::vector<VehicleState> fleet_;
  std::vector<std::uint64_t> versions_;
  std::vector<ChargerState> chargers_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> calendar_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  std::vector<int> flagged_this_epoch_;
  std::vector<int> deferred_;
  std::vector<ChargeRecord> open_charge_;
  MetricsReport report_;
};

}  // namespace

MetricsReport run_simulation(const Scenario& scenario, const ChargerLayout& layout,
                             const std::vector<Request>& demand, const SimulationOptions& options) {
  if (auto problems = scenario.problems(); !problems.empty()) throw ValidationError(problems);
  const auto violations = validate_layout(layout, scenario.sites, scenario.fast_chargers_total);
  if (!violations.empty()) {
    std::vector<std::string> msgs;
    for (const auto& v : violations) msgs.push_back(v.message);
    throw ValidationError(msgs);
  }
  for (const auto& r : demand) {
    if (r.passengers > scenario.fleet.capacity)
      throw ValidationError({"request " + std::to_string(r.id) + " exceeds vehicle capacity"});
  }
  Simulation sim(scenario, layout, demand, options);
  MetricsReport report = sim.run();
  report.digest = fingerprint(scenario, layout, demand);
  return report;
}

double objective(const MetricsReport& report) {
  double z = 0.0;
  for (const auto& v : report.vehicles) z += v.access + v.charging + v.waiting;
  return z;
}

std::string fingerprint(const Scenario& scenario, const ChargerLayout& layout,
                        const std::vector<Request>& demand) {
  std::ostringstream text;
  text << scenario_to_json(scenario).dump() << layout_to_json(layout).dump();
  write_demand_csv(text, demand);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

ChargeStats charge_stats(const MetricsReport& r) {
  std::vector<double> waits, times, totals;
  for (const auto& c : r.charges) {
    waits.push_back(c.started - c.arrived);
    times.push_back((c.arrived - c.departed) + (c.finished - c.started));
    totals.push_back(c.finished - c.departed);
  }
  ChargeStats s;
  s.n = static_cast<int>(r.charges.size());
  s.wait = mean_sd(waits);
  s.time = mean_sd(times);
  s.total = mean_sd(totals);
  return s;
}

nlohmann::ordered_json report_to_json(const MetricsReport& r, bool with_details) {
  const ChargeStats cs = charge_stats(r);
  const MeanSd &w = cs.wait, &t = cs.time, &s = cs.total;

  nlohmann::ordered_json j;
  j["policy"] = to_string(r.policy);
  j["seed"] = r.seed;
  j["digest"] = r.digest;
  j["z_minutes"] = r.z;
  j["n_charges"] = cs.n;
  j["avg_charge_wait_min"] = w.mean;
  j["sd_charge_wait_min"] = w.sd;
  j["avg_charge_time_min"] = t.mean;
  j["sd_charge_time_min"] = t.sd;
  j["avg_charge_operation_min"] = s.mean;
  j["sd_charge_operation_min"] = s.sd;
  j["total_fleet_wait_hours"] = r.total_fleet_wait_hours;
  j["mwt_min"] = r.mwt;
  j["mjt_min"] = r.mjt;
  j["served"] = r.served;
  j["rejected"] = r.rejected;
  j["served_rate"] = r.served_rate;
  j["total_kwh_charged"] = r.total_kwh_charged;
  j["mean_km_per_vehicle"] = r.mean_km_per_vehicle;
  j["reserve_breaches"] = r.reserve_breaches;
  j["replans"] = r.replans;
  j["unresolved_deferred"] = r.unresolved_deferred;
  j["end_time_min"] = r.end_time;
  j["vehicles"] = nlohmann::ordered_json::array();
  for (const auto& v : r.vehicles) {
    j["vehicles"].push_back({{"id", v.id},
                             {"access_min", v.access},
                             {"charging_min", v.charging},
                             {"waiting_min", v.waiting},
                             {"km_driven", v.km_driven},
                             {"n_charges", v.n_charges},
                             {"kwh_charged", v.kwh_charged}});
  }
  if (with_details) {
    j["requests"] = nlohmann::ordered_json::array();
    for (const auto& q : r.requests) {
      j["requests"].push_back({{"id", q.id},
                               {"served", q.served},
                               {"vehicle", q.vehicle},
                               {"waited_min", q.waited},
                               {"journey_min", q.journey}});
    }
    j["epochs"] = nlohmann::ordered_json::array();
    for (const auto& e : r.epochs) {
      j["epochs"].push_back({{"time", e.time},
                             {"pending", e.pending},
                             {"offered_chargers", e.offered_chargers},
                             {"assigned", e.assigned},
                             {"planned_waits", e.planned_waits},
                             {"deferred", e.deferred}});
    }
  }
  return j;
}

void write_event_log_csv(std::ostream& out, const std::vector<LogEntry>& events) {
  out << "time,kind,vehicle,request,charger,soc\n";
  const auto old = out.precision(17);
  for (const auto& e : events) {
    out << e.time << ',' << e.kind << ',';
    if (e.vehicle >= 0) out << e.vehicle;
    out << ',';
    if (e.request >= 0) out << e.request;
    out << ',';
    if (e.charger >= 0) out << e.charger;
    out << ',';
    if (e.soc) out << *e.soc;
    out << '\n';
  }
  out.precision(old);
}

}  // namespace evcharge
