#include "evcharge/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "evcharge/error.hpp"

namespace evcharge {

namespace {

bool finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

std::vector<std::string> FleetParams::problems() const {
  std::vector<std::string> out;
  if (!(battery_capacity > 0.0)) out.emplace_back("battery_capacity must be > 0");
  if (!(efficiency > 0.0)) out.emplace_back("efficiency must be > 0");
  if (!(speed_kmh > 0.0)) out.emplace_back("speed_kmh must be > 0");
  if (!(circuity > 0.0)) out.emplace_back("circuity must be > 0");
  if (!(e_min >= 0.0)) out.emplace_back("e_min must be >= 0");
  if (!(e_min < recharge_threshold))
    out.emplace_back("e_min must be < recharge_threshold");
  if (!(recharge_threshold < e_max))
    out.emplace_back("recharge_threshold must be < e_max");
  if (!(e_max <= battery_capacity))
    out.emplace_back("e_max must be <= battery_capacity");
  if (capacity < 1) out.emplace_back("capacity must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) out.emplace_back("alpha must lie in [0, 1]");
  if (!(beta >= 0.0)) out.emplace_back("beta must be >= 0");
  if (!(epoch_min > 0.0)) out.emplace_back("epoch_min must be > 0");
  if (!(horizon_end > horizon_start)) out.emplace_back("horizon_end must be > horizon_start");
  if (!(slow_power > 0.0) || !(fast_power > 0.0)) out.emplace_back("charger power must be > 0");
  if (initial_soc && !(*initial_soc >= e_min && *initial_soc <= battery_capacity))
    out.emplace_back("initial_soc must lie in [e_min, battery_capacity]");
  return out;
}

FleetParams FleetParams::with_battery(double capacity_kwh) {
  FleetParams p;
  p.battery_capacity = capacity_kwh;
  p.e_min = 0.1 * capacity_kwh;
  p.e_max = 0.8 * capacity_kwh;
  p.recharge_threshold = 0.2 * capacity_kwh;
  return p;
}

int ChargerLayout::total() const {
  int sum = 0;
  for (const auto& [_, n] : counts) sum += n;
  return sum;
}

int ChargerLayout::at(const std::string& site) const {
  auto it = counts.find(site);
  return it == counts.end() ? 0 : it->second;
}

std::vector<int> ChargerLayout::as_vector(const std::vector<Site>& sites) const {
  std::vector<int> u;
  u.reserve(sites.size());
  for (const auto& s : sites) u.push_back(at(s.id));
  return u;
}

ChargerLayout ChargerLayout::from_vector(const std::vector<Site>& sites,
                                         const std::vector<int>& u) {
  if (u.size() != sites.size())
    throw InputError("layout vector has " + std::to_string(u.size()) + " entries for " +
                     std::to_string(sites.size()) + " sites");
  ChargerLayout layout;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (u[k] != 0) layout.counts[sites[k].id] = u[k];
  }
  return layout;
}

std::vector<LayoutViolation> validate_layout(const ChargerLayout& layout,
                                             const std::vector<Site>& sites, int total) {
  std::map<std::string, const Site*> by_id;
  for (const auto& s : sites) by_id.emplace(s.id, &s);
  for (const auto& [id, _] : layout.counts) {
    if (!by_id.contains(id)) throw InputError("layout references unknown site '" + id + "'");
  }

  std::vector<LayoutViolation> out;
  for (const auto& s : sites) {
    const int n = layout.at(s.id);
    if (n < 0) {
      out.push_back({LayoutConstraint::negative, s.id,
                     "site " + s.id + " has negative charger count " + std::to_string(n)});
    } else if (n > s.fast_charger_cap) {
      out.push_back({LayoutConstraint::above_cap, s.id,
                     "site " + s.id + " has " + std::to_string(n) + " fast chargers, cap is " +
                         std::to_string(s.fast_charger_cap)});
    }
  }
  if (layout.total() != total) {
    out.push_back({LayoutConstraint::total_mismatch, "",
                   "layout installs " + std::to_string(layout.total()) +
                       " fast chargers, expected " + std::to_string(total)});
  }
  return out;
}

Leg travel(const Point& a, const Point& b, const FleetParams& params) {
  const double km = std::hypot(b.x - a.x, b.y - a.y) * params.circuity;
  return {km / params.speed_kmh * 60.0, km};
}

std::vector<std::string> DemandProfile::problems() const {
  std::vector<std::string> out;
  double sum = 0.0;
  for (double w : hourly_weights) {
    if (!(w >= 0.0)) out.emplace_back("hourly weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) out.emplace_back("hourly weights must not all be zero");
  if (!(trip_len_mean > 0.0)) out.emplace_back("trip_len_mean must be > 0");
  if (!(trip_len_var >= 0.0)) out.emplace_back("trip_len_var must be >= 0");
  if (!(region.max_x > region.min_x && region.max_y > region.min_y))
    out.emplace_back("region must have positive area");
  if (!(horizon_end > horizon_start)) out.emplace_back("horizon_end must be > horizon_start");
  if (passengers < 1) out.emplace_back("passengers must be >= 1");
  // Weight mass inside the horizon must be positive or no arrival can be drawn.
  double inside = 0.0;
  for (int h = 0; h < 24; ++h) {
    const double lo = std::max(horizon_start, h * 60.0);
    const double hi = std::min(horizon_end, (h + 1) * 60.0);
    if (hi > lo) inside += hourly_weights[h] * (hi - lo);
  }
  if (sum > 0.0 && !(inside > 0.0)) out.emplace_back("no arrival intensity inside the horizon");
  return out;
}

DemandProfile DemandProfile::weekday() {
  DemandProfile p;
  p.hourly_weights = {0.2, 0.1, 0.1, 0.1, 0.2, 0.4, 1.2, 3.0, 2.2, 1.3, 1.0, 1.0,
                      1.1, 1.0, 1.0, 1.2, 1.8, 3.0, 2.2, 1.3, 0.8, 0.6, 0.4, 0.3};
  return p;
}

DemandProfile DemandProfile::uniform() {
  DemandProfile p;
  p.hourly_weights.fill(1.0);
  return p;
}

int Scenario::fleet_size() const {
  int n = 0;
  for (const auto& d : depots) n += d.vehicles;
  return n;
}

std::optional<std::size_t> Scenario::site_index(const std::string& id) const {
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (sites[k].id == id) return k;
  }
  return std::nullopt;
}

std::vector<std::string> Scenario::problems() const {
  std::vector<std::string> out = fleet.problems();
  std::map<std::string, int> seen;
  for (const auto& s : sites) {
    if (s.id.empty()) out.emplace_back("site with empty id");
    if (++seen[s.id] == 2) out.emplace_back("duplicate site id '" + s.id + "'");
    if (!finite(s.coord)) out.emplace_back("site " + s.id + " has non-finite coordinates");
    if (s.slow_chargers < 0) out.emplace_back("site " + s.id + " has negative slow_chargers");
    if (s.fast_charger_cap < 0) out.emplace_back("site " + s.id + " has negative fast_cap");
  }
  for (const auto& d : depots) {
    if (!seen.contains(d.site)) out.emplace_back("depot references unknown site '" + d.site + "'");
    if (d.vehicles < 0) out.emplace_back("depot " + d.site + " has negative vehicle count");
  }
  if (fast_chargers_total < 0) out.emplace_back("fast_chargers_total must be >= 0");
  int cap_sum = 0;
  for (const auto& s : sites) cap_sum += std::max(0, s.fast_charger_cap);
  if (cap_sum < fast_chargers_total)
    out.emplace_back("site caps sum to " + std::to_string(cap_sum) + " < fast_chargers_total " +
                     std::to_string(fast_chargers_total));
  return out;
}

std::vector<Charger> build_chargers(const Scenario& scenario, const ChargerLayout& layout) {
  std::vector<Charger> out;
  int next_id = 0;
  for (std::size_t k = 0; k < scenario.sites.size(); ++k) {
    const auto& site = scenario.sites[k];
    for (int i = 0; i < site.slow_chargers; ++i) {
      out.push_back({next_id++, static_cast<int>(k), site.coord, scenario.fleet.slow_power,
                     ChargerKind::slow});
    }
    for (int i = 0; i < layout.at(site.id); ++i) {
      out.push_back({next_id++, static_cast<int>(k), site.coord, scenario.fleet.fast_power,
                     ChargerKind::fast});
    }
  }
  return out;
}

}  // namespace evcharge
