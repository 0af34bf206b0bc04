#include "evcharge/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "evcharge/error.hpp"
#include "evcharge/random.hpp"

namespace evcharge {

namespace {

using json = nlohmann::json;

template <typename T>
T field(const json& obj, const char* key, const std::string& source, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(source, 0, where + key, "missing required field");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(source, 0, where + key, e.what());
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& source,
           const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return field<T>(obj, key, source, where);
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

FleetParams fleet_from_json(const json& f, const std::string& src) {
  const std::string at = "fleet.";
  const double capacity = field_or(f, "battery_kwh", kDefaultBatteryKwh, src, at);
  FleetParams p = FleetParams::with_battery(capacity);
  p.efficiency = field_or(f, "efficiency_kwh_per_km", p.efficiency, src, at);
  p.e_min = field_or(f, "e_min_kwh", p.e_min, src, at);
  p.e_max = field_or(f, "e_max_kwh", p.e_max, src, at);
  p.recharge_threshold = field_or(f, "recharge_threshold_kwh", p.recharge_threshold, src, at);
  p.capacity = field_or(f, "capacity", p.capacity, src, at);
  p.speed_kmh = field_or(f, "speed_kmh", p.speed_kmh, src, at);
  p.circuity = field_or(f, "circuity", p.circuity, src, at);
  p.alpha = field_or(f, "alpha", p.alpha, src, at);
  p.beta = field_or(f, "beta", p.beta, src, at);
  p.epoch_min = field_or(f, "epoch_min", p.epoch_min, src, at);
  p.horizon_start = field_or(f, "horizon_start_min", p.horizon_start, src, at);
  p.horizon_end = field_or(f, "horizon_end_min", p.horizon_end, src, at);
  p.slow_power = field_or(f, "slow_power_kwh_per_min", p.slow_power, src, at);
  p.fast_power = field_or(f, "fast_power_kwh_per_min", p.fast_power, src, at);
  if (f.contains("initial_soc_kwh") && !f.at("initial_soc_kwh").is_null())
    p.initial_soc = field<double>(f, "initial_soc_kwh", src, at);
  return p;
}

}  // namespace

nlohmann::ordered_json fleet_to_json(const FleetParams& p) {
  nlohmann::ordered_json f;
  f["battery_kwh"] = p.battery_capacity;
  f["efficiency_kwh_per_km"] = p.efficiency;
  f["e_min_kwh"] = p.e_min;
  f["e_max_kwh"] = p.e_max;
  f["recharge_threshold_kwh"] = p.recharge_threshold;
  f["capacity"] = p.capacity;
  f["speed_kmh"] = p.speed_kmh;
  f["circuity"] = p.circuity;
  f["alpha"] = p.alpha;
  f["beta"] = p.beta;
  f["epoch_min"] = p.epoch_min;
  f["horizon_start_min"] = p.horizon_start;
  f["horizon_end_min"] = p.horizon_end;
  f["slow_power_kwh_per_min"] = p.slow_power;
  f["fast_power_kwh_per_min"] = p.fast_power;
  f["initial_soc_kwh"] = p.initial_soc ? nlohmann::ordered_json(*p.initial_soc) : nlohmann::ordered_json(nullptr);
  return f;
}

nlohmann::ordered_json layout_to_json(const ChargerLayout& layout) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [id, n] : layout.counts) out[id] = n;
  return out;
}

ChargerLayout layout_from_json(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source, 0, "layout", "expected an object");
  ChargerLayout layout;
  for (const auto& [id, n] : doc.items()) {
    if (!n.is_number_integer()) throw ParseError(source, 0, "layout." + id, "expected an integer");
    layout.counts[id] = n.get<int>();
  }
  return layout;
}

Scenario scenario_from_json(const json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source, 1, "<root>", "expected a JSON object");
  Scenario sc;
  if (!doc.contains("sites") || !doc.at("sites").is_array())
    throw ParseError(source, 0, "sites", "missing or not an array");
  int i = 0;
  for (const auto& s : doc.at("sites")) {
    const std::string at = "sites[" + std::to_string(i++) + "].";
    Site site;
    site.id = field<std::string>(s, "id", source, at);
    site.coord = {field<double>(s, "x_km", source, at), field<double>(s, "y_km", source, at)};
    site.slow_chargers = field_or(s, "slow_chargers", 0, source, at);
    site.fast_charger_cap = field_or(s, "fast_cap", 0, source, at);
    sc.sites.push_back(std::move(site));
  }
  i = 0;
  if (doc.contains("depots")) {
    for (const auto& d : doc.at("depots")) {
      const std::string at = "depots[" + std::to_string(i++) + "].";
      sc.depots.push_back({field<std::string>(d, "site", source, at),
                           field<int>(d, "vehicles", source, at)});
    }
  }
  if (doc.contains("fleet")) sc.fleet = fleet_from_json(doc.at("fleet"), source);
  if (doc.contains("layout")) sc.layout = layout_from_json(doc.at("layout"), source);
  sc.fast_chargers_total = field_or(doc, "fast_chargers_total", sc.layout.total(), source, "");

  std::vector<std::string> problems = sc.problems();
  try {
    for (const auto& v : validate_layout(sc.layout, sc.sites, sc.fast_chargers_total))
      problems.push_back(v.message);
  } catch (const InputError& e) {
    problems.emplace_back(e.what());
  }
  if (!problems.empty()) throw ValidationError(problems);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "<file>", "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path, line_of_offset(text, e.byte), "<syntax>", e.what());
  }
  return scenario_from_json(doc, path);
}

nlohmann::ordered_json scenario_to_json(const Scenario& sc) {
  nlohmann::ordered_json out;
  out["sites"] = nlohmann::ordered_json::array();
  for (const auto& s : sc.sites) {
    out["sites"].push_back({{"id", s.id},
                            {"x_km", s.coord.x},
                            {"y_km", s.coord.y},
                            {"slow_chargers", s.slow_chargers},
                            {"fast_cap", s.fast_charger_cap}});
  }
  out["depots"] = nlohmann::ordered_json::array();
  for (const auto& d : sc.depots) out["depots"].push_back({{"site", d.site}, {"vehicles", d.vehicles}});
  out["fleet"] = fleet_to_json(sc.fleet);
  out["fast_chargers_total"] = sc.fast_chargers_total;
  out["layout"] = layout_to_json(sc.layout);
  return out;
}

std::vector<Request> read_demand_csv(std::istream& in, const std::string& source) {
  static constexpr const char* kColumns[] = {"id",    "arrival_min", "ox_km",     "oy_km",
                                             "dx_km", "dy_km",       "passengers"};
  std::vector<Request> out;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      if (cells.size() != 7) throw ParseError(source, line_no, "<header>", "expected 7 columns");
      for (int c = 0; c < 7; ++c) {
        if (cells[c] != kColumns[c])
          throw ParseError(source, line_no, "<header>",
                           "column " + std::to_string(c) + " should be '" + kColumns[c] + "'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 7)
      throw ParseError(source, line_no, "<row>",
                       "expected 7 columns, found " + std::to_string(cells.size()));
    auto number = [&](int c) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument("trailing characters");
        return v;
      } catch (const std::exception&) {
        throw ParseError(source, line_no, kColumns[c], "not a number: '" + cells[c] + "'");
      }
    };
    auto integer = [&](int c) {
      int v = 0;
      const auto* first = cells[c].data();
      const auto* last = first + cells[c].size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last)
        throw ParseError(source, line_no, kColumns[c], "not an integer: '" + cells[c] + "'");
      return v;
    };
    Request r;
    r.id = integer(0);
    r.arrival = number(1);
    r.origin = {number(2), number(3)};
    r.destination = {number(4), number(5)};
    r.passengers = integer(6);
    if (r.passengers < 1) throw ParseError(source, line_no, "passengers", "must be >= 1");
    if (r.origin == r.destination)
      throw ParseError(source, line_no, "dx_km", "destination equals origin");
    out.push_back(r);
  }
  if (!header_seen) throw ParseError(source, line_no, "<header>", "missing header row");
  std::stable_sort(out.begin(), out.end(),
                   [](const Request& a, const Request& b) { return a.arrival < b.arrival; });
  return out;
}

std::vector<Request> load_demand(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "<file>", "cannot open file");
  return read_demand_csv(in, path);
}

void write_demand_csv(std::ostream& out, const std::vector<Request>& requests) {
  out << "id,arrival_min,ox_km,oy_km,dx_km,dy_km,passengers\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : requests) {
    out << r.id << ',' << r.arrival << ',' << r.origin.x << ',' << r.origin.y << ','
        << r.destination.x << ',' << r.destination.y << ',' << r.passengers << '\n';
  }
  out.precision(old_precision);
}

DemandProfile profile_from_json(const json& doc, const std::string& source) {
  DemandProfile p = DemandProfile::weekday();
  if (doc.contains("hourly_weights")) {
    const auto w = field<std::vector<double>>(doc, "hourly_weights", source, "");
    if (w.size() != 24) throw ParseError(source, 0, "hourly_weights", "expected 24 values");
    std::copy(w.begin(), w.end(), p.hourly_weights.begin());
  }
  p.trip_len_mean = field_or(doc, "trip_len_mean_km", p.trip_len_mean, source, "");
  p.trip_len_var = field_or(doc, "trip_len_var_km2", p.trip_len_var, source, "");
  if (doc.contains("region")) {
    const auto r = field<std::vector<double>>(doc, "region", source, "");
    if (r.size() != 4)
      throw ParseError(source, 0, "region", "expected [min_x, min_y, max_x, max_y]");
    p.region = {r[0], r[1], r[2], r[3]};
  }
  p.horizon_start = field_or(doc, "horizon_start_min", p.horizon_start, source, "");
  p.horizon_end = field_or(doc, "horizon_end_min", p.horizon_end, source, "");
  p.passengers = field_or(doc, "passengers", p.passengers, source, "");
  if (auto problems = p.problems(); !problems.empty()) throw ValidationError(problems);
  return p;
}

nlohmann::ordered_json profile_to_json(const DemandProfile& p) {
  nlohmann::ordered_json out;
  out["hourly_weights"] = std::vector<double>(p.hourly_weights.begin(), p.hourly_weights.end());
  out["trip_len_mean_km"] = p.trip_len_mean;
  out["trip_len_var_km2"] = p.trip_len_var;
  out["region"] = {p.region.min_x, p.region.min_y, p.region.max_x, p.region.max_y};
  out["horizon_start_min"] = p.horizon_start;
  out["horizon_end_min"] = p.horizon_end;
  out["passengers"] = p.passengers;
  return out;
}

Scenario make_synthetic_scenario(const SyntheticScenarioSpec& spec, std::uint64_t seed) {
  if (spec.sites < 1 || spec.depots < 1 || spec.depots > spec.sites || spec.vehicles < 0)
    throw InputError("synthetic scenario needs 1 <= depots <= sites and vehicles >= 0");
  Rng rng(seed);
  Scenario sc;
  for (int k = 0; k < spec.sites; ++k) {
    std::ostringstream id;
    id << 'S' << std::setw(3) << std::setfill('0') << k;
    sc.sites.push_back({id.str(),
                        {rng.uniform(spec.region.min_x, spec.region.max_x),
                         rng.uniform(spec.region.min_y, spec.region.max_y)},
                        spec.slow_chargers_per_site,
                        spec.fast_cap_per_site});
  }
  const int base = spec.vehicles / spec.depots;
  const int extra = spec.vehicles % spec.depots;
  for (int d = 0; d < spec.depots; ++d)
    sc.depots.push_back({sc.sites[d].id, base + (d < extra ? 1 : 0)});
  sc.fast_chargers_total = spec.fast_chargers_total;
  int remaining = spec.fast_chargers_total;
  while (remaining > 0) {
    bool placed = false;
    for (const auto& s : sc.sites) {
      if (remaining == 0) break;
      if (sc.layout.at(s.id) < s.fast_charger_cap) {
        ++sc.layout.counts[s.id];
        --remaining;
        placed = true;
      }
    }
    if (!placed) throw InputError("fast_chargers_total exceeds the sum of site caps");
  }
  return sc;
}

}  // namespace evcharge
