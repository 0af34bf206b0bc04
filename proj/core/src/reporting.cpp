#include "evcharge/reporting.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "evcharge/error.hpp"

namespace evcharge {

std::vector<std::string> EmissionsInput::problems() const {
  std::vector<std::string> out;
  if (km_per_vehicle_day < 0) out.push_back("km_per_vehicle_day must be non-negative");
  if (fleet_size < 0) out.push_back("fleet_size must be non-negative");
  if (op_days_per_year < 0) out.push_back("op_days_per_year must be non-negative");
  if (gasoline_rate < 0) out.push_back("gasoline_rate must be non-negative");
  if (kwh_per_day < 0) out.push_back("kwh_per_day must be non-negative");
  if (grid_intensity < 0) out.push_back("grid_intensity must be non-negative");
  return out;
}

double annual_co2_savings(const EmissionsInput& in) {
  if (auto p = in.problems(); !p.empty()) throw ValidationError(p);
  return in.km_per_vehicle_day * in.fleet_size * in.op_days_per_year * in.gasoline_rate / 1e6;
}

double generation_emissions(double kwh_per_day, double grid_intensity, int op_days) {
  if (kwh_per_day < 0 || grid_intensity < 0 || op_days < 0)
    throw ValidationError({"emission inputs must be non-negative"});
  return kwh_per_day * op_days * grid_intensity / 1e6;
}

EmissionsInput emissions_from_report(const MetricsReport& report, EmissionsInput base) {
  base.km_per_vehicle_day = report.mean_km_per_vehicle;
  base.fleet_size = static_cast<int>(report.vehicles.size());
  base.kwh_per_day = report.total_kwh_charged;
  return base;
}

EmissionsInput emissions_from_json(const nlohmann::json& j, EmissionsInput base) {
  try {
    base.km_per_vehicle_day = j.at("mean_km_per_vehicle").get<double>();
    base.fleet_size = static_cast<int>(j.at("vehicles").size());
    base.kwh_per_day = j.at("total_kwh_charged").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("not a simulation report: ") + e.what());
  }
  return base;
}

std::vector<ComparisonRow> compare_policies(const std::map<Policy, MetricsReport>& reports) {
  std::vector<ComparisonRow> rows;
  const MetricsReport* first = nullptr;
  for (const auto& [policy, r] : reports) {
    if (first && (r.digest != first->digest || r.seed != first->seed))
      throw InputError("reports come from different scenarios, demands or seeds");
    if (!first) first = &r;
    const ChargeStats cs = charge_stats(r);
    ComparisonRow row;
    row.policy = policy;
    row.n_charges = cs.n;
    row.avg_charge_wait = cs.wait.mean;
    row.avg_charge_time = cs.time.mean;
    row.avg_charge_total = cs.total.mean;
    row.total_fleet_wait_hours = r.total_fleet_wait_hours;
    row.mwt = r.mwt;
    row.mjt = r.mjt;
    row.served_rate = r.served_rate;
    row.z = r.z;
    rows.push_back(row);
  }
  return rows;
}

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> names{
      "n_charges",   "avg_charge_wait_min", "avg_charge_time_min", "avg_charge_total_min",
      "total_fleet_wait_h", "mwt_min", "mjt_min", "served_rate", "z_min"};
  return names;
}

std::vector<double> column_values(const ComparisonRow& r) {
  return {static_cast<double>(r.n_charges), r.avg_charge_wait, r.avg_charge_time,
          r.avg_charge_total, r.total_fleet_wait_hours, r.mwt, r.mjt, r.served_rate, r.z};
}

std::vector<AggregateRow> aggregate(const std::vector<std::vector<ComparisonRow>>& runs) {
  std::map<Policy, std::vector<std::vector<double>>> by_policy;
  for (const auto& run : runs)
    for (const auto& row : run) by_policy[row.policy].push_back(column_values(row));
  std::vector<AggregateRow> out;
  for (const auto& [policy, samples] : by_policy) {
    AggregateRow a;
    a.policy = policy;
    a.samples = static_cast<int>(samples.size());
    for (int c = 0; c < kComparisonColumns; ++c) {
      std::vector<double> xs;
      for (const auto& s : samples) xs.push_back(s[static_cast<std::size_t>(c)]);
      a.columns.push_back(mean_sd(xs));
    }
    out.push_back(std::move(a));
  }
  return out;
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "table") return OutputFormat::table;
  if (name == "json") return OutputFormat::json;
  throw InputError("unknown format '" + name + "' (expected csv, table or json)");
}

std::string fixed(double value, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << value;
  return s.str();
}

void write_text_table(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << "  ";
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
      } else {
        out << std::right << std::setw(static_cast<int>(width[c])) << cells[c];
      }
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

namespace {

int digits_for(std::size_t column) {
  if (column == 0) return 0;
  if (column == 7) return 4;
  return 2;
}

}  // namespace

void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows, OutputFormat format) {
  const auto& names = column_names();
  if (format == OutputFormat::json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      o["policy"] = to_string(r.policy);
      const auto v = column_values(r);
      for (std::size_t c = 0; c < names.size(); ++c) o[names[c]] = v[c];
      o["n_charges"] = r.n_charges;
      j.push_back(o);
    }
    out << j.dump(2) << '\n';
    return;
  }
  if (format == OutputFormat::csv) {
    out << "policy";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    const auto old = out.precision(17);
    for (const auto& r : rows) {
      out << to_string(r.policy);
      for (double v : column_values(r)) out << ',' << v;
      out << '\n';
    }
    out.precision(old);
    return;
  }
  std::vector<std::string> header{"policy"};
  header.insert(header.end(), names.begin(), names.end());
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> line{to_string(r.policy)};
    const auto v = column_values(r);
    for (std::size_t c = 0; c < v.size(); ++c) line.push_back(fixed(v[c], digits_for(c)));
    cells.push_back(std::move(line));
  }
  write_text_table(out, header, cells);
}

void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows, OutputFormat format) {
  const auto& names = column_names();
  if (format == OutputFormat::json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json o;
      o["policy"] = to_string(r.policy);
      o["samples"] = r.samples;
      for (std::size_t c = 0; c < names.size(); ++c)
        o[names[c]] = {{"mean", r.columns[c].mean}, {"sd", r.columns[c].sd}};
      j.push_back(o);
    }
    out << j.dump(2) << '\n';
    return;
  }
  if (format == OutputFormat::csv) {
    out << "policy,samples";
    for (const auto& n : names) out << ',' << n << "_mean," << n << "_sd";
    out << '\n';
    const auto old = out.precision(17);
    for (const auto& r : rows) {
      out << to_string(r.policy) << ',' << r.samples;
      for (const auto& m : r.columns) out << ',' << m.mean << ',' << m.sd;
      out << '\n';
    }
    out.precision(old);
    return;
  }
  std::vector<std::string> header{"policy", "n"};
  header.insert(header.end(), names.begin(), names.end());
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> line{to_string(r.policy), std::to_string(r.samples)};
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      const int d = std::max(1, digits_for(c));
      line.push_back(fixed(r.columns[c].mean, d) + " (" + fixed(r.columns[c].sd, d) + ")");
    }
    cells.push_back(std::move(line));
  }
  write_text_table(out, header, cells);
}

}  // namespace evcharge
