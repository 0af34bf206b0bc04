#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evcharge/policies.hpp"
#include "evcharge/simulator.hpp"

namespace evcharge {

inline constexpr double kGasolineGramsPerKm = 147.0;
inline constexpr int kOperatingDaysPerYear = 312;  // 6 days a week, 52 weeks
inline constexpr double kGridGramsPerKwh = 500.0;

struct EmissionsInput {
  double km_per_vehicle_day = 0.0;
  int fleet_size = 0;
  int op_days_per_year = kOperatingDaysPerYear;
  double gasoline_rate = kGasolineGramsPerKm;  // g CO2 per km
  double kwh_per_day = 0.0;
  double grid_intensity = kGridGramsPerKwh;    // g CO2eq per kWh

  std::vector<std::string> problems() const;
};

// Tailpipe CO2 avoided by not running the same kilometres on gasoline, metric tons per year.
double annual_co2_savings(const EmissionsInput& input);

// CO2 emitted generating the charged energy, metric tons per year.
double generation_emissions(double kwh_per_day, double grid_intensity,
                            int op_days = kOperatingDaysPerYear);

// Kilometres and kWh taken from a simulated day.
EmissionsInput emissions_from_report(const MetricsReport& report, EmissionsInput base = {});
EmissionsInput emissions_from_json(const nlohmann::json& report, EmissionsInput base = {});

struct ComparisonRow {
  Policy policy = Policy::ocp_a;
  int n_charges = 0;
  double avg_charge_wait = 0.0;   // minutes queued per recharge
  double avg_charge_time = 0.0;   // minutes driving to and plugged in per recharge
  double avg_charge_total = 0.0;  // wait + time
  double total_fleet_wait_hours = 0.0;
  double mwt = 0.0;
  double mjt = 0.0;
  double served_rate = 0.0;
  double z = 0.0;
};

inline constexpr int kComparisonColumns = 9;

// One row per policy in Policy order. Throws InputError when the reports come from different
// scenarios, demands or seeds.
std::vector<ComparisonRow> compare_policies(const std::map<Policy, MetricsReport>& reports);

// Mean and sample sd per policy and column across repeated comparisons (e.g. several seeds).
struct AggregateRow {
  Policy policy = Policy::ocp_a;
  int samples = 0;
  std::vector<MeanSd> columns;  // same order as column_names()
};

const std::vector<std::string>& column_names();
std::vector<double> column_values(const ComparisonRow& row);
std::vector<AggregateRow> aggregate(const std::vector<std::vector<ComparisonRow>>& runs);

enum class OutputFormat { csv, table, json };

OutputFormat parse_format(const std::string& name);

void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows, OutputFormat format);
void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows, OutputFormat format);

// Right-aligned text table; numbers are passed preformatted.
void write_text_table(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

std::string fixed(double value, int digits);

}  // namespace evcharge
