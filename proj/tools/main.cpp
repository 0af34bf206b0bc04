#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evcharge/demand.hpp"
#include "evcharge/error.hpp"
#include "evcharge/optimizer.hpp"
#include "evcharge/reporting.hpp"
#include "evcharge/scenario_io.hpp"
#include "evcharge/simulator.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace evcharge::cli {
namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kScenarioDirEnv = "EVCHARGE_SCENARIO_DIR";

// Bad command-line usage; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;
  std::string format = "table";
};

struct DemandSource {
  std::string demand_path;
  std::string profile;
  int requests = 1000;
};

ordered_json audit(const std::string& command, const Global& g, ordered_json args) {
  ordered_json a;
  a["tool"] = "evcharge";
  a["version"] = kVersion;
  a["command"] = command;
  a["seed"] = g.seed;
  a["jobs"] = g.jobs;
  a["format"] = g.format;
  a["args"] = std::move(args);
  return a;
}

// Audit header as '#' comment lines, one JSON document per file.
void write_csv_audit(std::ostream& out, const ordered_json& a) {
  out << "# " << a.dump() << '\n';
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  return f;
}

std::string resolve_scenario_path(const std::string& given) {
  const char* env = std::getenv(kScenarioDirEnv);
  if (given.empty()) {
    if (!env) throw UsageError(std::string("--scenario is required (or set ") + kScenarioDirEnv + ")");
    return (fs::path(env) / "scenario.json").string();
  }
  if (fs::exists(given) || !env || fs::path(given).is_absolute()) return given;
  const fs::path alt = fs::path(env) / given;
  return fs::exists(alt) ? alt.string() : given;
}

DemandProfile resolve_profile(const std::string& name) {
  if (name == "table1" || name == "weekday") return DemandProfile::weekday();
  if (name == "uniform") return DemandProfile::uniform();
  if (fs::exists(name)) {
    std::ifstream f(name);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(name, 0, "", e.what());
    }
    return profile_from_json(doc, name);
  }
  throw UsageError("unknown profile '" + name + "' (expected table1, weekday, uniform or a JSON file)");
}

std::vector<Request> resolve_demand(const DemandSource& src, std::uint64_t seed) {
  if (!src.demand_path.empty() && !src.profile.empty())
    throw UsageError("give either --demand or --profile, not both");
  if (!src.demand_path.empty()) return load_demand(src.demand_path);
  if (src.profile.empty()) throw UsageError("a demand source is required: --demand FILE or --profile NAME");
  if (src.requests < 0) throw UsageError("--requests must be non-negative");
  return generate_demand(resolve_profile(src.profile), static_cast<std::size_t>(src.requests), seed);
}

ordered_json demand_args(const DemandSource& src) {
  ordered_json j;
  if (!src.demand_path.empty()) {
    j["demand"] = src.demand_path;
  } else {
    j["profile"] = src.profile;
    j["requests"] = src.requests;
  }
  return j;
}

Policy resolve_policy(const std::string& name) {
  auto p = parse_policy(name);
  if (!p) throw UsageError("unknown policy '" + name + "' (expected ncp, fcfs, ocp or ocp-a)");
  return *p;
}

std::vector<Point> dropoffs(const std::vector<Request>& demand) {
  std::vector<Point> out;
  for (const auto& r : demand) out.push_back(r.destination);
  return out;
}

ChargerLayout load_layout_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open layout file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, "", e.what());
  }
  // Accept either a bare layout object or an optimizer output with a "layout" key.
  if (doc.is_object() && doc.contains("layout") && doc["layout"].is_object()) doc = doc["layout"];
  return layout_from_json(doc, path);
}

ChargerLayout resolve_layout(const std::string& source, const Scenario& scenario,
                             const std::vector<Request>& demand, std::uint64_t seed) {
  if (source.empty() || source == "scenario") return scenario.layout;
  if (source == "kmeans")
    return kmeans_layout(dropoffs(demand), scenario.sites, scenario.fast_chargers_total, seed);
  return load_layout_file(source);
}

void print_layout_problems(const ChargerLayout& layout, const Scenario& scenario) {
  const auto v = validate_layout(layout, scenario.sites, scenario.fast_chargers_total);
  if (v.empty()) return;
  std::vector<std::string> msgs;
  for (const auto& x : v) msgs.push_back(x.message);
  throw ValidationError(msgs);
}

// ---- generate-demand -------------------------------------------------------------------------

struct GenerateDemandArgs {
  int requests = 0;
  std::string profile;
};

int cmd_generate_demand(const Global& g, const GenerateDemandArgs& a) {
  if (a.profile.empty()) throw UsageError("--profile is required");
  if (a.requests < 0) throw UsageError("--requests must be non-negative");
  const DemandProfile profile = resolve_profile(a.profile);
  const auto demand = generate_demand(profile, static_cast<std::size_t>(a.requests), g.seed);
  const ordered_json au =
      audit("generate-demand", g,
            {{"requests", a.requests}, {"profile", a.profile}, {"resolved_profile", profile_to_json(profile)}});
  const auto write = [&](std::ostream& out) {
    write_csv_audit(out, au);
    write_demand_csv(out, demand);
  };
  if (g.out.empty() || g.out == "-") {
    write(std::cout);
  } else {
    if (fs::path(g.out).has_parent_path()) ensure_dir(fs::path(g.out).parent_path().string());
    auto f = open_out(g.out);
    write(f);
  }
  return 0;
}

// ---- generate-scenario -----------------------------------------------------------------------

int cmd_generate_scenario(const Global& g, const SyntheticScenarioSpec& spec) {
  Scenario sc = make_synthetic_scenario(spec, g.seed);
  ordered_json doc = scenario_to_json(sc);
  doc["audit"] = audit("generate-scenario", g,
                       {{"sites", spec.sites},
                        {"slow_chargers_per_site", spec.slow_chargers_per_site},
                        {"fast_cap_per_site", spec.fast_cap_per_site},
                        {"depots", spec.depots},
                        {"vehicles", spec.vehicles},
                        {"fast_chargers_total", spec.fast_chargers_total}});
  if (g.out.empty() || g.out == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    if (fs::path(g.out).has_parent_path()) ensure_dir(fs::path(g.out).parent_path().string());
    auto f = open_out(g.out);
    f << doc.dump(2) << '\n';
  }
  return 0;
}

// ---- simulate --------------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  DemandSource demand;
  std::string policy = "ocp-a";
  std::string layout = "scenario";
  bool event_log = false;
  bool details = false;
};

void print_summary(std::ostream& out, const MetricsReport& r) {
  const ChargeStats cs = charge_stats(r);
  std::vector<std::vector<std::string>> rows{
      {"policy", to_string(r.policy)},
      {"z_minutes", fixed(r.z, 2)},
      {"recharges", std::to_string(cs.n)},
      {"avg_charge_wait_min", fixed(cs.wait.mean, 2) + " (" + fixed(cs.wait.sd, 2) + ")"},
      {"avg_charge_time_min", fixed(cs.time.mean, 2) + " (" + fixed(cs.time.sd, 2) + ")"},
      {"total_fleet_wait_hours", fixed(r.total_fleet_wait_hours, 2)},
      {"mwt_min", fixed(r.mwt, 2)},
      {"mjt_min", fixed(r.mjt, 2)},
      {"served", std::to_string(r.served) + " / " + std::to_string(r.served + r.rejected)},
      {"served_rate", fixed(r.served_rate, 4)},
      {"kwh_charged", fixed(r.total_kwh_charged, 1)},
      {"mean_km_per_vehicle", fixed(r.mean_km_per_vehicle, 1)},
      {"reserve_breaches", std::to_string(r.reserve_breaches)},
      {"replans", std::to_string(r.replans)},
      {"digest", r.digest}};
  write_text_table(out, {"metric", "value"}, rows);
}

int cmd_simulate(const Global& g, const SimulateArgs& a) {
  const Policy policy = resolve_policy(a.policy);
  const std::string scenario_path = resolve_scenario_path(a.scenario);
  const Scenario scenario = load_scenario(scenario_path);
  const auto demand = resolve_demand(a.demand, g.seed);
  const ChargerLayout layout = resolve_layout(a.layout, scenario, demand, g.seed);
  print_layout_problems(layout, scenario);

  SimulationOptions opts;
  opts.policy = policy;
  opts.seed = g.seed;
  opts.record_events = a.event_log;
  const MetricsReport report = run_simulation(scenario, layout, demand, opts);

  ordered_json args = demand_args(a.demand);
  args["scenario"] = scenario_path;
  args["policy"] = to_string(policy);
  args["layout_source"] = a.layout;
  args["layout"] = layout_to_json(layout);
  args["event_log"] = a.event_log;
  ordered_json doc = report_to_json(report, a.details);
  doc["audit"] = audit("simulate", g, args);

  if (!g.out.empty()) {
    ensure_dir(g.out);
    auto f = open_out(fs::path(g.out) / "report.json");
    f << doc.dump(2) << '\n';
    if (a.event_log) {
      auto e = open_out(fs::path(g.out) / "events.csv");
      write_csv_audit(e, doc["audit"]);
      write_event_log_csv(e, report.events);
    }
  } else if (a.event_log) {
    throw UsageError("--event-log needs --out DIR");
  }
  const OutputFormat fmt = parse_format(g.format);
  if (fmt == OutputFormat::json) {
    std::cout << doc.dump(2) << '\n';
  } else if (fmt == OutputFormat::csv) {
    write_csv_audit(std::cout, doc["audit"]);
    write_comparison(std::cout, compare_policies({{policy, report}}), OutputFormat::csv);
  } else {
    print_summary(std::cout, report);
  }
  return 0;
}

// ---- compare ---------------------------------------------------------------------------------

struct CompareArgs {
  std::string scenario;
  DemandSource demand;
  std::string policies = "ncp,fcfs,ocp,ocp-a";
  int seeds = 1;
  std::string layout = "scenario";
};

std::vector<Policy> parse_policy_list(const std::string& list) {
  std::vector<Policy> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const Policy p = resolve_policy(item);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  if (out.empty()) throw UsageError("--policies must name at least one policy");
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_compare(const Global& g, const CompareArgs& a) {
  if (a.seeds < 1) throw UsageError("--seeds must be at least 1");
  const auto policies = parse_policy_list(a.policies);
  const std::string scenario_path = resolve_scenario_path(a.scenario);
  const Scenario scenario = load_scenario(scenario_path);

  struct Job {
    std::uint64_t seed;
    Policy policy;
  };
  std::vector<Job> jobs;
  std::vector<std::vector<Request>> demands;
  std::vector<ChargerLayout> layouts;
  for (int s = 0; s < a.seeds; ++s) {
    const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(s);
    demands.push_back(resolve_demand(a.demand, seed));
    layouts.push_back(resolve_layout(a.layout, scenario, demands.back(), seed));
    print_layout_problems(layouts.back(), scenario);
    for (Policy p : policies) jobs.push_back({seed, p});
  }
  const auto reports = parallel_map<MetricsReport>(jobs.size(), g.jobs, [&](std::size_t i) {
    const std::size_t s = static_cast<std::size_t>(jobs[i].seed - g.seed);
    SimulationOptions opts;
    opts.policy = jobs[i].policy;
    opts.seed = jobs[i].seed;
    return run_simulation(scenario, layouts[s], demands[s], opts);
  });

  std::vector<std::vector<ComparisonRow>> runs;
  for (int s = 0; s < a.seeds; ++s) {
    std::map<Policy, MetricsReport> by_policy;
    for (std::size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].seed == g.seed + static_cast<std::uint64_t>(s)) by_policy[jobs[i].policy] = reports[i];
    runs.push_back(compare_policies(by_policy));
  }

  const OutputFormat fmt = parse_format(g.format);
  ordered_json args = demand_args(a.demand);
  args["scenario"] = scenario_path;
  args["policies"] = a.policies;
  args["seeds"] = a.seeds;
  args["layout_source"] = a.layout;
  const ordered_json au = audit("compare", g, args);

  const auto emit = [&](std::ostream& out, OutputFormat f) {
    if (a.seeds == 1) {
      if (f == OutputFormat::json) {
        std::ostringstream body;
        write_comparison(body, runs.front(), f);
        ordered_json doc{{"audit", au}, {"rows", ordered_json::parse(body.str())}};
        out << doc.dump(2) << '\n';
      } else {
        if (f == OutputFormat::csv) write_csv_audit(out, au);
        write_comparison(out, runs.front(), f);
      }
    } else {
      const auto agg = aggregate(runs);
      if (f == OutputFormat::json) {
        std::ostringstream body;
        write_aggregate(body, agg, f);
        ordered_json doc{{"audit", au}, {"rows", ordered_json::parse(body.str())}};
        out << doc.dump(2) << '\n';
      } else {
        if (f == OutputFormat::csv) write_csv_audit(out, au);
        write_aggregate(out, agg, f);
      }
    }
  };
  emit(std::cout, fmt);
  if (!g.out.empty()) {
    ensure_dir(g.out);
    auto csv = open_out(fs::path(g.out) / "comparison.csv");
    emit(csv, OutputFormat::csv);
    auto js = open_out(fs::path(g.out) / "comparison.json");
    emit(js, OutputFormat::json);
  }
  return 0;
}

// ---- optimize --------------------------------------------------------------------------------

struct OptimizeArgs {
  std::string scenario;
  DemandSource demand;
  std::string policy = "ocp-a";
  int budget = 100;
  int patience = 15;
  int restarts = 1;
  int replications = 1;
  std::string kernel = "cubic";
  double gamma = 0.5;
  std::string oracle;
  std::string baseline;
  double oracle_limit = 5000;
};

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "iter,layout,z_minutes,best_so_far\n";
  const auto old = out.precision(17);
  for (const auto& t : trace)
    out << t.iteration << ',' << layout_to_string(t.u) << ',' << t.z << ',' << t.best_so_far << '\n';
  out.precision(old);
}

int cmd_optimize(const Global& g, const OptimizeArgs& a) {
  if (a.restarts < 1) throw UsageError("--restarts must be at least 1");
  if (a.replications < 1) throw UsageError("--replications must be at least 1");
  if (a.budget < 1) throw UsageError("--budget must be at least 1");
  if (!a.oracle.empty() && a.oracle != "enumerate") throw UsageError("--oracle accepts only 'enumerate'");
  if (!a.baseline.empty() && a.baseline != "kmeans") throw UsageError("--baseline accepts only 'kmeans'");
  RbfKernel kernel;
  if (a.kernel == "cubic") {
    kernel = RbfKernel::cubic;
  } else if (a.kernel == "gaussian") {
    kernel = RbfKernel::gaussian;
  } else {
    throw UsageError("--kernel must be cubic or gaussian");
  }
  const Policy policy = resolve_policy(a.policy);
  const std::string scenario_path = resolve_scenario_path(a.scenario);
  const Scenario scenario = load_scenario(scenario_path);
  std::vector<std::vector<Request>> demands;
  for (int r = 0; r < a.replications; ++r)
    demands.push_back(resolve_demand(a.demand, g.seed + static_cast<std::uint64_t>(r)));
  const Blackbox box = simulation_blackbox(scenario, demands, policy, g.seed);
  const LayoutSpace space = LayoutSpace::from_sites(scenario.sites, scenario.fast_chargers_total);
  if (space.empty()) throw ValidationError({"no feasible layout: site caps sum below the charger total"});

  const auto results = parallel_map<SoResult>(static_cast<std::size_t>(a.restarts), g.jobs, [&](std::size_t r) {
    SoOptions o;
    o.budget = a.budget;
    o.patience = a.patience;
    o.kernel = kernel;
    o.gamma = a.gamma;
    o.seed = mix_seed(g.seed, r);
    return so_optimize(box, space, o);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].best_z < results[best].best_z) best = r;
  const SoResult& top = results[best];

  ordered_json summary;
  summary["best_restart"] = best;
  summary["best_z_minutes"] = top.best_z;
  summary["layout"] = layout_to_json(ChargerLayout::from_vector(scenario.sites, top.best));
  summary["restarts"] = ordered_json::array();
  for (const auto& r : results) {
    summary["restarts"].push_back({{"best_z_minutes", r.best_z},
                                   {"best_layout", layout_to_string(r.best)},
                                   {"evaluations", r.evaluations},
                                   {"failures", r.failures.size()}});
  }

  std::vector<std::vector<std::string>> table{{"so", fixed(top.best_z, 2), layout_to_string(top.best)}};
  if (a.baseline == "kmeans") {
    const ChargerLayout km = kmeans_layout(dropoffs(demands.front()), scenario.sites,
                                           scenario.fast_chargers_total, g.seed);
    const Layout u = km.as_vector(scenario.sites);
    const double z = box(u);
    summary["kmeans"] = {{"z_minutes", z},
                         {"layout", layout_to_json(km)},
                         {"relative_to_so", top.best_z > 0 ? (z - top.best_z) / top.best_z : 0.0}};
    table.push_back({"kmeans", fixed(z, 2), layout_to_string(u)});
  }
  if (a.oracle == "enumerate") {
    const auto all = enumerate_layouts(space, a.oracle_limit);
    const auto zs = parallel_map<double>(all.size(), g.jobs, [&](std::size_t i) { return box(all[i]); });
    std::size_t arg = 0;
    for (std::size_t i = 1; i < zs.size(); ++i)
      if (zs[i] < zs[arg]) arg = i;
    summary["oracle"] = {{"layouts", all.size()},
                         {"optimum_z_minutes", zs[arg]},
                         {"optimum_layout", layout_to_string(all[arg])},
                         {"so_gap", zs[arg] > 0 ? (top.best_z - zs[arg]) / zs[arg] : 0.0}};
    table.push_back({"enumerate", fixed(zs[arg], 2), layout_to_string(all[arg])});
  }

  ordered_json args = demand_args(a.demand);
  args["scenario"] = scenario_path;
  args["policy"] = to_string(policy);
  args["budget"] = a.budget;
  args["patience"] = a.patience;
  args["restarts"] = a.restarts;
  args["replications"] = a.replications;
  args["kernel"] = a.kernel;
  args["gamma"] = a.gamma;
  args["oracle"] = a.oracle;
  args["baseline"] = a.baseline;
  summary["audit"] = audit("optimize", g, args);

  if (!g.out.empty()) {
    ensure_dir(g.out);
    auto f = open_out(fs::path(g.out) / "best_layout.json");
    f << summary.dump(2) << '\n';
    for (std::size_t r = 0; r < results.size(); ++r) {
      auto t = open_out(fs::path(g.out) / ("trace_restart" + std::to_string(r) + ".csv"));
      write_csv_audit(t, summary["audit"]);
      write_trace_csv(t, results[r].trace);
    }
  }
  const OutputFormat fmt = parse_format(g.format);
  if (fmt == OutputFormat::json) {
    std::cout << summary.dump(2) << '\n';
  } else if (fmt == OutputFormat::csv) {
    write_csv_audit(std::cout, summary["audit"]);
    write_trace_csv(std::cout, top.trace);
  } else {
    write_text_table(std::cout, {"method", "z_minutes", "layout"}, table);
    for (const auto& r : results)
      for (const auto& f : r.failures)
        std::cerr << "warning: layout " << layout_to_string(f.u) << " failed: " << f.message << '\n';
  }
  return 0;
}

// ---- emissions -------------------------------------------------------------------------------

struct EmissionsArgs {
  EmissionsInput input;
  std::string from_report;
};

int cmd_emissions(const Global& g, EmissionsArgs a) {
  ordered_json args;
  if (!a.from_report.empty()) {
    std::ifstream f(a.from_report);
    if (!f) throw InputError("cannot open report '" + a.from_report + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(a.from_report, 0, "", e.what());
    }
    a.input = emissions_from_json(doc, a.input);
    args["from_report"] = a.from_report;
  }
  const EmissionsInput& in = a.input;
  const double savings = annual_co2_savings(in);
  const double generated = generation_emissions(in.kwh_per_day, in.grid_intensity, in.op_days_per_year);
  args["km_per_vehicle_day"] = in.km_per_vehicle_day;
  args["fleet_size"] = in.fleet_size;
  args["op_days_per_year"] = in.op_days_per_year;
  args["gasoline_g_per_km"] = in.gasoline_rate;
  args["kwh_per_day"] = in.kwh_per_day;
  args["grid_g_per_kwh"] = in.grid_intensity;

  ordered_json doc;
  doc["co2_savings_t_per_year"] = savings;
  doc["generation_t_per_year"] = generated;
  doc["audit"] = audit("emissions", g, args);

  std::ostringstream text;
  const OutputFormat fmt = parse_format(g.format);
  if (fmt == OutputFormat::json) {
    text << doc.dump(2) << '\n';
  } else if (fmt == OutputFormat::csv) {
    write_csv_audit(text, doc["audit"]);
    text << "co2_savings_t_per_year,generation_t_per_year\n" << std::setprecision(17) << savings << ','
         << generated << '\n';
  } else {
    write_text_table(text, {"quantity", "t/year"},
                     {{"tailpipe CO2 avoided", fixed(savings, 1)},
                      {"generation CO2eq", fixed(generated, 2)}});
  }
  std::cout << text.str();
  if (!g.out.empty()) {
    ensure_dir(g.out);
    auto f = open_out(fs::path(g.out) / "emissions.json");
    f << doc.dump(2) << '\n';
  }
  return 0;
}

void add_demand_options(CLI::App* cmd, DemandSource& d) {
  cmd->add_option("--demand", d.demand_path, "Demand CSV file");
  cmd->add_option("--profile", d.profile, "Generate demand: table1|weekday|uniform|PROFILE.json");
  cmd->add_option("-n,--requests", d.requests, "Requests to generate with --profile")->capture_default_str();
}

int run(int argc, char** argv) {
  CLI::App app{"Electric dial-a-ride fleet charging: simulation, policy comparison and charger siting"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Parallel simulations")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (generate-*) or directory");
  app.add_option("--format", g.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "table", "json"}));

  GenerateDemandArgs gd;
  auto* c_gd = app.add_subcommand("generate-demand", "Write a synthetic demand CSV");
  c_gd->add_option("-n,--requests", gd.requests, "Number of requests")->required();
  c_gd->add_option("--profile", gd.profile, "table1|weekday|uniform|PROFILE.json");

  SyntheticScenarioSpec ss;
  auto* c_gs = app.add_subcommand("generate-scenario", "Write a synthetic scenario JSON");
  c_gs->add_option("--sites", ss.sites)->capture_default_str();
  c_gs->add_option("--slow-per-site", ss.slow_chargers_per_site)->capture_default_str();
  c_gs->add_option("--fast-cap", ss.fast_cap_per_site)->capture_default_str();
  c_gs->add_option("--depots", ss.depots)->capture_default_str();
  c_gs->add_option("--vehicles", ss.vehicles)->capture_default_str();
  c_gs->add_option("--fast-total", ss.fast_chargers_total)->capture_default_str();

  SimulateArgs sa;
  auto* c_sim = app.add_subcommand("simulate", "Simulate one service day");
  c_sim->add_option("--scenario", sa.scenario, std::string("Scenario JSON (default $") + kScenarioDirEnv + "/scenario.json)");
  add_demand_options(c_sim, sa.demand);
  c_sim->add_option("--policy", sa.policy, "ncp|fcfs|ocp|ocp-a")->capture_default_str();
  c_sim->add_option("--layout", sa.layout, "scenario|kmeans|LAYOUT.json")->capture_default_str();
  c_sim->add_flag("--event-log", sa.event_log, "Also write events.csv to --out");
  c_sim->add_flag("--details", sa.details, "Include per-request and per-epoch records");

  CompareArgs ca;
  auto* c_cmp = app.add_subcommand("compare", "Compare charging policies");
  c_cmp->add_option("--scenario", ca.scenario, "Scenario JSON");
  add_demand_options(c_cmp, ca.demand);
  c_cmp->add_option("--policies", ca.policies, "Comma-separated subset")->capture_default_str();
  c_cmp->add_option("--seeds", ca.seeds, "Seeds seed..seed+N-1, reported as mean (sd)")->capture_default_str();
  c_cmp->add_option("--layout", ca.layout, "scenario|kmeans|LAYOUT.json")->capture_default_str();

  OptimizeArgs oa;
  auto* c_opt = app.add_subcommand("optimize", "Surrogate optimization of fast-charger placement");
  c_opt->add_option("--scenario", oa.scenario, "Scenario JSON");
  add_demand_options(c_opt, oa.demand);
  c_opt->add_option("--policy", oa.policy, "Policy used inside the simulator")->capture_default_str();
  c_opt->add_option("--budget", oa.budget, "Blackbox evaluations per restart")->capture_default_str();
  c_opt->add_option("--patience", oa.patience, "Stop after this many evaluations without improvement")
      ->capture_default_str();
  c_opt->add_option("--restarts", oa.restarts)->capture_default_str();
  c_opt->add_option("--replications", oa.replications, "Demand sets averaged per evaluation")
      ->capture_default_str();
  c_opt->add_option("--kernel", oa.kernel, "cubic|gaussian")->capture_default_str();
  c_opt->add_option("--gamma", oa.gamma, "Gaussian kernel shape")->capture_default_str();
  c_opt->add_option("--oracle", oa.oracle, "enumerate: also evaluate every feasible layout");
  c_opt->add_option("--oracle-limit", oa.oracle_limit, "Refuse enumeration above this many layouts")
      ->capture_default_str();
  c_opt->add_option("--baseline", oa.baseline, "kmeans: also evaluate the k-means layout");

  EmissionsArgs ea;
  ea.input.km_per_vehicle_day = 534.0;
  ea.input.fleet_size = 50;
  auto* c_em = app.add_subcommand("emissions", "Annual CO2 arithmetic");
  c_em->add_option("--km", ea.input.km_per_vehicle_day, "km per vehicle per day")->capture_default_str();
  c_em->add_option("--fleet", ea.input.fleet_size)->capture_default_str();
  c_em->add_option("--days", ea.input.op_days_per_year)->capture_default_str();
  c_em->add_option("--gasoline-rate", ea.input.gasoline_rate, "g CO2 per km")->capture_default_str();
  c_em->add_option("--kwh", ea.input.kwh_per_day, "kWh charged per day")->capture_default_str();
  c_em->add_option("--grid", ea.input.grid_intensity, "g CO2eq per kWh")->capture_default_str();
  c_em->add_option("--from-report", ea.from_report, "Take km, fleet size and kWh from report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_gd->parsed()) return cmd_generate_demand(g, gd);
    if (c_gs->parsed()) return cmd_generate_scenario(g, ss);
    if (c_sim->parsed()) return cmd_simulate(g, sa);
    if (c_cmp->parsed()) return cmd_compare(g, ca);
    if (c_opt->parsed()) return cmd_optimize(g, oa);
    if (c_em->parsed()) return cmd_emissions(g, ea);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const auto& p : e.problems()) std::cerr << "  - " << p << '\n';
    return 1;
  } catch (const ModelViolation& e) {
    std::cerr << "model violation: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace
}  // namespace evcharge::cli

int main(int argc, char** argv) { return evcharge::cli::run(argc, argv); }
