#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "audit.hpp"
#include "evcharge/scenario_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

fs::path tmp_root() { return fs::path(EVCHARGE_TEST_TMP); }

CliRun run(const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + tmp_root().string() + "' && " + env + " '" EVCHARGE_CLI "' " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const std::string& text, bool skip_comments) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line))
    if (!line.empty() && !(skip_comments && line[0] == '#')) ++n;
  return n;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::create_directories(tmp_root());
    ASSERT_EQ(run("--out sc.json generate-scenario --sites 8 --depots 2 --vehicles 6 --fast-total 3").code, 0);
    ASSERT_TRUE(fs::exists(tmp_root() / "sc.json"));
    ASSERT_EQ(run("--out d.csv generate-demand --profile uniform -n 80").code, 0);
    ASSERT_TRUE(fs::exists(tmp_root() / "d.csv"));
  }
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("simulate --scenario sc.json --demand d.csv --policy nope").code, 2);
  EXPECT_EQ(run("--format xml emissions").code, 2);
  EXPECT_EQ(run("simulate --scenario sc.json --demand d.csv --event-log").code, 2);
}

TEST_F(Cli, InputErrorsExitOne) {
  EXPECT_EQ(run("simulate --scenario missing.json --demand d.csv").code, 1);
  EXPECT_EQ(run("emissions --km -5").code, 1);
  std::ofstream(tmp_root() / "bad_layout.json") << R"({"NOSUCHSITE": 1})";
  EXPECT_EQ(run("simulate --scenario sc.json --demand d.csv --layout bad_layout.json").code, 1);
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST_F(Cli, SimulateJsonCarriesAudit) {
  const CliRun r = run("--format json --seed 7 simulate --scenario sc.json --demand d.csv --policy ncp");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("policy"), "ncp");
  EXPECT_EQ(j.at("seed"), 7);
  EXPECT_EQ(j.at("served").get<int>() + j.at("rejected").get<int>(), 80);
  const json& a = j.at("audit");
  EXPECT_EQ(a.at("tool"), "evcharge");
  EXPECT_EQ(a.at("command"), "simulate");
  EXPECT_EQ(a.at("seed"), 7);
  EXPECT_EQ(a.at("format"), "json");
  EXPECT_TRUE(a.contains("version"));
  EXPECT_TRUE(a.at("args").contains("policy"));
}

TEST_F(Cli, SimulateIsByteReproducible) {
  const std::string args = "--format csv simulate --scenario sc.json --demand d.csv --policy fcfs";
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("# {", 0), 0u);
  EXPECT_EQ(count_lines(a.out, true), 2);
}

TEST_F(Cli, SimulateWritesReportAndEventLog) {
  fs::remove_all(tmp_root() / "simout");
  ASSERT_EQ(run("--out simout simulate --scenario sc.json --demand d.csv --policy ocp --event-log").code, 0);
  const json report = json::parse(slurp(tmp_root() / "simout" / "report.json"));
  std::ifstream log(tmp_root() / "simout" / "events.csv");
  ASSERT_TRUE(log);
  std::string first;
  std::getline(log, first);
  EXPECT_EQ(first.rfind("# {", 0), 0u);
  log.seekg(0);
  const auto events = evcharge::testkit::read_event_log(log);
  ASSERT_FALSE(events.empty());
  const auto t = evcharge::testkit::totals_from_log(events, 6);
  EXPECT_NEAR(t.z, report.at("z_minutes").get<double>(), 1e-6);
}

TEST_F(Cli, ScenarioDirFromEnvironment) {
  fs::create_directories(tmp_root() / "envdir");
  fs::copy_file(tmp_root() / "sc.json", tmp_root() / "envdir" / "scenario.json",
                fs::copy_options::overwrite_existing);
  const CliRun via_env = run("--format csv simulate --demand d.csv", "EVCHARGE_SCENARIO_DIR=envdir");
  ASSERT_EQ(via_env.code, 0);
  const CliRun direct = run("--format csv simulate --scenario envdir/scenario.json --demand d.csv");
  ASSERT_EQ(direct.code, 0);
  // Audit lines differ in the recorded arguments; the data rows must not.
  EXPECT_EQ(via_env.out.substr(via_env.out.find('\n')), direct.out.substr(direct.out.find('\n')));
}

TEST_F(Cli, CompareFormats) {
  const CliRun csv = run("--format csv compare --scenario sc.json --demand d.csv");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(count_lines(csv.out, true), 5);
  EXPECT_NE(csv.out.find("\nocp-a,"), std::string::npos);

  const CliRun two = run("--format csv compare --scenario sc.json --demand d.csv --policies ncp,ocp-a");
  ASSERT_EQ(two.code, 0);
  EXPECT_EQ(count_lines(two.out, true), 3);

  const CliRun j = run("--format json compare --scenario sc.json --profile uniform -n 60 --seeds 3");
  ASSERT_EQ(j.code, 0);
  EXPECT_TRUE(json::accept(j.out));

  const CliRun table = run("compare --scenario sc.json --demand d.csv");
  ASSERT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("fcfs"), std::string::npos);
}

TEST_F(Cli, CompareIndependentOfJobs) {
  const std::string tail = " --format csv compare --scenario sc.json --profile uniform -n 60 --seeds 3";
  const CliRun one = run("--jobs 1" + tail), many = run("--jobs 3" + tail);
  ASSERT_EQ(one.code, 0);
  ASSERT_EQ(many.code, 0);
  EXPECT_EQ(one.out.substr(one.out.find('\n')), many.out.substr(many.out.find('\n')));
}

TEST_F(Cli, EmissionsDefaults) {
  const CliRun r = run("--format json emissions");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j.at("co2_savings_t_per_year").get<double>(), 534.0 * 50 * 312 * 147 / 1e6);
  const CliRun table = run("emissions");
  EXPECT_NE(table.out.find("1224.6"), std::string::npos);
}

TEST_F(Cli, EmissionsFromReport) {
  fs::remove_all(tmp_root() / "emrep");
  ASSERT_EQ(run("--out emrep simulate --scenario sc.json --demand d.csv").code, 0);
  const json report = json::parse(slurp(tmp_root() / "emrep" / "report.json"));
  const CliRun r = run("--format json emissions --from-report emrep/report.json --fleet 6");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("co2_savings_t_per_year").get<double>(),
              report.at("mean_km_per_vehicle").get<double>() * 6 * 312 * 147 / 1e6, 1e-9);
}

TEST_F(Cli, GeneratedFilesLoad) {
  const auto scenario = evcharge::load_scenario((tmp_root() / "sc.json").string());
  EXPECT_EQ(scenario.fleet_size(), 6);
  const std::string demand = slurp(tmp_root() / "d.csv");
  EXPECT_EQ(count_lines(demand, true), 81);
  const CliRun again = run("generate-demand --profile uniform -n 80");
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(again.out, demand);
}

TEST_F(Cli, OptimizeSmallBudget) {
  fs::remove_all(tmp_root() / "opt");
  const CliRun r = run("--out opt --format json optimize --scenario sc.json --demand d.csv --budget 8 --baseline kmeans");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("restarts").at(0).at("evaluations"), 8);
  EXPECT_TRUE(j.contains("kmeans"));
  EXPECT_TRUE(fs::exists(tmp_root() / "opt" / "best_layout.json"));
  const std::string trace = slurp(tmp_root() / "opt" / "trace_restart0.csv");
  EXPECT_EQ(count_lines(trace, true), 9);
  EXPECT_EQ(run("simulate --scenario sc.json --demand d.csv --layout opt/best_layout.json").code, 0);
}

TEST_F(Cli, OptimizeAgainstEnumeration) {
  const CliRun r = run(
      "--format json optimize --scenario sc.json --profile uniform -n 40 --budget 6 --oracle enumerate "
      "--oracle-limit 100000");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  ASSERT_TRUE(j.contains("oracle"));
  EXPECT_LE(j.at("oracle").at("optimum_z_minutes").get<double>(), j.at("best_z_minutes").get<double>() + 1e-9);
}
