#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "evcharge/assignment.hpp"
#include "evcharge/error.hpp"
#include "generators.hpp"

using namespace evcharge;

namespace {

// Independent oracle: enumerate every injective map of the smaller side into the larger one via
// permutations, keep the best (cardinality, cost) pair.
std::pair<std::size_t, double> permutation_oracle(const AssignmentInstance& in) {
  const ArcMatrix a = build_arc_costs(in);
  const std::size_t nv = a.rows(), nc = a.cols();
  const std::size_t n = std::max(nv, nc);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t best_card = 0;
  double best_cost = 0.0;
  do {
    std::size_t card = 0;
    double cost = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
      const std::size_t j = perm[i];
      if (j < nc && a(i, j).feasible) {
        ++card;
        cost += a(i, j).total;
      }
    }
    if (card > best_card || (card == best_card && cost < best_cost)) {
      best_card = card;
      best_cost = cost;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best_card, best_cost};
}

AssignmentInstance::Charger fast_at(int id, Point where, double available_in = 0.0) {
  return {id, kFastPowerKwhPerMin, available_in, where};
}

}  // namespace

TEST(ArcCost, WorkedExample) {
  FleetParams p;
  const ArcCost a = arc_cost({0, 10.0, {0, 0}}, fast_at(0, {3, 4}), p);
  EXPECT_TRUE(a.feasible);
  EXPECT_DOUBLE_EQ(a.distance_km, 5.0);
  EXPECT_DOUBLE_EQ(a.travel, 6.0);
  EXPECT_NEAR(a.arrival_soc, 10.0 - 0.2387 * 5.0, 1e-12);
  EXPECT_NEAR(a.energy, 19.8335, 1e-9);
  EXPECT_NEAR(a.charge, 23.8002, 1e-9);
  EXPECT_DOUBLE_EQ(a.wait, 0.0);
  EXPECT_NEAR(a.total, 29.8002, 1e-9);
}

TEST(ArcCost, WaitIsAvailabilityBeyondTravel) {
  FleetParams p;
  EXPECT_DOUBLE_EQ(arc_cost({0, 10.0, {0, 0}}, fast_at(0, {3, 4}, 10.0), p).wait, 4.0);
  EXPECT_DOUBLE_EQ(arc_cost({0, 10.0, {0, 0}}, fast_at(0, {3, 4}, 5.0), p).wait, 0.0);
}

TEST(ArcCost, ReserveDecidesFeasibility) {
  FleetParams p;
  // Exactly e_min on arrival is allowed.
  const double km = 10.0;
  const ArcCost edge = arc_cost({0, p.e_min + p.efficiency * km, {0, 0}}, fast_at(0, {km, 0}), p);
  EXPECT_TRUE(edge.feasible);
  const ArcCost short_ = arc_cost({0, p.e_min + p.efficiency * km - 1e-6, {0, 0}}, fast_at(0, {km, 0}), p);
  EXPECT_FALSE(short_.feasible);
}

TEST(SolveExact, HandTracedTwoByTwo) {
  AssignmentInstance in;
  in.vehicles = {{0, 6.0, {0, 0}}, {1, 6.0, {10, 0}}};
  in.chargers = {fast_at(0, {10, 0}), fast_at(1, {0, 0})};
  const auto s = solve_exact(in);
  // Crossing the 10 km costs 12 minutes and 2.387 kWh each way; staying put is cheaper.
  EXPECT_EQ(s.pairs.at(0), 1);
  EXPECT_EQ(s.pairs.at(1), 0);
  EXPECT_NEAR(s.objective, 2 * (28.64 - 6.0) / (50.0 / 60.0), 1e-9);
  EXPECT_TRUE(s.problems(in).empty());
}

TEST(SolveExact, CardinalityBeatsCost) {
  // Vehicle 0 can reach both chargers, vehicle 1 only charger 0. The cheapest single arc is
  // (0, 0) but the only two-vehicle matching is {(0,1), (1,0)}.
  AssignmentInstance in;
  in.vehicles = {{0, 20.0, {0, 0}}, {1, 4.0, {1, 0}}};
  in.chargers = {fast_at(0, {0, 0}), fast_at(1, {40, 0})};
  const auto s = solve_exact(in);
  EXPECT_EQ(s.pairs.size(), 2u);
  EXPECT_EQ(s.pairs.at(0), 1);
  EXPECT_EQ(s.pairs.at(1), 0);
}

TEST(SolveExact, MoreVehiclesThanChargersDefersTheCostliest) {
  AssignmentInstance in;
  in.vehicles = {{0, 5.0, {0, 0}}, {1, 7.0, {0, 0}}, {2, 6.0, {0, 0}}};
  in.chargers = {fast_at(0, {0, 0})};
  const auto s = solve_exact(in);
  ASSERT_EQ(s.pairs.size(), 1u);
  EXPECT_EQ(s.pairs.begin()->first, 1);  // fullest battery charges fastest
  EXPECT_EQ(s.deferred, (std::set<int>{0, 2}));
}

TEST(SolveExact, ExactTiesGoToLowerIds) {
  AssignmentInstance in;
  in.vehicles = {{4, 6.0, {0, 0}}, {2, 6.0, {0, 0}}};
  in.chargers = {fast_at(9, {1, 0}), fast_at(3, {1, 0})};
  const auto s = solve_exact(in);
  ASSERT_EQ(s.pairs.size(), 2u);
  EXPECT_EQ(s.pairs.at(2), 3);
  EXPECT_EQ(s.pairs.at(4), 9);

  in.chargers.pop_back();
  const auto one = solve_exact(in);
  EXPECT_EQ(one.pairs.at(2), 9);
  EXPECT_EQ(one.deferred, std::set<int>{4});
}

TEST(SolveExact, NothingFeasibleDefersEveryone) {
  AssignmentInstance in;
  in.vehicles = {{0, 3.6, {0, 0}}};
  in.chargers = {fast_at(0, {30, 0})};
  const auto s = solve_exact(in);
  EXPECT_TRUE(s.pairs.empty());
  EXPECT_EQ(s.deferred, std::set<int>{0});
  EXPECT_DOUBLE_EQ(s.objective, 0.0);
}

TEST(SolveExact, EmptySides) {
  AssignmentInstance in;
  EXPECT_TRUE(solve_exact(in).pairs.empty());
  in.vehicles = {{0, 5.0, {0, 0}}};
  EXPECT_EQ(solve_exact(in).deferred, std::set<int>{0});
}

TEST(SolveExact, MatchesPermutationOracle) {
  Rng rng(42);
  for (int t = 0; t < 300; ++t) {
    const auto in = testkit::random_instance(rng, 1 + rng.below(6), 1 + rng.below(6), t % 2 == 0);
    const auto s = solve_exact(in);
    const auto [card, cost] = permutation_oracle(in);
    ASSERT_EQ(s.pairs.size(), card) << "instance " << t;
    ASSERT_NEAR(s.objective, cost, 1e-9) << "instance " << t;
    ASSERT_TRUE(s.problems(in).empty()) << "instance " << t;
  }
}

TEST(SolveExact, AgreesWithBruteForceIncludingTieBreaks) {
  Rng rng(7);
  for (int t = 0; t < 2000; ++t) {
    // Small regions make most arcs feasible; large ones leave many vehicles stuck.
    const auto in = testkit::random_instance(rng, 1 + rng.below(7), 1 + rng.below(7), t % 4 != 0,
                                              t % 2 ? 8.0 : 40.0);
    const auto a = solve_exact(in);
    const auto b = brute_force(in);
    ASSERT_NEAR(a.objective, b.objective, 1e-9);
    ASSERT_EQ(a.pairs, b.pairs) << "instance " << t;
  }
}

TEST(SolveExact, MaxCardinalityMatchesKuhn) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto in = testkit::random_instance(rng, rng.below(30), rng.below(30), false);
    EXPECT_EQ(solve_exact(in).pairs.size(), max_feasible_cardinality(in));
  }
}

TEST(BruteForce, RefusesLargeInstances) {
  Rng rng(1);
  const auto in = testkit::random_instance(rng, 9, 9, false);
  EXPECT_THROW(brute_force(in), InputError);
}

TEST(Solution, ProblemsCatchTampering) {
  Rng rng(5);
  const auto in = testkit::random_instance(rng, 4, 4, false);
  auto s = solve_exact(in);
  ASSERT_TRUE(s.problems(in).empty());
  auto wrong_sum = s;
  wrong_sum.objective += 1.0;
  EXPECT_FALSE(wrong_sum.problems(in).empty());
  if (s.pairs.size() >= 2) {
    auto dup = s;
    auto it = dup.pairs.begin();
    const int c = it->second;
    ++it;
    it->second = c;
    EXPECT_FALSE(dup.problems(in).empty());
  }
}

TEST(Solution, CsvHasOneLinePerVehicle) {
  AssignmentInstance in;
  in.vehicles = {{0, 5.0, {0, 0}}, {1, 7.0, {0, 0}}};
  in.chargers = {fast_at(0, {0, 0})};
  std::ostringstream out;
  write_solution_csv(out, solve_exact(in));
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.rfind("vehicle,charger,travel,charge,wait,total\n", 0), 0u);
}
