#include <gtest/gtest.h>

#include <cmath>

#include "evcharge/policies.hpp"
#include "evcharge/random.hpp"

using namespace evcharge;

namespace {

ChargerState charger(int id, Point where, double power = kFastPowerKwhPerMin) {
  ChargerState c;
  c.charger = {id, 0, where, power, ChargerKind::fast};
  return c;
}

ChargerState busy(ChargerState c, double session_end) {
  c.current = 99;
  c.session_end = session_end;
  return c;
}

VehicleState vehicle(int id, Point where, double soc) {
  VehicleState v;
  v.id = id;
  v.location = where;
  v.depot = where;
  v.soc = soc;
  v.flagged = true;
  return v;
}

}  // namespace

TEST(PolicyNames, RoundTrip) {
  for (Policy p : kAllPolicies) EXPECT_EQ(parse_policy(to_string(p)), p);
  EXPECT_EQ(parse_policy("ocp-a"), Policy::ocp_a);
  EXPECT_FALSE(parse_policy("OCP"));
  EXPECT_FALSE(parse_policy("ocp_a"));
}

TEST(EpochClock, BoundariesAreHalfOpen) {
  EpochClock c{390.0, 30.0, 0};
  EXPECT_EQ(c.epoch_of(390.0), 0);
  EXPECT_EQ(c.epoch_of(419.999), 0);
  EXPECT_EQ(c.epoch_of(420.0), 1);
  EXPECT_DOUBLE_EQ(c.next_boundary(390.0), 420.0);
  EXPECT_DOUBLE_EQ(c.next_boundary(405.0), 420.0);
  EXPECT_DOUBLE_EQ(c.start_of(3), 480.0);
}

TEST(Availability, IdleSessionAndEnRoute) {
  ChargerState c = charger(0, {0, 0});
  EXPECT_DOUBLE_EQ(charger_availability(c, 100.0), 0.0);
  c = busy(c, 112.0);
  EXPECT_DOUBLE_EQ(charger_availability(c, 100.0), 12.0);
  c.en_route.push_back({7, 20.0});
  EXPECT_DOUBLE_EQ(charger_availability(c, 100.0), 32.0);
  c.queue.push_back({8, 95.0, 5.0});
  EXPECT_DOUBLE_EQ(charger_availability(c, 100.0), 37.0);
  c.reservations = 3;  // not departed yet: ignored
  EXPECT_DOUBLE_EQ(charger_availability(c, 100.0), 37.0);
  EXPECT_DOUBLE_EQ(c.residual_busy(100.0), 17.0);
}

TEST(Flagging, ThresholdIsStrict) {
  FleetParams p;
  VehicleState v = vehicle(0, {0, 0}, 0.0);
  v.flagged = false;
  EXPECT_FALSE(flag_low_battery(v, p.recharge_threshold, p));
  EXPECT_TRUE(flag_low_battery(v, std::nextafter(p.recharge_threshold, 0.0), p));
  v.flagged = true;
  EXPECT_FALSE(flag_low_battery(v, 1.0, p));
  v.flagged = false;
  v.status = VehicleStatus::charging;
  EXPECT_FALSE(flag_low_battery(v, 1.0, p));
}

TEST(Ncp, NearestUnoccupiedThenNearestOverall) {
  FleetParams p;
  std::vector<ChargerState> cs = {busy(charger(0, {1, 0}), 50.0), charger(1, {3, 0}),
                                  charger(2, {2, 0})};
  EXPECT_EQ(ncp_select({0, 0}, 10.0, cs, 0.0, p), 2);
  cs[2].queue.push_back({5, 0.0, 10.0});
  EXPECT_EQ(ncp_select({0, 0}, 10.0, cs, 0.0, p), 1);
  // En-route or planned vehicles do not make a charger physically occupied.
  cs[1].en_route.push_back({6, 10.0});
  EXPECT_EQ(ncp_select({0, 0}, 10.0, cs, 0.0, p), 1);
  cs[1] = busy(cs[1], 10.0);
  EXPECT_EQ(ncp_select({0, 0}, 10.0, cs, 0.0, p), 0);
}

TEST(Ncp, ReachabilityAndTies) {
  FleetParams p;
  std::vector<ChargerState> cs = {charger(4, {0, 30}), charger(3, {30, 0}), charger(9, {0, 1})};
  EXPECT_EQ(ncp_select({0, 0}, 4.0, cs, 0.0, p), 9);
  EXPECT_FALSE(ncp_select({0, 0}, p.e_min, std::span(cs).first(2), 0.0, p));
  EXPECT_EQ(ncp_select({0, 0}, 20.0, std::span(cs).first(2), 0.0, p), 3);
}

TEST(Fcfs, WaitingAtTheNearChargerLosesToDrivingFurther) {
  FleetParams p;
  const double soc = 10.0;
  // A: 6 min away, 20 min charge, idle. B: 2 min away, 19 min charge, busy for 15 more minutes.
  const double energy_a = p.e_max - (soc - p.efficiency * 5.0);
  const double energy_b = p.e_max - (soc - p.efficiency * (2.0 / 1.2));
  std::vector<ChargerState> cs = {charger(0, {5, 0}, energy_a / 20.0),
                                  busy(charger(1, {0, 2.0 / 1.2}, energy_b / 19.0), 15.0)};
  const auto e = fcfs_select({0, 0}, soc, cs, 0.0, p);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->charger, 0);
  EXPECT_NEAR(e->total, 26.0, 1e-9);
  EXPECT_NEAR(e->wait, 0.0, 1e-12);

  const auto only_b = fcfs_select({0, 0}, soc, std::span(cs).last(1), 0.0, p);
  EXPECT_NEAR(only_b->travel, 2.0, 1e-9);
  EXPECT_NEAR(only_b->charge, 19.0, 1e-9);
  EXPECT_NEAR(only_b->wait, 13.0, 1e-9);
  EXPECT_NEAR(only_b->total, 34.0, 1e-9);
}

TEST(Fcfs, TiesGoToLowerIdAndStrandedIsNullopt) {
  FleetParams p;
  std::vector<ChargerState> cs = {charger(7, {1, 1}), charger(2, {1, 1})};
  EXPECT_EQ(fcfs_select({0, 0}, 10.0, cs, 0.0, p)->charger, 2);
  EXPECT_FALSE(fcfs_select({40, 40}, p.e_min + 0.01, cs, 0.0, p));
}

TEST(Fcfs, MatchesBruteForceArgmin) {
  FleetParams p;
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ChargerState> cs;
    const int n = 1 + static_cast<int>(rng.below(8));
    for (int j = 0; j < n; ++j) {
      auto c = charger(j, {rng.uniform(0, 30), rng.uniform(0, 30)},
                       rng.uniform() < 0.5 ? p.slow_power : p.fast_power);
      if (rng.uniform() < 0.5) c = busy(c, rng.uniform(0, 40));
      if (rng.uniform() < 0.3) c.queue.push_back({50, 0.0, rng.uniform(0, 40)});
      cs.push_back(c);
    }
    const Point from{rng.uniform(0, 30), rng.uniform(0, 30)};
    const double soc = rng.uniform(p.e_min, p.recharge_threshold);
    int best = -1;
    double best_total = 0.0;
    for (const auto& c : cs) {
      const double km = std::hypot(c.charger.location.x - from.x, c.charger.location.y - from.y);
      const double arrive = soc - p.efficiency * km;
      if (arrive < p.e_min) continue;
      const double t = km / p.speed_kmh * 60.0;
      double residual = c.current ? std::max(0.0, c.session_end) : 0.0;
      for (const auto& w : c.queue) residual += w.session;
      const double total = t + (p.e_max - arrive) / c.charger.power + std::max(0.0, residual - t);
      if (best < 0 || total < best_total - 1e-12) {
        best = c.charger.id;
        best_total = total;
      }
    }
    const auto got = fcfs_select(from, soc, cs, 0.0, p);
    if (best < 0) {
      EXPECT_FALSE(got);
    } else {
      ASSERT_TRUE(got);
      EXPECT_EQ(got->charger, best);
      EXPECT_NEAR(got->total, best_total, 1e-9);
    }
  }
}

TEST(EpochAssign, OcpAUsesOnlyFreeChargers) {
  FleetParams p;
  const VehicleState v = vehicle(5, {0, 0}, 6.0);
  const VehicleState* pending[] = {&v};
  std::vector<ChargerState> cs = {busy(charger(0, {1, 0}), 2.0), charger(1, {10, 0})};

  const EpochPlan a = epoch_assign(pending, cs, EpochMode::ocp_a, 0.0, p);
  ASSERT_EQ(a.plan.size(), 1u);
  EXPECT_EQ(a.plan.at(5).charger, 1);
  EXPECT_EQ(a.instance.chargers.size(), 1u);
  EXPECT_DOUBLE_EQ(a.plan.at(5).estimate.wait, 0.0);

  // Waiting 0.8 min at the near charger beats 12 min of driving.
  const EpochPlan o = epoch_assign(pending, cs, EpochMode::ocp, 0.0, p);
  EXPECT_EQ(o.plan.at(5).charger, 0);
  EXPECT_NEAR(o.plan.at(5).estimate.wait, 0.8, 1e-9);
  EXPECT_NEAR(o.solution.objective, brute_force(o.instance).objective, 1e-9);
  EXPECT_EQ(o.solution.pairs, brute_force(o.instance).pairs);
}

TEST(EpochAssign, ScarceChargersDeferTheRest) {
  FleetParams p;
  const VehicleState a = vehicle(10, {0, 0}, 6.0), b = vehicle(11, {1, 0}, 6.0),
                     c = vehicle(12, {2, 0}, 6.0);
  const VehicleState* pending[] = {&a, &b, &c};
  std::vector<ChargerState> cs = {charger(0, {0, 0}), charger(1, {2, 0})};
  const EpochPlan plan = epoch_assign(pending, cs, EpochMode::ocp, 0.0, p);
  EXPECT_EQ(plan.plan.size(), 2u);
  EXPECT_EQ(plan.deferred.size(), 1u);

  // No free chargers under OCP-A: everyone deferred, in pending order.
  for (auto& s : cs) s = busy(s, 5.0);
  const EpochPlan none = epoch_assign(pending, cs, EpochMode::ocp_a, 0.0, p);
  EXPECT_TRUE(none.plan.empty());
  EXPECT_EQ(none.deferred, (std::vector<int>{10, 11, 12}));
}

TEST(EpochAssign, EarlierPendingWinsExactTies) {
  FleetParams p;
  const VehicleState a = vehicle(20, {0, 0}, 6.0), b = vehicle(3, {0, 0}, 6.0);
  const VehicleState* pending[] = {&a, &b};
  std::vector<ChargerState> cs = {charger(0, {1, 0})};
  const EpochPlan plan = epoch_assign(pending, cs, EpochMode::ocp, 0.0, p);
  EXPECT_TRUE(plan.plan.contains(20));
  EXPECT_EQ(plan.deferred, std::vector<int>{3});
}

TEST(EpochAssign, OcpAPlansNeverWait) {
  FleetParams p;
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<VehicleState> vs;
    const int nv = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < nv; ++i)
      vs.push_back(vehicle(i, {rng.uniform(0, 30), rng.uniform(0, 30)}, rng.uniform(p.e_min, 8.0)));
    std::vector<const VehicleState*> pending;
    for (const auto& v : vs) pending.push_back(&v);
    std::vector<ChargerState> cs;
    const int nc = 1 + static_cast<int>(rng.below(8));
    for (int j = 0; j < nc; ++j) {
      auto c = charger(j, {rng.uniform(0, 30), rng.uniform(0, 30)});
      const double u = rng.uniform();
      if (u < 0.25) c = busy(c, rng.uniform(1, 30));
      else if (u < 0.4) c.en_route.push_back({40, 20.0});
      else if (u < 0.5) c.reservations = 1;
      cs.push_back(c);
    }
    const EpochPlan plan = epoch_assign(pending, cs, EpochMode::ocp_a, 0.0, p);
    for (const auto& [_, pc] : plan.plan) {
      EXPECT_DOUBLE_EQ(pc.estimate.wait, 0.0);
      const auto& c = *std::find_if(cs.begin(), cs.end(), [&](auto& s) { return s.charger.id == pc.charger; });
      EXPECT_TRUE(c.free_and_unclaimed());
    }
    EXPECT_EQ(plan.plan.size() + plan.deferred.size(), pending.size());
  }
}
