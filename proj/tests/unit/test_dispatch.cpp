#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "evcharge/dispatch.hpp"
#include "evcharge/random.hpp"

using namespace evcharge;

namespace {

VehicleState idle_at(int id, Point where, double soc = 28.64) {
  VehicleState v;
  v.id = id;
  v.location = where;
  v.depot = where;
  v.soc = soc;
  return v;
}

Request request(int id, Point from, Point to, int passengers = 1, double at = 0.0) {
  return {id, at, from, to, passengers};
}

Stop stop(StopKind kind, int ref, Point where, int passengers, double placed = 0.0) {
  return {kind, ref, where, 0.0, passengers, placed};
}

// Random tour of complete and half-complete (already on board) requests.
Tour random_tour(Rng& rng, int capacity) {
  Tour t;
  t.onboard_start = static_cast<int>(rng.below(static_cast<std::uint64_t>(capacity + 1)));
  int onboard_left = t.onboard_start;
  int load = t.onboard_start;
  int next_id = 100;
  const int n = static_cast<int>(rng.below(7));
  std::vector<std::pair<int, int>> open;  // (id, passengers) picked up and not dropped
  for (int k = 0; k < n; ++k) {
    const Point where{rng.uniform(0, 20), rng.uniform(0, 20)};
    const bool drop_onboard = onboard_left > 0 && rng.uniform() < 0.4;
    const bool drop_open = !open.empty() && rng.uniform() < 0.5;
    if (drop_onboard) {
      const int p = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(onboard_left)));
      onboard_left -= p;
      load -= p;
      t.stops.push_back(stop(StopKind::dropoff, next_id++, where, p));
    } else if (drop_open) {
      auto [id, p] = open.back();
      open.pop_back();
      load -= p;
      t.stops.push_back(stop(StopKind::dropoff, id, where, p));
    } else if (load < capacity) {
      const int p = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(capacity - load)));
      load += p;
      open.push_back({next_id, p});
      t.stops.push_back(stop(StopKind::pickup, next_id++, where, p));
    }
  }
  for (auto [id, p] : open) t.stops.push_back(stop(StopKind::dropoff, id, {1, 1}, p));
  return t;
}

// Independent capacity check: walk the full tour after insertion.
bool fits(const Tour& tour, const Request& r, std::size_t p, std::size_t q, int capacity) {
  std::vector<std::pair<int, bool>> deltas;  // (change, is new)
  for (std::size_t k = 0; k <= tour.stops.size(); ++k) {
    if (k == p) deltas.push_back({r.passengers, true});
    if (k == q) deltas.push_back({-r.passengers, true});
    if (k < tour.stops.size()) {
      const auto& s = tour.stops[k];
      deltas.push_back({s.kind == StopKind::pickup ? s.passengers
                        : s.kind == StopKind::dropoff ? -s.passengers : 0, false});
    }
  }
  int load = tour.onboard_start;
  for (auto [d, _] : deltas) {
    load += d;
    if (load > capacity) return false;
  }
  return true;
}

}  // namespace

TEST(TourCost, HandComputedSingleRequest) {
  FleetParams p;
  Tour t;
  t.stops = {stop(StopKind::pickup, 1, {5, 0}, 1), stop(StopKind::dropoff, 1, {5, 10}, 1)};
  const DispatchCost c = tour_cost({0, 0}, 0.0, t, 0.5, 0.025, p);
  EXPECT_DOUBLE_EQ(c.travel, 18.0);
  EXPECT_DOUBLE_EQ(c.passenger_burden, 18.0);
  EXPECT_NEAR(c.combined, 0.5 * 18 + 0.5 * (0.025 * 324 + 18), 1e-12);
}

TEST(TourCost, BurdenCountsPassengersAndRequestTime) {
  FleetParams p;
  Tour t;
  t.stops = {stop(StopKind::dropoff, 1, {0, 10}, 3, -5.0)};
  const DispatchCost c = tour_cost({0, 0}, 0.0, t, 1.0, 0.0, p);
  EXPECT_DOUBLE_EQ(c.passenger_burden, 3 * (12.0 + 5.0));
  EXPECT_DOUBLE_EQ(c.combined, 12.0);  // alpha = 1 keeps only T
}

TEST(Insertions, EmptyTourCountsAllOrderedPairs) {
  Tour t;
  for (int n = 0; n < 5; ++n) {
    EXPECT_EQ(feasible_insertions(t, 1, 8).size(), static_cast<std::size_t>((n + 1) * (n + 2) / 2));
    t.stops.push_back(stop(n % 2 ? StopKind::dropoff : StopKind::pickup, n / 2, {0, 0}, 1));
  }
}

TEST(Insertions, CapacityBlocksEarlyPickup) {
  Tour t;
  t.onboard_start = 7;
  t.stops = {stop(StopKind::dropoff, 1, {0, 0}, 3)};
  const auto ins = feasible_insertions(t, 2, 8);
  ASSERT_EQ(ins.size(), 1u);
  EXPECT_EQ(ins[0], (Insertion{1, 1}));
  EXPECT_TRUE(feasible_insertions(t, 9, 8).empty());
}

TEST(Insertions, MatchesIndependentEnumeration) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const int capacity = 1 + static_cast<int>(rng.below(8));
    const Tour t = random_tour(rng, capacity);
    ASSERT_TRUE(t.problems(capacity).empty());
    const Request r = request(1, {1, 2}, {3, 4}, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(capacity))));
    std::set<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t p = 0; p <= t.stops.size(); ++p)
      for (std::size_t q = p; q <= t.stops.size(); ++q)
        if (fits(t, r, p, q, capacity)) expected.insert({p, q});
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& i : feasible_insertions(t, r.passengers, capacity)) {
      got.insert({i.pickup_pos, i.dropoff_pos});
      const Tour after = insert_request(t, r, i);
      ASSERT_EQ(after.stops.size(), t.stops.size() + 2);
      ASSERT_TRUE(after.problems(capacity).empty());
    }
    ASSERT_EQ(got, expected) << "trial " << trial;
  }
}

TEST(InsertRequest, PlacesPickupBeforeDropoffAtSamePosition) {
  Tour t;
  t.stops = {stop(StopKind::pickup, 7, {1, 1}, 1)};
  const Tour a = insert_request(t, request(3, {0, 0}, {2, 2}), {1, 1});
  ASSERT_EQ(a.stops.size(), 3u);
  EXPECT_EQ(a.stops[0].ref, 7);
  EXPECT_EQ(a.stops[1].kind, StopKind::pickup);
  EXPECT_EQ(a.stops[2].kind, StopKind::dropoff);
  const Tour b = insert_request(t, request(3, {0, 0}, {2, 2}), {0, 1});
  EXPECT_EQ(b.stops[0].kind, StopKind::pickup);
  EXPECT_EQ(b.stops[0].ref, 3);
  EXPECT_EQ(b.stops[1].ref, 7);
  EXPECT_EQ(b.stops[2].ref, 3);
}

TEST(BestInsertion, IdleVehicleMarginalIsWholeTourCost) {
  FleetParams p;
  const auto choice = best_insertion(idle_at(0, {0, 0}), request(1, {5, 0}, {5, 10}), 0.0, p);
  ASSERT_TRUE(choice);
  EXPECT_NEAR(choice->marginal, 22.05, 1e-12);
  EXPECT_DOUBLE_EQ(choice->tour.stops[0].planned_arrival, 6.0);
  EXPECT_DOUBLE_EQ(choice->tour.stops[1].planned_arrival, 18.0);
}

TEST(BestInsertion, IsTheMinimumOverAllInsertions) {
  FleetParams p;
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    VehicleState v = idle_at(0, {rng.uniform(0, 20), rng.uniform(0, 20)});
    v.tour = random_tour(rng, p.capacity);
    v.status = v.tour.empty() ? VehicleStatus::idle : VehicleStatus::serving;
    v.leg_start = 0.0;
    const double now = rng.uniform(0, 5);
    const Request r = request(1, {rng.uniform(0, 20), rng.uniform(0, 20)},
                              {rng.uniform(0, 20), rng.uniform(0, 20)}, 1, now);
    const auto choice = best_insertion(v, r, now, p);
    const Point from = v.position_at(now, p);
    const double base = tour_cost(from, now, v.tour, p.alpha, p.beta, p).combined;
    double best = 1e300;
    for (const auto& i : feasible_insertions(v.tour, 1, p.capacity)) {
      const Tour t = insert_request(v.tour, r, i);
      double km = 0.0;
      Point at = from;
      for (const auto& st : t.stops) {
        km += std::hypot(st.location.x - at.x, st.location.y - at.y);
        at = st.location;
      }
      km += std::hypot(v.depot.x - at.x, v.depot.y - at.y);
      if (v.soc_at(now, p) - p.efficiency * km < p.e_min) continue;
      best = std::min(best, tour_cost(from, now, t, p.alpha, p.beta, p).combined - base);
    }
    if (best == 1e300) {
      EXPECT_FALSE(choice);
    } else {
      ASSERT_TRUE(choice);
      EXPECT_NEAR(choice->marginal, best, 1e-9);
      EXPECT_GE(choice->marginal, -1e-9);  // inserting never shortens a tour
    }
  }
}

TEST(BestInsertion, EnergyReserveIncludesReturnToDepot) {
  FleetParams p;
  // Tour 5 + 10 km, back to depot ~11.18 km.
  const double km = 5.0 + 10.0 + std::hypot(5.0, 10.0);
  VehicleState enough = idle_at(0, {0, 0}, p.e_min + p.efficiency * km + 1e-9);
  VehicleState short_ = idle_at(0, {0, 0}, p.e_min + p.efficiency * km - 1e-6);
  EXPECT_TRUE(best_insertion(enough, request(1, {5, 0}, {5, 10}), 0.0, p));
  EXPECT_FALSE(best_insertion(short_, request(1, {5, 0}, {5, 10}), 0.0, p));
}

TEST(AcceptsCustomers, ExcludesFlaggedPlannedAndCharging) {
  VehicleState v = idle_at(0, {0, 0});
  EXPECT_TRUE(accepts_customers(v));
  v.status = VehicleStatus::serving;
  EXPECT_TRUE(accepts_customers(v));
  v.flagged = true;
  EXPECT_FALSE(accepts_customers(v));
  v.flagged = false;
  v.planned_charger = 3;
  EXPECT_FALSE(accepts_customers(v));
  v.planned_charger.reset();
  for (auto s : {VehicleStatus::to_charger, VehicleStatus::queued, VehicleStatus::charging,
                 VehicleStatus::deferred}) {
    v.status = s;
    EXPECT_FALSE(accepts_customers(v));
  }
}

TEST(Dispatch, PicksCheapestVehicleAndBreaksTiesById) {
  FleetParams p;
  std::vector<VehicleState> fleet = {idle_at(5, {0, 0}), idle_at(2, {0, 0}), idle_at(9, {20, 20})};
  const auto d = dispatch_request(request(1, {1, 0}, {3, 0}), fleet, 0.0, p);
  ASSERT_TRUE(d);
  EXPECT_EQ(fleet[d->vehicle].id, 2);

  fleet[1].flagged = true;
  EXPECT_EQ(fleet[dispatch_request(request(1, {1, 0}, {3, 0}), fleet, 0.0, p)->vehicle].id, 5);
  const auto far = dispatch_request(request(1, {19, 20}, {20, 19}), fleet, 0.0, p);
  EXPECT_EQ(fleet[far->vehicle].id, 9);
  EXPECT_EQ(candidate_vehicles(request(1, {1, 0}, {3, 0}), fleet, 0.0, p),
            (std::vector<std::size_t>{0, 2}));
}

TEST(Dispatch, RejectsWhenNoVehicleQualifies) {
  FleetParams p;
  std::vector<VehicleState> fleet = {idle_at(0, {0, 0}, p.e_min + 0.1)};
  EXPECT_FALSE(dispatch_request(request(1, {10, 0}, {20, 0}), fleet, 0.0, p));
  fleet[0].soc = p.e_max;
  EXPECT_FALSE(dispatch_request(request(1, {10, 0}, {20, 0}, 9), fleet, 0.0, p));
  EXPECT_TRUE(dispatch_request(request(1, {10, 0}, {20, 0}, 8), fleet, 0.0, p));
}
