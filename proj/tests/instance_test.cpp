#include "ontime/instance.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ontime {
namespace {

StopNetwork line_network(std::vector<double> travel, int nodes, double max_arrival = kInf) {
  std::vector<double> service(nodes, 5.0);
  std::vector<int> demand(nodes, 1);
  return StopNetwork(std::move(travel), std::move(service), std::move(demand), 20, max_arrival);
}

TEST(RouteCost, SingleStop) {
  auto net = line_network({0, 10, 10, 0}, 2);
  auto m = route_cost_and_duration(net, {1});
  EXPECT_DOUBLE_EQ(m.cost, 10.0);
  EXPECT_DOUBLE_EQ(m.duration, 25.0);
}

TEST(RouteCost, ChainSum) {
  // depot, A, B: t0A = 10, tAB = 4, t0B = 12
  auto net = line_network({0, 10, 12, 10, 0, 4, 12, 4, 0}, 3);
  auto m = route_cost_and_duration(net, {1, 2});
  ASSERT_EQ(m.arrivals.size(), 2u);
  EXPECT_DOUBLE_EQ(m.arrivals[0], 10.0);
  EXPECT_DOUBLE_EQ(m.arrivals[1], 19.0);
  EXPECT_DOUBLE_EQ(m.cost, 29.0);
}

TEST(RouteCost, DeadlineExceeded) {
  auto net = line_network({0, 10, 12, 10, 0, 4, 12, 4, 0}, 3, 15.0);
  try {
    route_cost_and_duration(net, {1, 2});
    FAIL() << "expected RouteInfeasible";
  } catch (const RouteInfeasible& e) {
    EXPECT_EQ(e.kind(), RouteViolation::kDeadline);
  }
}

TEST(RouteCost, CapacityExceeded) {
  StopNetwork net({0, 1, 1, 1, 0, 1, 1, 1, 0}, {0, 0, 0}, {0, 3, 3}, 5, kInf);
  EXPECT_THROW(route_cost_and_duration(net, {1, 2}), RouteInfeasible);
  EXPECT_FALSE(evaluate_route(net, {1, 2}).has_value());
  EXPECT_FALSE(evaluate_route(net, {1, 1}).has_value());
}

TEST(RouteCost, PrepTimeShiftsArrivals) {
  StopNetwork net({0, 10, 10, 0}, {0, 5}, {0, 1}, 5, kInf, 3.0);
  auto m = route_cost_and_duration(net, {1});
  EXPECT_DOUBLE_EQ(m.cost, 13.0);
  EXPECT_DOUBLE_EQ(m.duration, 28.0);
}

PlanningHorizon horizon(int n) {
  PlanningHorizon h;
  h.num_periods = n;
  h.period_length = 15.0;
  return h;
}

Route route_with_duration(const PlanningHorizon& h, int period, double duration) {
  Route r;
  r.dispatch_period = period;
  r.duration = duration;
  r.busy_last = busy_through(h, period, duration);
  return r;
}

TEST(Transition, EmptyDispatch) {
  auto h = horizon(3);
  auto s = DriverStatus::idle(1, 3);
  auto next = transition(h, 2, s, {}, 1);
  EXPECT_EQ(next.first_period, 2);
  EXPECT_EQ(next.busy, (std::vector<int>{0, 0}));
}

TEST(Transition, TwentyMinuteRoute) {
  auto h = horizon(3);
  auto next = transition(h, 2, DriverStatus::idle(1, 3), {route_with_duration(h, 1, 20.0)}, 1);
  EXPECT_EQ(next.at(2), 1);
  EXPECT_EQ(next.at(3), 0);
}

TEST(Transition, ShortRouteStillOccupiesNextPeriod) {
  auto h = horizon(3);
  auto next = transition(h, 2, DriverStatus::idle(1, 3), {route_with_duration(h, 1, 4.0)}, 1);
  EXPECT_EQ(next.at(2), 1);
  EXPECT_EQ(next.at(3), 0);
}

TEST(Transition, BoundaryIsNotBusy) {
  auto h = horizon(4);
  EXPECT_EQ(busy_through(h, 1, 30.0), 2);
  EXPECT_EQ(busy_through(h, 1, 30.5), 3);
  EXPECT_EQ(busy_through(h, 4, 100.0), 4);
  EXPECT_EQ(busy_through(h, 3, 100.0), 4);
}

TEST(Transition, CapacityViolation) {
  auto h = horizon(3);
  DriverStatus s = DriverStatus::idle(1, 3);
  s.busy[1] = 1;
  std::vector<Route> routes{route_with_duration(h, 1, 16.0), route_with_duration(h, 1, 16.0)};
  EXPECT_THROW(transition(h, 2, s, routes, 1), CapacityViolation);
}

TEST(Transition, ThirdPartyIgnored) {
  auto h = horizon(3);
  auto r = route_with_duration(h, 1, 50.0);
  r.third_party = true;
  auto next = transition(h, 1, DriverStatus::idle(1, 3), {r, r}, 1);
  EXPECT_EQ(next.busy, (std::vector<int>{0, 0}));
}

TEST(Transition, MonotoneInStatus) {
  std::mt19937 rng(7);
  auto h = horizon(5);
  for (int trial = 0; trial < 200; ++trial) {
    DriverStatus lo = DriverStatus::idle(1, 5), hi = lo;
    for (size_t k = 0; k < lo.busy.size(); ++k) {
      lo.busy[k] = static_cast<int>(rng() % 3);
      hi.busy[k] = lo.busy[k] + static_cast<int>(rng() % 2);
    }
    std::vector<Route> routes;
    const int count = static_cast<int>(rng() % 3);
    for (int k = 0; k < count; ++k)
      routes.push_back(route_with_duration(h, 1, std::uniform_real_distribution<>(1, 70)(rng)));
    auto a = transition(h, 100, lo, routes, 1);
    auto b = transition(h, 100, hi, routes, 1);
    for (int p = 2; p <= 5; ++p) EXPECT_LE(a.at(p), b.at(p));
  }
}

TEST(Geometry, SymmetricAndTriangle) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<> u(0, 10);
  FleetConfig fleet;
  std::vector<Point> pts(12);
  for (auto& p : pts) p = {u(rng), u(rng)};
  auto t = travel_matrix(fleet, {5, 5}, pts);
  const size_t k = pts.size() + 1;
  for (size_t a = 0; a < k; ++a) {
    EXPECT_EQ(t[a * k + a], 0.0);
    for (size_t b = 0; b < k; ++b) {
      EXPECT_EQ(t[a * k + b], t[b * k + a]);
      for (size_t c = 0; c < k; ++c) EXPECT_LE(t[a * k + c], t[a * k + b] + t[b * k + c] + 1e-9);
    }
  }
  // 3 km at 20 km/h is 9 minutes.
  EXPECT_NEAR(fleet.travel_minutes({0, 0}, {3, 0}), 9.0, 1e-12);
}

TEST(Geometry, Restricted) {
  auto net = line_network({0, 10, 12, 10, 0, 4, 12, 4, 0}, 3);
  auto sub = net.restricted({2});
  EXPECT_EQ(sub.num_customers(), 1);
  EXPECT_DOUBLE_EQ(sub.travel(0, 1), 12.0);
}

}  // namespace
}  // namespace ontime
