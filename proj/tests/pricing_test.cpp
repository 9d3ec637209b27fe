#include "ontime/pricing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"

namespace ontime {
namespace {

PlanningHorizon horizon(int n) {
  PlanningHorizon h;
  h.num_periods = n;
  h.period_length = 15.0;
  return h;
}

// depot, A, B with t0A = 10, tAB = 4, t0B = 12 and 5 min service.
StopNetwork two_stops(int capacity = 20, double max_arrival = 60.0) {
  return StopNetwork({0, 10, 12, 10, 0, 4, 12, 4, 0}, {0, 5, 5}, {0, 2, 3}, capacity, max_arrival);
}

RouteClass only_class(const StopNetwork& net, const Duals& d) {
  return route_classes(net, horizon(1), 1, d, DriverMode::kFullTime).front();
}

TEST(ReducedCosts, ZeroDuals) {
  auto net = two_stops();
  auto d = Duals::zero(net);
  auto c = ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(c(i, j), 0.0);
}

TEST(ReducedCosts, CoverDualSplitsInHalves) {
  auto net = two_stops();
  auto d = Duals::zero(net);
  d.nu[1] = 4.0;
  auto c = ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime);
  EXPECT_DOUBLE_EQ(c(0, 1), -2.0);
  EXPECT_DOUBLE_EQ(c(1, 0), -2.0);
  EXPECT_DOUBLE_EQ(c(2, 1), -2.0);
  EXPECT_DOUBLE_EQ(c(0, 2), 0.0);
}

TEST(ReducedCosts, FutureFleetDualOnDepotArcs) {
  auto net = two_stops();
  auto h = horizon(3);
  auto d = Duals::zero(net, 2);
  d.mu_future[0] = -6.0;
  auto classes = route_classes(net, h, 1, d, DriverMode::kFullTime);
  ASSERT_GE(classes.size(), 2u);
  EXPECT_EQ(classes[0].busy_last, 2);
  EXPECT_DOUBLE_EQ(classes[0].t_max, 30.0);
  auto c = ReducedCostMatrix::build(net, d, classes[0], DriverMode::kFullTime);
  EXPECT_DOUBLE_EQ(c(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(c(2, 0), 3.0);

  // 0 -> A -> B -> 0 lasts 10 + 5 + 4 + 5 + 12 = 36 min: busy through period 3.
  // 0 -> A -> 0 lasts 25 min: busy through period 2 only.
  LabelRules rules(net, c, NgSets::full(net));
  auto f = rules.extend(rules.initial_forward(), 1);
  ASSERT_TRUE(f);
  auto b = rules.extend(rules.initial_backward(), 1);
  ASSERT_TRUE(b);
  auto rc = rules.combine(*f, *b);
  ASSERT_TRUE(rc);
  auto priced = price_route(net, h, 1, d, {1}, DriverMode::kFullTime, 10.0);
  EXPECT_EQ(priced.busy_last, 2);
  EXPECT_NEAR(*rc, 10.0 + 6.0, 1e-12);
  EXPECT_NEAR(priced.reduced_cost, *rc, 1e-12);
}

TEST(LabelRules, FirstForwardExtension) {
  auto net = two_stops();
  auto d = Duals::zero(net);
  LabelRules rules(net, ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime),
                   NgSets::full(net));
  auto l = rules.extend(rules.initial_forward(), 1);
  ASSERT_TRUE(l);
  EXPECT_DOUBLE_EQ(l->time, 10.0);
  EXPECT_DOUBLE_EQ(l->cost, 10.0);
  EXPECT_EQ(l->load, 2);
  EXPECT_FALSE(l->extendable.test(1));
  EXPECT_TRUE(l->extendable.test(2));
}

TEST(LabelRules, CapacityRemovesTarget) {
  auto net = two_stops(4);
  auto d = Duals::zero(net);
  LabelRules rules(net, ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime),
                   NgSets::full(net));
  auto l = rules.extend(rules.initial_forward(), 1);
  ASSERT_TRUE(l);
  EXPECT_FALSE(l->extendable.test(2));
  EXPECT_FALSE(rules.extend(*l, 2).has_value());
}

TEST(LabelRules, ChainMatchesDirectPricing) {
  auto net = two_stops();
  auto d = Duals::zero(net);
  d.nu = {0.0, 7.0, 3.5};
  d.mu_now = -2.0;
  LabelRules rules(net, ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime),
                   NgSets::full(net));
  auto a = rules.extend(rules.initial_forward(), 1);
  auto ab = rules.extend(*a, 2);
  ASSERT_TRUE(ab);
  auto back = rules.extend(rules.initial_backward(), 2);
  auto rc = rules.combine(*ab, *back);
  ASSERT_TRUE(rc);
  auto direct = price_route(net, horizon(1), 1, d, {1, 2}, DriverMode::kFullTime, 10.0);
  EXPECT_NEAR(*rc, direct.reduced_cost, 1e-9);
  EXPECT_NEAR(direct.reduced_cost, 29.0 - 10.5 + 2.0, 1e-9);
}

TEST(LabelRules, BackwardExtensions) {
  auto net = two_stops();
  auto d = Duals::zero(net);
  auto cls = only_class(net, d);
  LabelRules rules(net, ReducedCostMatrix::build(net, d, cls, DriverMode::kFullTime),
                   NgSets::full(net));
  auto b = rules.extend(rules.initial_backward(), 2);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->stops, 1);
  EXPECT_DOUBLE_EQ(b->latest, std::min(60.0, cls.t_max - 5.0 - 12.0));
  EXPECT_DOUBLE_EQ(b->cost, 0.0);
  auto ab = rules.extend(*b, 1);
  ASSERT_TRUE(ab);
  EXPECT_DOUBLE_EQ(ab->cost, 1.0 * (5.0 + 4.0));
  // Joined against the bare depot label the backward path is the whole route.
  auto start = rules.extend(rules.initial_forward(), 1);
  auto rc = rules.combine(*start, *ab);
  ASSERT_TRUE(rc);
  EXPECT_NEAR(*rc, 29.0, 1e-12);
}

TEST(LabelRules, JoinRejectsOverlap) {
  auto net = two_stops();
  auto d = Duals::zero(net);
  LabelRules rules(net, ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime),
                   NgSets::full(net));
  auto f = rules.extend(*rules.extend(rules.initial_forward(), 2), 1);
  auto b = rules.extend(*rules.extend(rules.initial_backward(), 2), 1);
  ASSERT_TRUE(f && b);
  EXPECT_FALSE(rules.combine(*f, *b).has_value());
}

TEST(LabelRules, EverySplitReproducesRouteCost) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    auto net = oracle::random_network(rng, 4, 8, trial % 3 ? 60.0 : kInf, trial % 2 ? 3.0 : 0.0);
    auto d = oracle::random_duals(rng, net, 0);
    for (auto mode : {DriverMode::kFullTime, DriverMode::kPartTime}) {
      auto c = ReducedCostMatrix::build(net, d, route_classes(net, horizon(1), 1, d, mode).front(),
                                        mode, 10.0);
      LabelRules rules(net, c, NgSets::full(net));
      oracle::for_each_route(net, [&](const std::vector<int>& seq) {
        const double want = price_route(net, horizon(1), 1, d, seq, mode, 10.0).reduced_cost;
        for (size_t k = 0; k < seq.size(); ++k) {
          std::optional<ForwardLabel> f = rules.initial_forward();
          for (size_t a = 0; a <= k && f; ++a) f = rules.extend(*f, seq[a]);
          std::optional<BackwardLabel> b = rules.initial_backward();
          for (size_t a = seq.size(); a-- > k && b;) b = rules.extend(*b, seq[a]);
          ASSERT_TRUE(f && b);
          auto rc = rules.combine(*f, *b);
          ASSERT_TRUE(rc);
          EXPECT_NEAR(*rc, want, 1e-9);
        }
      });
    }
  }
}

TEST(Dominance, IdenticalAndSmallerReach) {
  auto net = two_stops();
  auto d = Duals::zero(net);
  LabelRules rules(net, ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime),
                   NgSets::full(net));
  auto a = *rules.extend(rules.initial_forward(), 1);
  EXPECT_TRUE(rules.dominates(a, a, LabelMode::kPricing));
  auto b = a;
  b.cost -= 1.0;
  b.extendable.reset(2);
  EXPECT_FALSE(rules.dominates(b, a, LabelMode::kPricing));
  EXPECT_FALSE(rules.dominates(a, b, LabelMode::kPricing));
}

TEST(Dominance, Transitive) {
  std::mt19937 rng(4);
  auto net = oracle::random_network(rng, 6, 10);
  auto d = Duals::zero(net);
  LabelRules rules(net, ReducedCostMatrix::build(net, d, only_class(net, d), DriverMode::kFullTime),
                   NgSets::full(net));
  auto random_label = [&] {
    ForwardLabel l;
    l.node = 1;
    l.cost = static_cast<double>(rng() % 4);
    l.time = static_cast<double>(rng() % 4);
    l.load = static_cast<int>(rng() % 3);
    for (int k = 2; k < 5; ++k)
      if (rng() % 2) l.extendable.set(k);
    l.visited.set(1);
    if (rng() % 2) l.visited.set(2);
    return l;
  };
  int chains = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    auto a = random_label(), b = random_label(), c = random_label();
    for (auto mode : {LabelMode::kPricing, LabelMode::kEnumeration})
      if (rules.dominates(a, b, mode) && rules.dominates(b, c, mode)) {
        ++chains;
        EXPECT_TRUE(rules.dominates(a, c, mode));
      }
  }
  EXPECT_GT(chains, 100);
}

TEST(SolvePricing, ZeroDualsGiveNothing) {
  std::mt19937 rng(2);
  auto net = oracle::random_network(rng, 6, 10);
  auto r = solve_pricing(net, horizon(1), 1, Duals::zero(net));
  EXPECT_TRUE(r.routes.empty());
}

TEST(SolvePricing, LargeCoverDualOnOneCustomer) {
  StopNetwork net({0, 10, 10, 0}, {0, 5}, {0, 1}, 5, 60.0);
  auto h = horizon(2);
  auto d = Duals::zero(net, 1);
  d.nu[1] = 30.0;
  d.mu_now = -2.0;
  d.mu_future[0] = -3.0;
  auto r = solve_pricing(net, h, 1, d);
  ASSERT_EQ(r.routes.size(), 1u);
  EXPECT_EQ(r.routes[0].stops, std::vector<int>{1});
  EXPECT_NEAR(r.routes[0].reduced_cost, 10.0 - 30.0 + 3.0 + 2.0, 1e-9);
}

struct Variant {
  bool pruning, ng;
  SearchSplit split;
};

TEST(SolvePricing, MatchesExhaustiveOracle) {
  std::mt19937 rng(1234);
  const std::vector<Variant> variants{{true, true, SearchSplit::kDynamic},
                                      {false, true, SearchSplit::kDynamic},
                                      {true, false, SearchSplit::kDynamic},
                                      {false, false, SearchSplit::kForwardOnly},
                                      {true, true, SearchSplit::kBackwardOnly}};
  for (int trial = 0; trial < 120; ++trial) {
    const int customers = 1 + trial % 8;
    const int periods = 1 + trial % 4;
    const int period = 1 + static_cast<int>(rng() % periods);
    auto net = oracle::random_network(rng, customers, 4 + static_cast<int>(rng() % 8),
                                      trial % 5 ? 60.0 : kInf, trial % 3 ? 0.0 : 2.0);
    auto h = horizon(periods);
    auto d = oracle::random_duals(rng, net, periods - period);
    const auto mode = trial % 7 == 0 ? DriverMode::kPartTime : DriverMode::kFullTime;
    const double wa = trial % 11 == 0 ? 0.0 : 1.0;
    const double want = oracle::min_reduced_cost(net, h, period, d, mode, 10.0, wa);
    for (const auto& v : variants) {
      PricingOptions opt;
      opt.threshold = kInf;
      opt.use_pruning = v.pruning;
      opt.use_ng = v.ng;
      opt.split = v.split;
      opt.mode = mode;
      opt.arrival_weight = wa;
      opt.ng_size = 3;
      auto r = solve_pricing(net, h, period, d, opt);
      EXPECT_NEAR(r.best, want, 1e-6) << "trial " << trial << " pruning " << v.pruning << " ng "
                                      << v.ng << " split " << static_cast<int>(v.split);
      for (const auto& route : r.routes) {
        std::set<int> seen(route.stops.begin(), route.stops.end());
        EXPECT_EQ(seen.size(), route.stops.size());
      }
    }
  }
}

TEST(SolvePricing, NegativeRoutesAreGenuine) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto net = oracle::random_network(rng, 7, 8);
    auto h = horizon(3);
    auto d = oracle::random_duals(rng, net, 2);
    auto r = solve_pricing(net, h, 1, d);
    const double want = oracle::min_reduced_cost(net, h, 1, d);
    if (want < -1e-6) {
      ASSERT_FALSE(r.routes.empty());
      EXPECT_NEAR(r.routes.front().reduced_cost, want, 1e-6);
    } else {
      EXPECT_TRUE(r.routes.empty());
    }
    for (const auto& route : r.routes) {
      EXPECT_LT(route.reduced_cost, -1e-6);
      auto again = price_route(net, h, 1, d, route.stops, DriverMode::kFullTime, 10.0);
      EXPECT_NEAR(again.reduced_cost, route.reduced_cost, 1e-12);
    }
  }
}

TEST(PruningBounds, SingleStepAndMonotone) {
  std::mt19937 rng(8);
  auto net = oracle::random_network(rng, 6, 10);
  auto d = oracle::random_duals(rng, net, 0);
  auto cls = only_class(net, d);
  auto c = ReducedCostMatrix::build(net, d, cls, DriverMode::kFullTime);
  auto b = PruningBounds::build(net, c, 6);
  for (int i = 1; i < net.num_nodes(); ++i) EXPECT_DOUBLE_EQ(b.backward(i, 1), c(i, 0));
  ASSERT_TRUE(b.forward_enabled());
  for (int i = 1; i < net.num_nodes(); ++i)
    for (double t = 0.0; t <= cls.t_max; t += 0.5)
      EXPECT_LE(b.forward(i, cls.t_max), b.forward(i, t));
}

std::set<std::vector<int>> subset_keys(const std::vector<PricedRoute>& routes) {
  std::set<std::vector<int>> out;
  for (const auto& r : routes) {
    auto s = r.stops;
    std::sort(s.begin(), s.end());
    out.insert(s);
  }
  return out;
}

TEST(EnumerateRoutes, LargeGapCoversEverySubset) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = oracle::random_network(rng, 5, 6 + trial % 5);
    auto h = horizon(3);
    auto d = oracle::random_duals(rng, net, 2);
    auto got = enumerate_routes(net, h, 1, d, 1e9);
    EXPECT_TRUE(got.complete);
    auto keys = subset_keys(got.routes);
    auto best = oracle::best_per_subset(net, h, 1, d);
    EXPECT_EQ(keys.size(), best.size());
    for (const auto& s : best) {
      double mine = kInf;
      for (const auto& r : got.routes) {
        StopSet cs;
        for (int v : r.stops) cs.set(v);
        if (cs == s.customers) mine = std::min(mine, r.reduced_cost);
      }
      EXPECT_NEAR(mine, s.reduced_cost, 1e-9);
    }
  }
}

TEST(EnumerateRoutes, MonotoneInGap) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = oracle::random_network(rng, 6, 8);
    auto h = horizon(2);
    auto d = oracle::random_duals(rng, net, 1);
    const double floor = oracle::min_reduced_cost(net, h, 1, d);
    EXPECT_TRUE(enumerate_routes(net, h, 1, d, floor - 1.0).routes.empty());
    auto small = subset_keys(enumerate_routes(net, h, 1, d, floor + 5.0).routes);
    auto large = subset_keys(enumerate_routes(net, h, 1, d, floor + 25.0).routes);
    EXPECT_FALSE(small.empty());
    for (const auto& s : small) EXPECT_TRUE(large.count(s));
    for (const auto& s : oracle::best_per_subset(net, h, 1, d))
      if (s.reduced_cost <= floor + 25.0) {
        std::vector<int> key = s.stops;
        std::sort(key.begin(), key.end());
        EXPECT_TRUE(large.count(key));
      }
  }
}

TEST(EnumerateRoutes, BudgetOverflowIsReported) {
  std::mt19937 rng(3);
  auto net = oracle::random_network(rng, 8, 20);
  EnumerationOptions opt;
  opt.label_budget = 10;
  auto r = enumerate_routes(net, horizon(1), 1, Duals::zero(net), 1e9, opt);
  EXPECT_TRUE(r.overflow);
  EXPECT_FALSE(r.complete);
}

}  // namespace
}  // namespace ontime
