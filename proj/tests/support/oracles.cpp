#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace ontime::oracle {

namespace {

void grow(const StopNetwork& net, std::vector<int>& seq, StopSet& used, int load,
          const std::function<void(const std::vector<int>&)>& visit) {
  for (int k = 1; k < net.num_nodes(); ++k) {
    if (used.test(k) || load + net.demand(k) > net.capacity()) continue;
    seq.push_back(k);
    // Arrivals only grow along a prefix, so an infeasible prefix ends the branch.
    if (evaluate_route(net, seq)) {
      used.set(k);
      visit(seq);
      grow(net, seq, used, load + net.demand(k), visit);
      used.reset(k);
    }
    seq.pop_back();
  }
}

}  // namespace

StopNetwork random_network(std::mt19937& rng, int customers, int capacity, double max_arrival,
                           double prep_time) {
  std::uniform_real_distribution<> u(0.0, 10.0);
  std::uniform_int_distribution<> q(1, 3);
  FleetConfig fleet;
  fleet.capacity = capacity;
  fleet.max_duration = max_arrival;
  PeriodRealization real;
  for (int k = 0; k < customers; ++k) {
    Order o;
    o.position = {u(rng), u(rng)};
    o.quantity = std::min(capacity, q(rng));
    real.orders.push_back(o);
  }
  return StopNetwork::from_orders(fleet, {5.0, 5.0}, real, prep_time);
}

Duals random_duals(std::mt19937& rng, const StopNetwork& net, int future_rows, double nu_max,
                   double mu_min) {
  std::uniform_real_distribution<> nu(0.0, nu_max), mu(mu_min, 0.0);
  Duals d = Duals::zero(net, future_rows);
  for (int i = 1; i < net.num_nodes(); ++i) d.nu[i] = nu(rng);
  d.mu_now = mu(rng);
  for (auto& m : d.mu_future) m = (rng() % 2) ? mu(rng) : 0.0;
  return d;
}

void for_each_route(const StopNetwork& net, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> seq;
  StopSet used;
  grow(net, seq, used, 0, visit);
}

double min_reduced_cost(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                        const Duals& duals, DriverMode mode, double rho, double arrival_weight) {
  double best = kInf;
  for_each_route(net, [&](const std::vector<int>& seq) {
    best = std::min(best, price_route(net, horizon, period, duals, seq, mode, rho, arrival_weight)
                              .reduced_cost);
  });
  return best;
}

std::vector<SubsetRoute> best_per_subset(const StopNetwork& net, const PlanningHorizon& horizon,
                                         int period, const Duals& duals, DriverMode mode,
                                         double rho) {
  std::map<std::string, SubsetRoute> best;
  for_each_route(net, [&](const std::vector<int>& seq) {
    SubsetRoute r;
    for (int s : seq) r.customers.set(s);
    r.stops = seq;
    r.reduced_cost = price_route(net, horizon, period, duals, seq, mode, rho).reduced_cost;
    auto key = r.customers.to_string();
    auto it = best.find(key);
    if (it == best.end() || r.reduced_cost < it->second.reduced_cost) best[key] = r;
  });
  std::vector<SubsetRoute> out;
  for (auto& [k, r] : best) out.push_back(r);
  return out;
}

namespace {

struct Option {
  double cost;
  int busy_last;
};

double partition(const SinglePeriodProblem& p, const std::vector<std::vector<Option>>& options,
                 const std::vector<double>& hired, unsigned remaining, int routes,
                 std::vector<int>& busy) {
  if (remaining == 0) return 0.0;
  const unsigned low = remaining & (~remaining + 1);
  double best = kInf;
  // Subsets of remaining that contain its lowest customer.
  const unsigned rest = remaining & ~low;
  for (unsigned sub = rest;; sub = (sub - 1) & rest) {
    const unsigned mask = sub | low;
    if (p.third_party && std::isfinite(hired[mask]))
      best = std::min(best, hired[mask] + partition(p, options, hired, remaining & ~mask, routes, busy));
    for (const auto& o : options[mask]) {
      if (routes >= p.fleet_cap) break;
      bool ok = true;
      for (int q = p.period + 1; q <= o.busy_last && ok; ++q) {
        const size_t k = static_cast<size_t>(q - p.period - 1);
        if (k < busy.size() && busy[k] + 1 > p.future_caps[k]) ok = false;
      }
      if (!ok) continue;
      for (int q = p.period + 1; q <= o.busy_last; ++q)
        if (static_cast<size_t>(q - p.period - 1) < busy.size()) ++busy[q - p.period - 1];
      best = std::min(best, o.cost + partition(p, options, hired, remaining & ~mask, routes + 1, busy));
      for (int q = p.period + 1; q <= o.busy_last; ++q)
        if (static_cast<size_t>(q - p.period - 1) < busy.size()) --busy[q - p.period - 1];
    }
    if (sub == 0) break;
  }
  return best;
}

}  // namespace

double sf1_optimum(const SinglePeriodProblem& problem) {
  const int n = problem.net.num_customers();
  if (n == 0) return 0.0;
  std::vector<std::vector<Option>> options(1u << n);
  std::vector<double> hired(1u << n, kInf);
  for_each_route(problem.net, [&](const std::vector<int>& seq) {
    unsigned mask = 0;
    for (int s : seq) mask |= 1u << (s - 1);
    const auto m = route_cost_and_duration(problem.net, seq);
    hired[mask] = std::min(hired[mask], m.cost + problem.rho * m.duration);
    const int busy = busy_through(problem.horizon, problem.period, m.duration);
    auto& opts = options[mask];
    auto it = std::find_if(opts.begin(), opts.end(), [&](const Option& o) { return o.busy_last == busy; });
    if (it == opts.end()) opts.push_back({m.cost, busy});
    else it->cost = std::min(it->cost, m.cost);
  });
  std::vector<int> busy(problem.future_caps.size(), 0);
  return partition(problem, options, hired, (1u << n) - 1, 0, busy);
}

F1Solution f1_optimum(const StopNetwork& net, int period, const DriverStatus& status,
                      const LookaheadContext& ctx) {
  const int n = period, N = ctx.horizon.num_periods, K = ctx.fleet_size;
  const auto& cost = ctx.tables->cost;
  const auto& omega = ctx.tables->omega;
  const int futures = N - n, cap_now = K - status.at(n);
  std::map<std::vector<int>, double> routing;
  F1Solution best;
  std::vector<int> x(futures, 0), z(futures, 0);
  // Odometer over x then z.
  std::function<void(int)> visit = [&](int slot) {
    if (slot == 2 * futures) {
      double future = 0.0;
      for (int j = 0; j < futures; ++j) {
        const int p = n + 1 + j;
        double load = z[j];
        for (int i = 0; i <= j; ++i) load += omega.at(n + 1 + i, p, x[i]);
        if (load > K - status.at(p) + 1e-9) return;
        future += cost.at(n + 1 + j, x[j]);
      }
      auto it = routing.find(z);
      if (it == routing.end()) {
        SinglePeriodProblem sp;
        sp.net = net;
        sp.horizon = ctx.horizon;
        sp.period = n;
        sp.fleet_cap = cap_now;
        sp.future_caps = z;
        it = routing.emplace(z, sf1_optimum(sp)).first;
      }
      if (future + it->second < best.value) best = {future + it->second, x, z};
      return;
    }
    const bool is_x = slot < futures;
    const int j = is_x ? slot : slot - futures;
    const int p = n + 1 + j, cap = K - status.at(p);
    for (int k = 0; k <= (is_x ? std::min(cap, cost.max_k) : std::min(cap, cap_now)); ++k) {
      if (is_x && !cost.usable(p, k)) continue;
      (is_x ? x : z)[j] = k;
      visit(slot + 1);
    }
  };
  visit(0);
  return best;
}

DemandModel random_tree(std::mt19937& rng, int periods, int max_orders, int max_quantity) {
  std::uniform_real_distribution<> u(0.0, 10.0), prob(0.1, 0.9);
  std::uniform_int_distribution<> count(0, max_orders), q(1, max_quantity);
  DemandModel m;
  m.kind = DemandKind::kScenarioTree;
  m.max_quantity = max_quantity;
  for (int n = 0; n < periods; ++n) {
    const double p = prob(rng);
    std::vector<DemandBranch> outs{{p, {}}, {1.0 - p, {}}};
    for (auto& b : outs)
      for (int c = count(rng); c > 0; --c) b.orders.push_back(Order{-1, {u(rng), u(rng)}, q(rng)});
    m.branches.push_back(std::move(outs));
  }
  return m;
}

F1Case random_f1_case(std::mt19937& rng) {
  while (true) {
    F1Case c;
    c.horizon.num_periods = 2 + static_cast<int>(rng() % 2);
    c.fleet = 1 + static_cast<int>(rng() % 3);
    c.period = 1 + static_cast<int>(rng() % (c.horizon.num_periods - 1 + (rng() % 4 == 0)));
    Instance setting;
    setting.horizon = c.horizon;
    setting.fleet.fleet_size = c.fleet;
    setting.fleet.capacity = 6;
    setting.fleet.max_duration = 40.0;
    try {
      c.tables = build_tables(random_tree(rng, c.horizon.num_periods, 2), setting, OracleConfig{});
    } catch (const OracleConfigError&) {
      continue;
    }
    c.net = random_network(rng, 1 + static_cast<int>(rng() % 4), 6, 40.0);
    c.status = DriverStatus::idle(c.period, c.horizon.num_periods);
    for (auto& b : c.status.busy)
      if (rng() % 3 == 0) b = static_cast<int>(rng() % c.fleet);
    // Reachable statuses are nonincreasing: a trip occupies consecutive periods.
    std::sort(c.status.busy.rbegin(), c.status.busy.rend());
    return c;
  }
}

}  // namespace ontime::oracle
