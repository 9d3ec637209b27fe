#include "ontime/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace ontime {

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::kSimpleMyopic: return "simple_myopic";
    case PolicyKind::kAdaptiveMyopic: return "adaptive_myopic";
    case PolicyKind::kAjrp: return "ajrp";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& s) {
  for (auto k : {PolicyKind::kSimpleMyopic, PolicyKind::kAdaptiveMyopic, PolicyKind::kAjrp})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown policy '" + s + "'");
}

void PolicyConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("policy: rho must be > 0");
  if (kind != PolicyKind::kSimpleMyopic && !tables)
    throw std::invalid_argument(std::string("policy ") + to_string(kind) + " needs cost tables");
}

int PolicyDecision::in_house() const {
  return static_cast<int>(std::count_if(routes.begin(), routes.end(),
                                        [](const Route& r) { return !r.third_party; }));
}

namespace {

PolicyDecision decide(const PolicyConfig& cfg, const Instance& setting, const StopNetwork& net,
                      int period, const std::vector<PricedRoute>& routes) {
  PolicyDecision d;
  for (const auto& r : routes) {
    d.routes.push_back(make_route(net, setting.horizon, period, r.stops, r.third_party));
    d.arrival_cost += d.routes.back().cost;
    d.hiring_cost += d.routes.back().hiring_cost(cfg.rho);
  }
  return d;
}

void require_solved(const Sf1Result& r, const char* who) {
  if (!r.solved() && r.status != Sf1Status::kInfeasible)
    throw std::runtime_error(std::string(who) + ": routing problem " + to_string(r.status));
}

int fleet_cap(const Instance& setting, const PeriodRealization& orders, const DriverStatus& status) {
  const int cap = setting.fleet.fleet_size - status.at(orders.period);
  if (cap < 0) throw std::invalid_argument("policy: more drivers busy than on shift");
  return cap;
}

}  // namespace

PolicyDecision recourse_step(const PolicyConfig& cfg, const Instance& setting,
                             const PeriodRealization& orders, int cap) {
  const auto net = setting.network(orders);
  const auto r = solve_with_recourse(net, cap, cfg.rho, cfg.sf1);
  require_solved(r, "recourse");
  if (!r.solved())
    throw std::runtime_error("recourse: an order cannot be served even by a hired driver");
  auto d = decide(cfg, setting, net, orders.period, r.routes);
  d.recourse = true;
  return d;
}

PolicyDecision simple_myopic_step(const PolicyConfig& cfg, const Instance& setting,
                                  const PeriodRealization& orders, const DriverStatus& status) {
  const int cap = fleet_cap(setting, orders, status);
  const auto net = setting.network(orders);
  const auto r = solve_hs(net, cap, cfg.sf1);
  require_solved(r, "simple myopic");
  if (!r.solved()) return recourse_step(cfg, setting, orders, cap);
  return decide(cfg, setting, net, orders.period, r.routes);
}

PolicyDecision adaptive_myopic_step(const PolicyConfig& cfg, const Instance& setting,
                                    const PeriodRealization& orders, const DriverStatus& status) {
  const int cap = fleet_cap(setting, orders, status);
  const auto net = setting.network(orders);
  std::vector<Sf1Result> solved;
  std::vector<double> current;
  // More routes than orders only ties up drivers.
  for (int k = 0; k <= std::min(cap, net.num_customers()); ++k) {
    solved.push_back(solve_hs(net, k, cfg.sf1));
    require_solved(solved.back(), "adaptive myopic");
    current.push_back(solved.back().solved() ? solved.back().cost : kInf);
  }
  LookaheadContext ctx{setting.horizon, setting.fleet.fleet_size, cfg.tables};
  const auto ip = solve_dispatch_ip(current, orders.period, status, ctx, cfg.ajrp.mip);
  if (!ip.feasible) return recourse_step(cfg, setting, orders, cap);
  auto d = decide(cfg, setting, net, orders.period, solved[ip.now].routes);
  d.plan = ip.plan;
  return d;
}

PolicyDecision ajrp_policy_step(const PolicyConfig& cfg, const Instance& setting,
                                const PeriodRealization& orders, const DriverStatus& status) {
  const int cap = fleet_cap(setting, orders, status);
  const auto net = setting.network(orders);
  LookaheadContext ctx{setting.horizon, setting.fleet.fleet_size, cfg.tables};
  AjrpOptions opt = cfg.ajrp;
  opt.sf1 = cfg.sf1;
  const auto r = ajrp_step(net, orders.period, status, ctx, opt);
  if (!r.has_incumbent()) return recourse_step(cfg, setting, orders, cap);
  auto d = decide(cfg, setting, net, orders.period, r.routes);
  d.plan = r.plan;
  return d;
}

PolicyDecision policy_step(const PolicyConfig& cfg, const Instance& setting,
                           const PeriodRealization& orders, const DriverStatus& status) {
  cfg.validate();
  switch (cfg.kind) {
    case PolicyKind::kSimpleMyopic: return simple_myopic_step(cfg, setting, orders, status);
    case PolicyKind::kAdaptiveMyopic: return adaptive_myopic_step(cfg, setting, orders, status);
    case PolicyKind::kAjrp: return ajrp_policy_step(cfg, setting, orders, status);
  }
  throw std::logic_error("policy_step: unknown policy");
}

BruteForceDp::BruteForceDp(const Instance& setting, const DemandModel& model, long size_bound)
    : setting_(setting), model_(model), size_bound_(size_bound) {
  if (!model_.finite()) throw std::invalid_argument("brute-force DP needs a scenario tree");
  model_.validate();
  if (model_.num_periods() != setting_.horizon.num_periods)
    throw std::invalid_argument("brute-force DP: model and horizon disagree on N");
}

const BruteForceDp::Actions& BruteForceDp::actions(int period, int outcome) {
  const auto key = std::make_pair(period, outcome);
  if (auto it = actions_.find(key); it != actions_.end()) return it->second;
  const int N = setting_.horizon.num_periods;
  const auto& orders = model_.branches.at(period - 1).at(outcome).orders;
  const auto net = setting_.network(PeriodRealization{period, orders});
  const int m = net.num_customers();
  if (m > 16) throw DpSizeExceeded("brute-force DP: too many orders in one outcome");

  // Cheapest ordering of each customer subset per period through which it keeps the driver.
  std::vector<std::map<int, double>> blocks(1u << m);
  std::vector<int> seq;
  std::function<void(unsigned, int)> grow = [&](unsigned used, int load) {
    for (int c = 1; c <= m; ++c) {
      if (used & (1u << (c - 1)) || load + net.demand(c) > net.capacity()) continue;
      seq.push_back(c);
      if (auto metrics = evaluate_route(net, seq)) {
        if (++work_ > size_bound_) throw DpSizeExceeded("brute-force DP: size bound exceeded");
        const unsigned mask = used | (1u << (c - 1));
        const int busy = busy_through(setting_.horizon, period, metrics->duration);
        auto [it, fresh] = blocks[mask].emplace(busy, metrics->cost);
        if (!fresh) it->second = std::min(it->second, metrics->cost);
        grow(mask, load + net.demand(c));
      }
      seq.pop_back();
    }
  };
  grow(0, 0);

  Actions out;
  std::vector<int> counts(1 + N - period, 0);  // route count, then busy per later period
  std::function<void(unsigned, double)> split = [&](unsigned left, double cost) {
    if (++work_ > size_bound_) throw DpSizeExceeded("brute-force DP: size bound exceeded");
    if (left == 0) {
      auto [it, fresh] = out.emplace(counts, cost);
      if (!fresh) it->second = std::min(it->second, cost);
      return;
    }
    const unsigned low = left & (~left + 1);
    for (unsigned sub = left; sub; sub = (sub - 1) & left) {
      if (!(sub & low)) continue;
      for (auto [busy, c] : blocks[sub]) {
        ++counts[0];
        for (int p = period + 1; p <= std::min(busy, N); ++p) ++counts[p - period];
        split(left & ~sub, cost + c);
        --counts[0];
        for (int p = period + 1; p <= std::min(busy, N); ++p) --counts[p - period];
      }
    }
  };
  split((1u << m) - 1, 0.0);
  return actions_.emplace(key, std::move(out)).first->second;
}

double BruteForceDp::value(int period, int outcome, const DriverStatus& status) {
  const int N = setting_.horizon.num_periods, K = setting_.fleet.fleet_size;
  std::vector<int> zeta;
  for (int p = period; p <= N; ++p) zeta.push_back(status.at(p));
  const auto key = std::make_pair(std::make_pair(period, outcome), zeta);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  double best = kInf;
  for (const auto& [counts, cost] : actions(period, outcome)) {
    if (counts[0] > K - zeta[0]) continue;
    if (period == N) {
      best = std::min(best, cost);
      continue;
    }
    DriverStatus next = DriverStatus::idle(period + 1, N);
    bool legal = true;
    for (int p = period + 1; p <= N; ++p) {
      next.busy[p - period - 1] = zeta[p - period] + counts[p - period];
      legal &= next.busy[p - period - 1] <= K;
    }
    if (!legal) continue;
    double future = 0.0;
    const auto& outs = model_.branches.at(period);
    for (size_t o = 0; o < outs.size() && std::isfinite(future); ++o)
      if (outs[o].probability > 0.0)
        future += outs[o].probability * value(period + 1, static_cast<int>(o), next);
    best = std::min(best, cost + future);
  }
  memo_.emplace(key, best);
  return best;
}

double BruteForceDp::expected_value() {
  const auto start = DriverStatus::idle(1, setting_.horizon.num_periods);
  double total = 0.0;
  const auto& outs = model_.branches.at(0);
  for (size_t o = 0; o < outs.size(); ++o)
    if (outs[o].probability > 0.0) total += outs[o].probability * value(1, static_cast<int>(o), start);
  return total;
}

}  // namespace ontime
