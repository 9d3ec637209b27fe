#include "ontime/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

namespace ontime {

namespace {
constexpr double kEps = 1e-9;
}

Duals Duals::zero(const StopNetwork& net, int future_rows) {
  Duals d;
  d.nu.assign(net.num_nodes(), 0.0);
  d.mu_future.assign(future_rows, 0.0);
  return d;
}

double max_route_duration(const StopNetwork& net) {
  if (std::isfinite(net.max_arrival())) return net.max_arrival() + net.max_return_leg();
  // At most `fit` customers share a route: the smallest demands filling Q.
  std::vector<int> demand;
  std::vector<double> leg;
  double first = 0.0;
  for (int i = 1; i < net.num_nodes(); ++i) {
    demand.push_back(net.demand(i));
    first = std::max(first, net.travel(0, i));
    double out = 0.0;
    for (int j = 0; j < net.num_nodes(); ++j) out = std::max(out, net.travel(i, j));
    leg.push_back(net.service(i) + out);
  }
  std::sort(demand.begin(), demand.end());
  std::sort(leg.rbegin(), leg.rend());
  size_t fit = 0;
  for (int load = 0; fit < demand.size() && load + demand[fit] <= net.capacity(); ++fit)
    load += demand[fit];
  double bound = net.departure_offset() + first;
  for (size_t k = 0; k < fit; ++k) bound += leg[k];
  return bound;
}

std::vector<RouteClass> route_classes(const StopNetwork& net, const PlanningHorizon& horizon,
                                      int period, const Duals& duals, DriverMode mode) {
  const double longest = max_route_duration(net);
  if (mode == DriverMode::kPartTime) return {RouteClass{period, longest, 0.0}};
  if (duals.mu_future.empty())
    return {RouteClass{busy_through(horizon, period, longest), longest, duals.mu_now}};
  if (static_cast<int>(duals.mu_future.size()) != horizon.num_periods - period)
    throw std::invalid_argument("route_classes: one future dual per later period expected");
  std::vector<RouteClass> out;
  double mu = duals.mu_now;
  for (int p = period + 1; p <= horizon.num_periods; ++p) {
    mu += duals.mu_future[p - period - 1];
    double t_max = longest;
    if (p < horizon.num_periods)
      t_max = std::min(longest, horizon.epoch(p + 1) - horizon.epoch(period));
    out.push_back(RouteClass{p, t_max, mu});
    if (t_max >= longest) break;
  }
  return out;
}

ReducedCostMatrix ReducedCostMatrix::build(const StopNetwork& net, const Duals& duals,
                                           const RouteClass& cls, DriverMode mode, double rho,
                                           double arrival_weight) {
  ReducedCostMatrix m;
  m.size_ = net.num_nodes();
  m.arc_.assign(static_cast<size_t>(m.size_) * m.size_, 0.0);
  m.t_max_ = cls.t_max;
  m.arrival_weight_ = arrival_weight;
  m.return_weight_ = mode == DriverMode::kPartTime ? rho * arrival_weight : 0.0;
  const double depot_half = mode == DriverMode::kPartTime ? 0.0 : cls.depot_mu / 2.0;
  auto half = [&](int i) { return i == 0 ? depot_half : duals.nu[i] / 2.0; };
  for (int i = 0; i < m.size_; ++i)
    for (int j = 0; j < m.size_; ++j)
      if (i != j) m.arc_[static_cast<size_t>(i) * m.size_ + j] = -half(i) - half(j);
  return m;
}

NgSets NgSets::nearest(const StopNetwork& net, int size) {
  NgSets ng;
  const int n = net.num_nodes();
  ng.sets.assign(n, StopSet{});
  for (int i = 0; i < n; ++i) {
    ng.sets[i].set(i);
    if (i == 0) continue;
    std::vector<int> others;
    for (int j = 1; j < n; ++j)
      if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(),
                     [&](int a, int b) { return net.travel(i, a) < net.travel(i, b); });
    for (int k = 0; k < std::min<int>(size - 1, static_cast<int>(others.size())); ++k)
      ng.sets[i].set(others[k]);
  }
  return ng;
}

NgSets NgSets::full(const StopNetwork& net) {
  NgSets ng;
  StopSet all;
  for (int i = 1; i < net.num_nodes(); ++i) all.set(i);
  ng.sets.assign(net.num_nodes(), all);
  ng.sets[0].reset();
  ng.sets[0].set(0);
  return ng;
}

LabelRules::LabelRules(const StopNetwork& net, ReducedCostMatrix costs, NgSets ng)
    : net_(&net), costs_(std::move(costs)), ng_(std::move(ng)) {
  const int n = net.num_nodes();
  for (int i = 1; i < n; ++i) customers_.set(i);
  for (int i = 0; i < n && metric_; ++i)
    for (int j = 0; j < n && metric_; ++j)
      for (int k = 0; k < n; ++k)
        if (net.travel(i, k) > net.travel(i, j) + net.service(j) + net.travel(j, k) + kEps) {
          metric_ = false;
          break;
        }
}

// Direct-leg time filters are only a valid dominance key when detours never
// arrive earlier; otherwise V(L) keeps capacity and memory only.
StopSet LabelRules::forward_reach(int node, double time, int load, const StopSet& memory) const {
  StopSet out;
  const auto& net = *net_;
  for (int k = 1; k < net.num_nodes(); ++k) {
    if (memory.test(k) || k == node) continue;
    if (load + net.demand(k) > net.capacity()) continue;
    if (metric_) {
      const double arrive = time + net.service(node) + net.travel(node, k);
      if (arrive > net.max_arrival() + kEps) continue;
      if (arrive > costs_.t_max() - net.service(k) - net.travel(k, 0) + kEps) continue;
    }
    out.set(k);
  }
  return out;
}

StopSet LabelRules::backward_reach(int node, double latest, int load, const StopSet& memory) const {
  StopSet out;
  const auto& net = *net_;
  for (int k = 1; k < net.num_nodes(); ++k) {
    if (memory.test(k) || k == node) continue;
    if (load + net.demand(k) > net.capacity()) continue;
    if (metric_) {
      const double first = net.departure_offset() + net.travel(0, k);
      if (first > net.max_arrival() + kEps) continue;
      if (first + net.service(k) + net.travel(k, node) > latest + kEps) continue;
    }
    out.set(k);
  }
  return out;
}

ForwardLabel LabelRules::initial_forward() const {
  ForwardLabel l;
  l.time = net_->departure_offset();
  l.extendable = forward_reach(0, l.time, 0, l.memory);
  return l;
}

BackwardLabel LabelRules::initial_backward() const {
  BackwardLabel l;
  l.latest = costs_.t_max();
  l.extendable = backward_reach(0, l.latest, 0, l.memory);
  return l;
}

std::optional<ForwardLabel> LabelRules::extend(const ForwardLabel& from, int j) const {
  const auto& net = *net_;
  if (j <= 0 || j >= net.num_nodes() || !from.extendable.test(j)) return std::nullopt;
  const double e = from.time + net.service(from.node) + net.travel(from.node, j);
  if (e > net.max_arrival() + kEps) return std::nullopt;
  if (e > costs_.t_max() - net.service(j) - net.travel(j, 0) + kEps) return std::nullopt;
  ForwardLabel l;
  l.node = j;
  l.time = e;
  l.cost = from.cost + costs_.arrival_weight() * e + costs_(from.node, j);
  l.load = from.load + net.demand(j);
  if (l.load > net.capacity()) return std::nullopt;
  l.stops = from.stops + 1;
  l.memory = (from.memory & ng_.sets[j]);
  l.memory.set(j);
  l.visited = from.visited;
  l.visited.set(j);
  l.extendable = forward_reach(j, e, l.load, l.memory);
  return l;
}

std::optional<BackwardLabel> LabelRules::extend(const BackwardLabel& from, int j) const {
  const auto& net = *net_;
  if (j <= 0 || j >= net.num_nodes() || !from.extendable.test(j)) return std::nullopt;
  const double leg = net.service(j) + net.travel(j, from.node);
  const double latest = std::min(net.max_arrival(), from.latest - leg);
  if (net.departure_offset() + net.travel(0, j) > latest + kEps) return std::nullopt;
  BackwardLabel l;
  l.node = j;
  l.latest = latest;
  l.cost = from.cost + backward_weight(from.stops) * leg + costs_(j, from.node);
  l.stops = from.stops + 1;
  l.load = from.load + net.demand(j);
  if (l.load > net.capacity()) return std::nullopt;
  l.memory = (from.memory & ng_.sets[j]);
  l.memory.set(j);
  l.visited = from.visited;
  l.visited.set(j);
  l.extendable = backward_reach(j, latest, l.load, l.memory);
  return l;
}

std::optional<double> LabelRules::combine(const ForwardLabel& f, const BackwardLabel& b) const {
  const int i = f.node;
  if (i == 0 || b.node != i) return std::nullopt;
  StopSet overlap = f.memory & b.memory;
  overlap.reset(i);
  if (overlap.any() || !f.memory.test(i) || !b.memory.test(i)) return std::nullopt;
  if (f.load + b.load > net_->capacity() + net_->demand(i)) return std::nullopt;
  if (f.time > b.latest + kEps) return std::nullopt;
  return f.cost + b.cost + f.time * (backward_weight(b.stops) - costs_.arrival_weight());
}

bool LabelRules::dominates(const ForwardLabel& a, const ForwardLabel& b, LabelMode mode) const {
  if (a.node != b.node) return false;
  if (a.cost > b.cost + kEps || a.time > b.time + kEps || a.load > b.load) return false;
  if (mode == LabelMode::kEnumeration) return a.visited == b.visited;
  return (b.extendable & ~a.extendable).none();
}

bool LabelRules::dominates(const BackwardLabel& a, const BackwardLabel& b, LabelMode mode) const {
  if (a.node != b.node) return false;
  if (a.cost > b.cost + kEps || a.latest < b.latest - kEps || a.stops > b.stops ||
      a.load > b.load)
    return false;
  if (mode == LabelMode::kEnumeration) return a.visited == b.visited;
  return (b.extendable & ~a.extendable).none();
}

PruningBounds PruningBounds::build(const StopNetwork& net, const ReducedCostMatrix& costs,
                                   int max_stops, long max_grid) {
  PruningBounds b;
  const int n = net.num_nodes();
  b.size_ = n;
  b.max_stops_ = std::max(1, max_stops);
  const int cols = b.max_stops_ + 1;
  const double wa = costs.arrival_weight(), wr = costs.return_weight();
  b.back_.assign(static_cast<size_t>(n) * cols, kInf);
  for (int i = 1; i < n; ++i)
    b.back_[static_cast<size_t>(i) * cols + 1] = wr * (net.service(i) + net.travel(i, 0)) + costs(i, 0);
  for (int m = 2; m <= b.max_stops_; ++m) {
    const double w = wr + wa * (m - 1);
    for (int i = 1; i < n; ++i) {
      double best = kInf;
      for (int j = 1; j < n; ++j) {
        if (j == i) continue;
        const double prev = b.back_[static_cast<size_t>(j) * cols + m - 1];
        if (!std::isfinite(prev)) continue;
        best = std::min(best, prev + w * (net.service(i) + net.travel(i, j)) + costs(i, j));
      }
      b.back_[static_cast<size_t>(i) * cols + m] = best;
    }
  }

  double unit = 1.0;
  bool zero_leg = false;
  for (int j = 0; j < n; ++j)
    for (int i = 1; i < n; ++i) {
      if (i == j) continue;
      const double leg = net.service(j) + net.travel(j, i);
      if (leg <= 0.0) zero_leg = true;
      else unit = std::min(unit, leg);
    }
  const double horizon = costs.t_max();
  if (zero_leg || n < 2 || !std::isfinite(horizon)) return b;
  const long ticks = static_cast<long>(std::floor(horizon / unit));
  if (ticks < 0 || static_cast<long>(n) * (ticks + 1) > max_grid) return b;
  b.grid_ = unit;
  b.ticks_ = static_cast<int>(ticks);
  const int width = b.ticks_ + 1;
  std::vector<int> leg(static_cast<size_t>(n) * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j)
        leg[static_cast<size_t>(j) * n + i] =
            std::max(1, static_cast<int>(std::floor((net.service(j) + net.travel(j, i)) / unit - kEps)));
  b.exact_.assign(static_cast<size_t>(n) * width, kInf);
  const int start =
      std::max(0, static_cast<int>(std::floor(net.departure_offset() / unit - kEps)));
  if (start > b.ticks_) {
    b.grid_ = 0.0;
    return b;
  }
  b.exact_[start] = 0.0;
  for (int tau = start + 1; tau <= b.ticks_; ++tau) {
    for (int i = 1; i < n; ++i) {
      double best = kInf;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const int from = tau - leg[static_cast<size_t>(j) * n + i];
        if (from < 0) continue;
        if (j == 0 && from != start) continue;
        const double prev = b.exact_[static_cast<size_t>(j) * width + from];
        if (!std::isfinite(prev)) continue;
        best = std::min(best, prev + costs(j, i));
      }
      if (std::isfinite(best)) b.exact_[static_cast<size_t>(i) * width + tau] = best + wa * tau * unit;
    }
  }
  b.prefix_ = b.exact_;
  for (int i = 0; i < n; ++i)
    for (int tau = 1; tau < width; ++tau) {
      auto& cur = b.prefix_[static_cast<size_t>(i) * width + tau];
      cur = std::min(cur, b.prefix_[static_cast<size_t>(i) * width + tau - 1]);
    }
  return b;
}

double PruningBounds::backward(int i, int m) const {
  if (m < 1 || m > max_stops_ || i <= 0 || i >= size_) return kInf;
  return back_[static_cast<size_t>(i) * (max_stops_ + 1) + m];
}

double PruningBounds::forward(int i, double t) const {
  if (!forward_enabled() || i < 0 || i >= size_) return -kInf;
  const long g = std::min<long>(ticks_, static_cast<long>(std::floor(t / grid_ + kEps)));
  if (g < 0) return kInf;
  return prefix_[static_cast<size_t>(i) * (ticks_ + 1) + g];
}

double PruningBounds::forward_completion(const ForwardLabel& l, double wa, double wr) const {
  if (l.node == 0) return -kInf;
  double best = kInf;
  const int limit = max_stops_ - l.stops + 1;
  for (int m = 1; m <= limit; ++m) {
    const double tail = backward(l.node, m);
    if (!std::isfinite(tail)) continue;
    best = std::min(best, tail + l.time * (wr + wa * m - wa));
  }
  return l.cost + best;
}

double PruningBounds::backward_completion(const BackwardLabel& l, double wa, double wr) const {
  if (!forward_enabled() || l.node == 0) return -kInf;
  const int width = ticks_ + 1;
  if (static_cast<int>(join_cache_.size()) <= l.stops) join_cache_.resize(l.stops + 1);
  auto& table = join_cache_[l.stops];
  if (table.empty()) {
    const double coef = wr + wa * l.stops - wa;
    table.assign(static_cast<size_t>(size_) * width, kInf);
    for (int i = 1; i < size_; ++i) {
      double run = kInf;
      for (int tau = 0; tau < width; ++tau) {
        const double v = exact_[static_cast<size_t>(i) * width + tau];
        if (std::isfinite(v)) run = std::min(run, v + coef * tau * grid_);
        table[static_cast<size_t>(i) * width + tau] = run;
      }
    }
  }
  const long g = std::min<long>(ticks_, static_cast<long>(std::floor(l.latest / grid_ + kEps)));
  if (g < 0) return kInf;
  return l.cost + table[static_cast<size_t>(l.node) * width + g];
}

double route_reduced_cost(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                          const Duals& duals, const RouteMetrics& metrics, int busy_last,
                          DriverMode mode, double rho, double arrival_weight) {
  (void)net;
  (void)horizon;
  double v = arrival_weight * metrics.cost;
  if (mode == DriverMode::kPartTime) v += rho * arrival_weight * metrics.duration;
  return v - (mode == DriverMode::kFullTime ? duals.mu_now : 0.0) -
         [&] {
           if (mode == DriverMode::kPartTime || duals.mu_future.empty()) return 0.0;
           double s = 0.0;
           for (int p = period + 1; p <= busy_last; ++p) s += duals.mu_future[p - period - 1];
           return s;
         }();
}

PricedRoute price_route(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                        const Duals& duals, std::vector<int> stops, DriverMode mode, double rho,
                        double arrival_weight) {
  PricedRoute r;
  r.third_party = mode == DriverMode::kPartTime;
  r.metrics = route_cost_and_duration(net, stops);
  r.busy_last = busy_through(horizon, period, r.metrics.duration);
  double nu = 0.0;
  for (int s : stops) nu += duals.nu[s];
  r.stops = std::move(stops);
  r.reduced_cost = route_reduced_cost(net, horizon, period, duals, r.metrics, r.busy_last, mode,
                                      rho, arrival_weight) -
                   nu;
  return r;
}

namespace {

struct SearchOutput {
  std::map<std::vector<int>, double> paths;  // node sequence -> class reduced cost
  long labels = 0;
  bool overflow = false;
  bool pruned = false;
  bool rejected = false;
};

struct SearchConfig {
  LabelMode mode = LabelMode::kPricing;
  SearchSplit split = SearchSplit::kDynamic;
  double cutoff = 0.0;
  bool inclusive = false;
  long budget = 0;
};

class BidirectionalSearch {
 public:
  BidirectionalSearch(const LabelRules& rules, const PruningBounds* bounds, SearchConfig cfg)
      : rules_(rules), bounds_(bounds), cfg_(cfg), nodes_(rules.network().num_nodes()) {
    fwd_at_.resize(nodes_);
    bwd_at_.resize(nodes_);
  }

  SearchOutput run() {
    const double t_max = rules_.costs().t_max();
    push_forward(rules_.initial_forward(), true);
    push_backward(rules_.initial_backward(), true);
    switch (cfg_.split) {
      case SearchSplit::kForwardOnly:
        run_forward(kInf);
        run_backward(t_max);
        break;
      case SearchSplit::kBackwardOnly:
        run_forward(-kInf);
        run_backward(-kInf);
        break;
      case SearchSplit::kDynamic: {
        const double step = t_max / 16.0;
        double tf = step, tb = t_max - step;
        run_forward(tf);
        run_backward(tb);
        while (tf <= tb && !out_.overflow) {
          if (fwd_.size() > bwd_.size()) {
            tb -= step;
            run_backward(tb);
          } else {
            tf += step;
            run_forward(tf);
          }
        }
        break;
      }
    }
    if (!out_.overflow) join();
    out_.labels = static_cast<long>(fwd_.size() + bwd_.size());
    return std::move(out_);
  }

 private:
  bool accept(double rc) const {
    return cfg_.inclusive ? rc <= cfg_.cutoff + kEps : rc < cfg_.cutoff;
  }
  bool over(double bound) const { return bound > cfg_.cutoff + kEps; }

  template <typename L>
  size_t bucket_key(const L& l) const {
    if (cfg_.mode == LabelMode::kPricing) return static_cast<size_t>(l.node);
    return std::hash<StopSet>{}(l.visited) * 1315423911u + static_cast<size_t>(l.node);
  }

  void budget_check() {
    if (static_cast<long>(fwd_.size() + bwd_.size()) > cfg_.budget) out_.overflow = true;
  }

  template <typename L>
  bool insert(std::vector<L>& pool, std::vector<char>& dead,
              std::unordered_map<size_t, std::vector<int>>& buckets, L&& label) {
    auto& bucket = buckets[bucket_key(label)];
    size_t keep = 0;
    for (size_t k = 0; k < bucket.size(); ++k) {
      const int id = bucket[k];
      if (dead[id]) continue;
      bucket[keep++] = id;
    }
    bucket.resize(keep);
    for (int id : bucket)
      if (rules_.dominates(pool[id], label, cfg_.mode)) return false;
    for (int id : bucket)
      if (rules_.dominates(label, pool[id], cfg_.mode)) dead[id] = 1;
    bucket.push_back(static_cast<int>(pool.size()));
    pool.push_back(std::forward<L>(label));
    dead.push_back(0);
    return true;
  }

  void push_forward(ForwardLabel l, bool initial = false) {
    if (!initial && bounds_ &&
        over(bounds_->forward_completion(l, rules_.costs().arrival_weight(),
                                         rules_.costs().return_weight()))) {
      out_.pruned = true;
      return;
    }
    const double t = l.time;
    const int node = l.node;
    if (!insert(fwd_, fdead_, fbuckets_, std::move(l))) return;
    const int id = static_cast<int>(fwd_.size()) - 1;
    if (node != 0) fwd_at_[node].push_back(id);
    fqueue_.emplace(initial ? -kInf : t, id);
    budget_check();
  }

  void push_backward(BackwardLabel l, bool initial = false) {
    if (!initial && bounds_ &&
        over(bounds_->backward_completion(l, rules_.costs().arrival_weight(),
                                          rules_.costs().return_weight()))) {
      out_.pruned = true;
      return;
    }
    const double t = l.latest;
    const int node = l.node;
    if (!insert(bwd_, bdead_, bbuckets_, std::move(l))) return;
    const int id = static_cast<int>(bwd_.size()) - 1;
    if (node != 0) bwd_at_[node].push_back(id);
    bqueue_.emplace(initial ? kInf : t, id);
    budget_check();
  }

  void run_forward(double bound) {
    while (!fqueue_.empty() && !out_.overflow) {
      auto [t, id] = fqueue_.top();
      if (t > bound) break;
      fqueue_.pop();
      if (fdead_[id]) continue;
      const StopSet ext = fwd_[id].extendable;
      for (int j = 1; j < nodes_; ++j) {
        if (!ext.test(j)) continue;
        auto next = rules_.extend(fwd_[id], j);
        if (!next) continue;
        next->parent = id;
        push_forward(std::move(*next));
        if (out_.overflow) return;
      }
    }
  }

  void run_backward(double bound) {
    while (!bqueue_.empty() && !out_.overflow) {
      auto [t, id] = bqueue_.top();
      if (t < bound) break;
      bqueue_.pop();
      if (bdead_[id]) continue;
      const StopSet ext = bwd_[id].extendable;
      for (int j = 1; j < nodes_; ++j) {
        if (!ext.test(j)) continue;
        auto next = rules_.extend(bwd_[id], j);
        if (!next) continue;
        next->parent = id;
        push_backward(std::move(*next));
        if (out_.overflow) return;
      }
    }
  }

  std::vector<int> path(int f, int b) const {
    std::vector<int> seq;
    for (int id = f; id >= 0 && fwd_[id].node != 0; id = fwd_[id].parent) seq.push_back(fwd_[id].node);
    std::reverse(seq.begin(), seq.end());
    for (int id = bwd_[b].parent; id >= 0 && bwd_[id].node != 0; id = bwd_[id].parent)
      seq.push_back(bwd_[id].node);
    return seq;
  }

  void join() {
    for (int i = 1; i < nodes_; ++i) {
      std::vector<int> bs;
      for (int id : bwd_at_[i])
        if (!bdead_[id]) bs.push_back(id);
      std::stable_sort(bs.begin(), bs.end(),
                       [&](int a, int b) { return bwd_[a].cost < bwd_[b].cost; });
      for (int f : fwd_at_[i]) {
        if (fdead_[f]) continue;
        const auto& fl = fwd_[f];
        for (size_t k = 0; k < bs.size(); ++k) {
          const auto& bl = bwd_[bs[k]];
          if (over(fl.cost + bl.cost)) {
            out_.rejected = true;
            break;
          }
          auto rc = rules_.combine(fl, bl);
          if (!rc) continue;
          if (!accept(*rc)) {
            out_.rejected = true;
            continue;
          }
          auto seq = path(f, bs[k]);
          auto [it, fresh] = out_.paths.emplace(std::move(seq), *rc);
          if (!fresh) it->second = std::min(it->second, *rc);
        }
      }
    }
  }

  const LabelRules& rules_;
  const PruningBounds* bounds_;
  SearchConfig cfg_;
  int nodes_;
  std::vector<ForwardLabel> fwd_;
  std::vector<BackwardLabel> bwd_;
  std::vector<char> fdead_, bdead_;
  std::unordered_map<size_t, std::vector<int>> fbuckets_, bbuckets_;
  std::vector<std::vector<int>> fwd_at_, bwd_at_;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> fqueue_;
  std::priority_queue<Entry, std::vector<Entry>, std::less<Entry>> bqueue_;
  SearchOutput out_;
};

bool elementary(const std::vector<int>& seq) {
  StopSet seen;
  for (int v : seq) {
    if (seen.test(v)) return false;
    seen.set(v);
  }
  return true;
}

// Forbid every ng-cycle of seq by adding its closing node to the ng-sets of
// the nodes strictly inside the cycle.
bool forbid_cycles(const std::vector<int>& seq, NgSets& ng) {
  bool changed = false;
  for (size_t a = 0; a < seq.size(); ++a)
    for (size_t b = a + 1; b < seq.size(); ++b) {
      if (seq[a] != seq[b]) continue;
      for (size_t k = a + 1; k < b; ++k)
        if (!ng.sets[seq[k]].test(seq[a])) {
          ng.sets[seq[k]].set(seq[a]);
          changed = true;
        }
      break;
    }
  return changed;
}

// Stops on any admissible route: bounded by capacity and by time.
int stop_limit(const StopNetwork& net, double t_max, bool elementary_only) {
  const int customers = net.num_customers();
  long limit = elementary_only ? customers : std::numeric_limits<int>::max();
  int min_q = std::numeric_limits<int>::max();
  for (int i = 1; i < net.num_nodes(); ++i) min_q = std::min(min_q, net.demand(i));
  if (min_q > 0) limit = std::min<long>(limit, net.capacity() / min_q);
  double min_leg = kInf;
  for (int i = 1; i < net.num_nodes(); ++i)
    for (int j = 1; j < net.num_nodes(); ++j)
      if (i != j) min_leg = std::min(min_leg, net.service(i) + net.travel(i, j));
  if (min_leg > 0.0 && std::isfinite(t_max))
    limit = std::min<long>(limit, static_cast<long>(std::floor(t_max / min_leg)) + 1);
  if (limit > 4L * customers + 4) limit = 4L * customers + 4;
  return static_cast<int>(std::max<long>(1, limit));
}

// Greedy insertion-at-the-end routes from every start customer. Their exact
// reduced costs seed the search cutoff.
std::vector<std::vector<int>> greedy_routes(const StopNetwork& net, const PlanningHorizon& horizon,
                                            int period, const Duals& duals,
                                            const PricingOptions& opt) {
  std::vector<std::vector<int>> out;
  auto rc = [&](const std::vector<int>& seq) -> double {
    if (!evaluate_route(net, seq)) return kInf;
    return price_route(net, horizon, period, duals, seq, opt.mode, opt.rho, opt.arrival_weight)
        .reduced_cost;
  };
  for (int start = 1; start < net.num_nodes(); ++start) {
    std::vector<int> seq{start};
    if (!std::isfinite(rc(seq))) continue;
    StopSet used;
    used.set(start);
    std::vector<int> best_seq = seq;
    double best = rc(seq);
    while (true) {
      int pick = -1;
      double pick_rc = kInf;
      for (int j = 1; j < net.num_nodes(); ++j) {
        if (used.test(j)) continue;
        seq.push_back(j);
        const double v = rc(seq);
        seq.pop_back();
        if (v < pick_rc) {
          pick_rc = v;
          pick = j;
        }
      }
      if (pick < 0) break;
      seq.push_back(pick);
      used.set(pick);
      if (pick_rc < best) {
        best = pick_rc;
        best_seq = seq;
      }
    }
    out.push_back(best_seq);
  }
  return out;
}

}  // namespace

PricingResult solve_pricing(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                            const Duals& duals, const PricingOptions& opt) {
  PricingResult result;
  if (net.num_customers() == 0) return result;
  const auto classes = route_classes(net, horizon, period, duals, opt.mode);
  NgSets ng = opt.use_ng ? NgSets::nearest(net, opt.ng_size) : NgSets::full(net);

  std::map<std::vector<int>, PricedRoute> found;
  double incumbent = kInf;
  auto record = [&](const std::vector<int>& seq) {
    auto it = found.find(seq);
    if (it == found.end())
      it = found.emplace(seq, price_route(net, horizon, period, duals, seq, opt.mode, opt.rho,
                                          opt.arrival_weight))
               .first;
    incumbent = std::min(incumbent, it->second.reduced_cost);
  };
  for (const auto& seq : greedy_routes(net, horizon, period, duals, opt)) record(seq);

  for (const auto& cls : classes) {
    const double cutoff = std::min(opt.threshold, incumbent);
    auto costs = ReducedCostMatrix::build(net, duals, cls, opt.mode, opt.rho, opt.arrival_weight);
    std::optional<PruningBounds> bounds;
    if (opt.use_pruning && std::isfinite(cutoff))
      bounds = PruningBounds::build(net, costs, stop_limit(net, cls.t_max, !opt.use_ng));
    LabelRules rules(net, costs, ng);
    SearchConfig cfg;
    cfg.mode = LabelMode::kPricing;
    cfg.split = opt.split;
    cfg.cutoff = cutoff;
    cfg.inclusive = true;
    cfg.budget = opt.label_budget;
    SearchOutput out;
    while (true) {
      out = BidirectionalSearch(rules, bounds ? &*bounds : nullptr, cfg).run();
      result.labels += out.labels;
      if (out.overflow) {
        result.overflow = true;
        break;
      }
      if (out.paths.empty()) break;
      auto best = std::min_element(out.paths.begin(), out.paths.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
      if (elementary(best->first)) break;
      ++result.ng_rounds;
      if (!forbid_cycles(best->first, rules.ng())) break;
    }
    ng = rules.ng();
    for (auto& [seq, rc] : out.paths)
      if (elementary(seq)) record(seq);
    if (result.overflow) break;
  }
  for (auto& [seq, pr] : found)
    if (pr.reduced_cost < opt.threshold) result.routes.push_back(std::move(pr));
  result.best = incumbent;
  std::stable_sort(result.routes.begin(), result.routes.end(),
                   [](const PricedRoute& a, const PricedRoute& b) { return a.reduced_cost < b.reduced_cost; });
  if (opt.max_routes > 0 && static_cast<int>(result.routes.size()) > opt.max_routes)
    result.routes.resize(opt.max_routes);
  return result;
}

PricingResult greedy_pricing(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                             const Duals& duals, const PricingOptions& opt) {
  PricingResult result;
  std::map<std::vector<int>, PricedRoute> found;
  for (auto& seq : greedy_routes(net, horizon, period, duals, opt)) {
    if (found.count(seq)) continue;
    auto pr = price_route(net, horizon, period, duals, seq, opt.mode, opt.rho, opt.arrival_weight);
    result.best = std::min(result.best, pr.reduced_cost);
    found.emplace(std::move(seq), std::move(pr));
  }
  for (auto& [seq, pr] : found)
    if (pr.reduced_cost < opt.threshold) result.routes.push_back(std::move(pr));
  std::stable_sort(result.routes.begin(), result.routes.end(),
                   [](const PricedRoute& a, const PricedRoute& b) { return a.reduced_cost < b.reduced_cost; });
  if (opt.max_routes > 0 && static_cast<int>(result.routes.size()) > opt.max_routes)
    result.routes.resize(opt.max_routes);
  return result;
}

EnumerationResult enumerate_routes(const StopNetwork& net, const PlanningHorizon& horizon,
                                   int period, const Duals& duals, double delta,
                                   const EnumerationOptions& opt) {
  EnumerationResult result;
  result.complete = true;
  if (net.num_customers() == 0) return result;
  const auto classes = route_classes(net, horizon, period, duals, opt.mode);
  std::map<std::vector<int>, PricedRoute> found;
  for (const auto& cls : classes) {
    auto costs = ReducedCostMatrix::build(net, duals, cls, opt.mode, opt.rho, 1.0);
    std::optional<PruningBounds> bounds;
    if (opt.use_pruning) bounds = PruningBounds::build(net, costs, stop_limit(net, cls.t_max, true));
    LabelRules rules(net, costs, NgSets::full(net));
    SearchConfig cfg;
    cfg.mode = LabelMode::kEnumeration;
    cfg.cutoff = delta;
    cfg.inclusive = true;
    cfg.budget = opt.label_budget - result.labels;
    auto out = BidirectionalSearch(rules, bounds ? &*bounds : nullptr, cfg).run();
    result.labels += out.labels;
    if (out.overflow) {
      result.overflow = true;
      result.complete = false;
      break;
    }
    if (out.pruned || out.rejected) result.complete = false;
    for (auto& [seq, rc] : out.paths) {
      if (found.count(seq)) continue;
      auto pr = price_route(net, horizon, period, duals, seq, opt.mode, opt.rho, 1.0);
      if (pr.reduced_cost <= delta + kEps) found.emplace(seq, std::move(pr));
    }
  }
  for (auto& [seq, pr] : found) result.routes.push_back(std::move(pr));
  std::stable_sort(result.routes.begin(), result.routes.end(),
                   [](const PricedRoute& a, const PricedRoute& b) { return a.reduced_cost < b.reduced_cost; });
  return result;
}

}  // namespace ontime
