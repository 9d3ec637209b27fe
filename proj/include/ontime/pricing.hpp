#pragma once

#include <optional>
#include <vector>

#include "ontime/instance.hpp"

namespace ontime {

// Duals of the route master: nu[i] for the cover row of node i (nu[0]
// unused), mu_now for the fleet row, mu_future[p - n - 1] for the busy row
// of period p. Empty mu_future means the master has no future rows.
struct Duals {
  std::vector<double> nu;
  double mu_now = 0.0;
  std::vector<double> mu_future;

  static Duals zero(const StopNetwork& net, int future_rows = 0);
};

enum class DriverMode { kFullTime, kPartTime };
enum class LabelMode { kPricing, kEnumeration };

// Routes returning within the same window share one pricing problem.
struct RouteClass {
  int busy_last = 0;       // period through which a class member is busy
  double t_max = 0.0;      // longest admissible duration
  double depot_mu = 0.0;   // sum of mu over the periods the class occupies
};

// Longest duration any route of the network can have: L_max plus the longest
// return leg, or a path-length bound when L_max is unbounded.
double max_route_duration(const StopNetwork& net);

std::vector<RouteClass> route_classes(const StopNetwork& net, const PlanningHorizon& horizon,
                                      int period, const Duals& duals, DriverMode mode);

class ReducedCostMatrix {
 public:
  ReducedCostMatrix() = default;
  // arrival_weight multiplies customer arrivals (0 when pricing against a
  // Farkas ray); in part-time mode the return time is weighted by rho.
  static ReducedCostMatrix build(const StopNetwork& net, const Duals& duals,
                                 const RouteClass& cls, DriverMode mode, double rho = 10.0,
                                 double arrival_weight = 1.0);

  double operator()(int i, int j) const { return arc_[static_cast<size_t>(i) * size_ + j]; }
  int size() const { return size_; }
  double t_max() const { return t_max_; }
  double arrival_weight() const { return arrival_weight_; }
  double return_weight() const { return return_weight_; }

 private:
  int size_ = 0;
  std::vector<double> arc_;
  double t_max_ = 0.0;
  double arrival_weight_ = 1.0;
  double return_weight_ = 0.0;
};

// Neighbourhoods for the ng-route relaxation; every set contains its owner.
struct NgSets {
  std::vector<StopSet> sets;

  static NgSets nearest(const StopNetwork& net, int size = 8);
  static NgSets full(const StopNetwork& net);
  bool contains(int owner, int j) const { return sets[owner].test(j); }
};

struct ForwardLabel {
  int node = 0;
  double cost = 0.0;
  double time = 0.0;  // arrival at node
  int load = 0;
  int stops = 0;
  StopSet memory;      // ng memory; equals the visited set without ng
  StopSet visited;
  StopSet extendable;  // V(L)
  int parent = -1;
};

struct BackwardLabel {
  int node = 0;
  double cost = 0.0;
  double latest = 0.0;  // latest arrival at node
  int stops = 0;
  int load = 0;
  StopSet memory;
  StopSet visited;
  StopSet extendable;
  int parent = -1;
};

// Extension, dominance and join rules for one route class.
class LabelRules {
 public:
  LabelRules(const StopNetwork& net, ReducedCostMatrix costs, NgSets ng);

  const StopNetwork& network() const { return *net_; }
  const ReducedCostMatrix& costs() const { return costs_; }
  const NgSets& ng() const { return ng_; }
  NgSets& ng() { return ng_; }

  ForwardLabel initial_forward() const;
  BackwardLabel initial_backward() const;
  std::optional<ForwardLabel> extend(const ForwardLabel& from, int j) const;
  std::optional<BackwardLabel> extend(const BackwardLabel& from, int j) const;

  // Backward weight of a label with the given customer count.
  double backward_weight(int stops) const {
    return costs_.return_weight() + costs_.arrival_weight() * stops;
  }
  // Reduced cost of the route formed by joining at a common customer.
  std::optional<double> combine(const ForwardLabel& f, const BackwardLabel& b) const;

  bool dominates(const ForwardLabel& a, const ForwardLabel& b, LabelMode mode) const;
  bool dominates(const BackwardLabel& a, const BackwardLabel& b, LabelMode mode) const;

 private:
  StopSet forward_reach(int node, double time, int load, const StopSet& memory) const;
  StopSet backward_reach(int node, double latest, int load, const StopSet& memory) const;

  const StopNetwork* net_;
  ReducedCostMatrix costs_;
  NgSets ng_;
  bool metric_ = true;
  StopSet customers_;
};

// Completion bounds used to discard labels that cannot reach the cutoff.
class PruningBounds {
 public:
  static PruningBounds build(const StopNetwork& net, const ReducedCostMatrix& costs,
                             int max_stops, long max_grid = 200000);

  // Cheapest path i -> depot with m customers (i included), priced from the
  // arrival at i.
  double backward(int i, int m) const;
  // Cheapest depot -> i path whose relaxed arrival is at most t.
  double forward(int i, double t) const;
  bool forward_enabled() const { return grid_ > 0.0; }
  double grid_unit() const { return grid_; }
  int max_stops() const { return max_stops_; }

  double forward_completion(const ForwardLabel& l, double arrival_weight,
                            double return_weight) const;
  double backward_completion(const BackwardLabel& l, double arrival_weight,
                             double return_weight) const;

 private:
  int size_ = 0;
  int max_stops_ = 0;
  std::vector<double> back_;  // size_ x (max_stops_ + 1)
  double grid_ = 0.0;
  int ticks_ = 0;
  std::vector<double> exact_;   // size_ x (ticks_ + 1)
  std::vector<double> prefix_;  // running minimum of exact_
  mutable std::vector<std::vector<double>> join_cache_;  // per backward weight
};

struct PricedRoute {
  std::vector<int> stops;
  RouteMetrics metrics;
  int busy_last = 0;
  double reduced_cost = 0.0;
  bool third_party = false;  // priced in part-time mode
};

enum class SearchSplit { kDynamic, kForwardOnly, kBackwardOnly };

struct PricingOptions {
  double threshold = -1e-6;  // report routes with reduced cost below this
  bool use_pruning = true;
  bool use_ng = true;
  int ng_size = 8;
  int max_routes = 50;
  SearchSplit split = SearchSplit::kDynamic;
  DriverMode mode = DriverMode::kFullTime;
  double rho = 10.0;
  double arrival_weight = 1.0;
  long label_budget = 5'000'000;
};

struct PricingResult {
  std::vector<PricedRoute> routes;  // sorted by reduced cost
  double best = kInf;               // minimum reduced cost seen
  long labels = 0;
  int ng_rounds = 0;
  bool overflow = false;
};

// Exact reduced cost of an explicit route under the given duals.
double route_reduced_cost(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                          const Duals& duals, const RouteMetrics& metrics, int busy_last,
                          DriverMode mode, double rho, double arrival_weight = 1.0);

PricedRoute price_route(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                        const Duals& duals, std::vector<int> stops, DriverMode mode,
                        double rho, double arrival_weight = 1.0);

PricingResult solve_pricing(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                            const Duals& duals, const PricingOptions& opt = {});

// Greedy end-insertion from every start customer. Cheap, no optimality
// guarantee; best is the minimum over the routes tried.
PricingResult greedy_pricing(const StopNetwork& net, const PlanningHorizon& horizon, int period,
                             const Duals& duals, const PricingOptions& opt = {});

struct EnumerationOptions {
  bool use_pruning = true;
  DriverMode mode = DriverMode::kFullTime;
  double rho = 10.0;
  long label_budget = 5'000'000;
};

struct EnumerationResult {
  std::vector<PricedRoute> routes;
  bool complete = false;  // nothing was excluded by the reduced-cost bound
  bool overflow = false;
  long labels = 0;
};

// Every customer subset whose best ordering has reduced cost <= delta, with
// its non-dominated orderings.
EnumerationResult enumerate_routes(const StopNetwork& net, const PlanningHorizon& horizon,
                                   int period, const Duals& duals, double delta,
                                   const EnumerationOptions& opt = {});

}  // namespace ontime
