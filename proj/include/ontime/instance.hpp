#pragma once

#include <bitset>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ontime {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper bound on stops in one single-period network (depot included).
inline constexpr int kMaxStops = 128;
using StopSet = std::bitset<kMaxStops>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double euclidean(Point a, Point b);

// Decision epochs t_0 < t_1 < ... < t_N. Periods are numbered 1..N and
// period n is decided at epoch t_n.
struct PlanningHorizon {
  int num_periods = 1;
  double period_length = 15.0;  // minutes
  double start_time = 0.0;      // t_0
  double prep_time = 0.0;       // t_p, added to every departure

  double epoch(int n) const { return start_time + n * period_length; }
  void validate() const;
};

struct FleetConfig {
  int fleet_size = 1;          // drivers on shift per period
  int capacity = 20;           // items per trip
  double max_duration = 60.0;  // latest customer arrival after dispatch (min)
  double service_time = 5.0;   // minutes per stop
  double speed_kmh = 20.0;

  double travel_minutes(Point a, Point b) const;
  void validate() const;
};

struct Order {
  int location = -1;  // index into candidate locations, -1 if ad hoc
  Point position;
  int quantity = 1;
};

struct PeriodRealization {
  int period = 1;
  std::vector<Order> orders;

  int total_quantity() const;
};

// Drivers still en route because of earlier dispatches: busy[k] is the
// count for period first_period + k.
struct DriverStatus {
  int first_period = 1;
  std::vector<int> busy;

  static DriverStatus idle(int first_period, int num_periods);
  int at(int period) const;
  bool operator==(const DriverStatus&) const = default;
};

// Customer stops of one decision epoch. Node 0 is the depot, nodes 1..m are
// the orders in realization order.
class StopNetwork {
 public:
  StopNetwork() = default;
  StopNetwork(std::vector<double> travel, std::vector<double> service,
              std::vector<int> demand, int capacity, double max_arrival,
              double departure_offset = 0.0);

  static StopNetwork from_orders(const FleetConfig& fleet, Point depot,
                                 const PeriodRealization& orders,
                                 double prep_time = 0.0);

  int num_customers() const { return size_ - 1; }
  int num_nodes() const { return size_; }
  double travel(int i, int j) const { return travel_[static_cast<size_t>(i) * size_ + j]; }
  double service(int i) const { return service_[i]; }
  int demand(int i) const { return demand_[i]; }
  int capacity() const { return capacity_; }
  double max_arrival() const { return max_arrival_; }
  double departure_offset() const { return departure_offset_; }
  int total_demand() const;

  // Longest possible return leg s_i + t_{i0}.
  double max_return_leg() const;

  // Copy restricted to the given customers (renumbered 1..k in that order).
  StopNetwork restricted(const std::vector<int>& customers) const;

 private:
  int size_ = 1;
  std::vector<double> travel_{0.0};
  std::vector<double> service_{0.0};
  std::vector<int> demand_{0};
  int capacity_ = 0;
  double max_arrival_ = kInf;
  double departure_offset_ = 0.0;
};

enum class RouteViolation { kNone, kCapacity, kDeadline, kMalformed };

class RouteInfeasible : public std::runtime_error {
 public:
  RouteInfeasible(RouteViolation kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  RouteViolation kind() const { return kind_; }

 private:
  RouteViolation kind_;
};

struct RouteMetrics {
  std::vector<double> arrivals;
  double cost = 0.0;      // sum of customer arrival times
  double duration = 0.0;  // back at the depot, service included
  int load = 0;
};

// Arrival times, cost, duration and load of the customer sequence `stops`
// (depot omitted at both ends). Throws RouteInfeasible.
RouteMetrics route_cost_and_duration(const StopNetwork& net,
                                     const std::vector<int>& stops);

// Non-throwing variant used in hot loops.
std::optional<RouteMetrics> evaluate_route(const StopNetwork& net,
                                           const std::vector<int>& stops,
                                           RouteViolation* why = nullptr);

// Last period in which a trip of `duration` dispatched at period n keeps its
// driver busy. A dispatched driver is always busy in period n+1; the result
// is n when n is the last period.
int busy_through(const PlanningHorizon& horizon, int dispatch_period,
                 double duration);

inline bool occupies(int dispatch_period, int busy_last, int period) {
  return period > dispatch_period && period <= busy_last;
}

struct Route {
  int dispatch_period = 1;
  std::vector<int> stops;  // network indices, depot excluded
  std::vector<double> arrivals;
  double duration = 0.0;
  double cost = 0.0;
  int load = 0;
  int busy_last = 1;  // see busy_through
  bool third_party = false;

  bool occupies(int period) const { return ontime::occupies(dispatch_period, busy_last, period); }
  double hiring_cost(double rho) const { return third_party ? rho * duration : 0.0; }
};

Route make_route(const StopNetwork& net, const PlanningHorizon& horizon,
                 int dispatch_period, std::vector<int> stops,
                 bool third_party = false);

class CapacityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Driver status for period n+1 after dispatching `routes` at period n.
// Third-party trips do not consume in-house drivers.
DriverStatus transition(const PlanningHorizon& horizon, int fleet_size,
                        const DriverStatus& status,
                        const std::vector<Route>& routes, int period);

// A scenario family: horizon, fleet and geometry. Realizations, when present,
// fix the orders of each period (index n - 1).
struct Instance {
  PlanningHorizon horizon;
  FleetConfig fleet;
  Point depot{5.0, 5.0};
  std::vector<Point> locations;
  std::vector<PeriodRealization> realizations;

  StopNetwork network(const PeriodRealization& orders) const {
    return StopNetwork::from_orders(fleet, depot, orders, horizon.prep_time);
  }
  void validate() const;
};

// Symmetric travel-time matrix for the depot and the given points.
std::vector<double> travel_matrix(const FleetConfig& fleet, Point depot,
                                  const std::vector<Point>& points);

}  // namespace ontime
