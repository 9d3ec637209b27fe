#include "ontime/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ontime {

namespace {
constexpr double kTimeEps = 1e-9;
}

double euclidean(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void PlanningHorizon::validate() const {
  if (num_periods < 1) throw std::invalid_argument("horizon: num_periods must be >= 1");
  if (!(period_length > 0.0)) throw std::invalid_argument("horizon: period_length must be > 0");
  if (prep_time < 0.0) throw std::invalid_argument("horizon: prep_time must be >= 0");
}

double FleetConfig::travel_minutes(Point a, Point b) const {
  return euclidean(a, b) / speed_kmh * 60.0;
}

void FleetConfig::validate() const {
  if (fleet_size < 1) throw std::invalid_argument("fleet: fleet_size must be >= 1");
  if (capacity < 1) throw std::invalid_argument("fleet: capacity must be >= 1");
  if (!(max_duration > 0.0)) throw std::invalid_argument("fleet: max_duration must be > 0");
  if (service_time < 0.0) throw std::invalid_argument("fleet: service_time must be >= 0");
  if (!(speed_kmh > 0.0)) throw std::invalid_argument("fleet: speed_kmh must be > 0");
}

void Instance::validate() const {
  horizon.validate();
  fleet.validate();
  for (const auto& r : realizations) {
    if (r.period < 1 || r.period > horizon.num_periods)
      throw std::invalid_argument("instance: realization period out of range");
    for (const auto& o : r.orders) {
      if (o.quantity < 1 || o.quantity > fleet.capacity)
        throw std::invalid_argument("instance: order quantity outside [1, Q]");
      if (o.location >= static_cast<int>(locations.size()))
        throw std::invalid_argument("instance: order location index out of range");
    }
  }
}

int PeriodRealization::total_quantity() const {
  int total = 0;
  for (const auto& o : orders) total += o.quantity;
  return total;
}

DriverStatus DriverStatus::idle(int first_period, int num_periods) {
  DriverStatus s;
  s.first_period = first_period;
  s.busy.assign(static_cast<size_t>(std::max(0, num_periods - first_period + 1)), 0);
  return s;
}

int DriverStatus::at(int period) const {
  const int k = period - first_period;
  if (k < 0 || k >= static_cast<int>(busy.size())) return 0;
  return busy[k];
}

StopNetwork::StopNetwork(std::vector<double> travel, std::vector<double> service,
                         std::vector<int> demand, int capacity, double max_arrival,
                         double departure_offset)
    : size_(static_cast<int>(service.size())),
      travel_(std::move(travel)),
      service_(std::move(service)),
      demand_(std::move(demand)),
      capacity_(capacity),
      max_arrival_(max_arrival),
      departure_offset_(departure_offset) {
  if (size_ < 1 || size_ > kMaxStops)
    throw std::invalid_argument("stop network: node count out of range");
  if (travel_.size() != static_cast<size_t>(size_) * size_ ||
      demand_.size() != static_cast<size_t>(size_))
    throw std::invalid_argument("stop network: inconsistent dimensions");
  service_[0] = 0.0;
  demand_[0] = 0;
}

StopNetwork StopNetwork::from_orders(const FleetConfig& fleet, Point depot,
                                     const PeriodRealization& orders, double prep_time) {
  std::vector<Point> pts;
  pts.reserve(orders.orders.size());
  std::vector<double> service{0.0};
  std::vector<int> demand{0};
  for (const auto& o : orders.orders) {
    pts.push_back(o.position);
    service.push_back(fleet.service_time);
    demand.push_back(o.quantity);
  }
  return StopNetwork(travel_matrix(fleet, depot, pts), std::move(service), std::move(demand),
                     fleet.capacity, fleet.max_duration, prep_time);
}

int StopNetwork::total_demand() const {
  int total = 0;
  for (int d : demand_) total += d;
  return total;
}

double StopNetwork::max_return_leg() const {
  double best = 0.0;
  for (int i = 1; i < size_; ++i) best = std::max(best, service(i) + travel(i, 0));
  return best;
}

StopNetwork StopNetwork::restricted(const std::vector<int>& customers) const {
  std::vector<int> nodes{0};
  nodes.insert(nodes.end(), customers.begin(), customers.end());
  const size_t k = nodes.size();
  std::vector<double> travel(k * k);
  std::vector<double> service(k);
  std::vector<int> demand(k);
  for (size_t a = 0; a < k; ++a) {
    service[a] = service_[nodes[a]];
    demand[a] = demand_[nodes[a]];
    for (size_t b = 0; b < k; ++b) travel[a * k + b] = this->travel(nodes[a], nodes[b]);
  }
  return StopNetwork(std::move(travel), std::move(service), std::move(demand), capacity_,
                     max_arrival_, departure_offset_);
}

std::optional<RouteMetrics> evaluate_route(const StopNetwork& net, const std::vector<int>& stops,
                                           RouteViolation* why) {
  auto fail = [&](RouteViolation v) -> std::optional<RouteMetrics> {
    if (why) *why = v;
    return std::nullopt;
  };
  RouteMetrics m;
  m.arrivals.reserve(stops.size());
  StopSet seen;
  double clock = net.departure_offset();
  int prev = 0;
  for (int stop : stops) {
    if (stop <= 0 || stop >= net.num_nodes() || seen.test(stop)) return fail(RouteViolation::kMalformed);
    seen.set(stop);
    clock += net.service(prev) + net.travel(prev, stop);
    if (clock > net.max_arrival() + kTimeEps) return fail(RouteViolation::kDeadline);
    m.arrivals.push_back(clock);
    m.cost += clock;
    m.load += net.demand(stop);
    prev = stop;
  }
  if (m.load > net.capacity()) return fail(RouteViolation::kCapacity);
  m.duration = stops.empty() ? 0.0 : clock + net.service(prev) + net.travel(prev, 0);
  if (why) *why = RouteViolation::kNone;
  return m;
}

RouteMetrics route_cost_and_duration(const StopNetwork& net, const std::vector<int>& stops) {
  RouteViolation why = RouteViolation::kNone;
  auto m = evaluate_route(net, stops, &why);
  if (m) return *std::move(m);
  switch (why) {
    case RouteViolation::kCapacity:
      throw RouteInfeasible(why, "route exceeds vehicle capacity");
    case RouteViolation::kDeadline:
      throw RouteInfeasible(why, "route misses the delivery duration limit");
    default:
      throw RouteInfeasible(why, "route visits an invalid or repeated stop");
  }
}

int busy_through(const PlanningHorizon& horizon, int dispatch_period, double duration) {
  const int n = dispatch_period;
  if (n >= horizon.num_periods) return n;
  int last = n + 1;
  for (int p = n + 2; p <= horizon.num_periods; ++p) {
    if (duration > horizon.epoch(p) - horizon.epoch(n) + kTimeEps)
      last = p;
    else
      break;
  }
  return last;
}

Route make_route(const StopNetwork& net, const PlanningHorizon& horizon, int dispatch_period,
                 std::vector<int> stops, bool third_party) {
  Route r;
  auto m = route_cost_and_duration(net, stops);
  r.dispatch_period = dispatch_period;
  r.stops = std::move(stops);
  r.arrivals = std::move(m.arrivals);
  r.duration = m.duration;
  r.cost = m.cost;
  r.load = m.load;
  r.busy_last = busy_through(horizon, dispatch_period, m.duration);
  r.third_party = third_party;
  return r;
}

DriverStatus transition(const PlanningHorizon& horizon, int fleet_size, const DriverStatus& status,
                        const std::vector<Route>& routes, int period) {
  DriverStatus next = DriverStatus::idle(period + 1, horizon.num_periods);
  for (int p = period + 1; p <= horizon.num_periods; ++p) {
    int count = status.at(p);
    for (const auto& r : routes) {
      if (r.third_party) continue;
      if (ontime::occupies(period, busy_through(horizon, period, r.duration), p)) ++count;
    }
    if (count > fleet_size) {
      std::ostringstream os;
      os << "driver status " << count << " exceeds fleet size " << fleet_size << " in period " << p;
      throw CapacityViolation(os.str());
    }
    next.busy[p - period - 1] = count;
  }
  return next;
}

std::vector<double> travel_matrix(const FleetConfig& fleet, Point depot,
                                  const std::vector<Point>& points) {
  std::vector<Point> all{depot};
  all.insert(all.end(), points.begin(), points.end());
  const size_t k = all.size();
  std::vector<double> t(k * k, 0.0);
  for (size_t a = 0; a < k; ++a)
    for (size_t b = a + 1; b < k; ++b) t[a * k + b] = t[b * k + a] = fleet.travel_minutes(all[a], all[b]);
  return t;
}

}  // namespace ontime
