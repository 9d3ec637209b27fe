#pragma once

#include <vector>

#include "ontime/instance.hpp"
#include "ontime/lp.hpp"
#include "ontime/pricing.hpp"

namespace ontime {

// One period's routing problem with a cap on dispatched routes and, for each
// later period, a cap on routes still busy then. With third_party set, any
// number of extra routes may be hired at rho per minute of trip duration;
// they use no fleet capacity.
struct SinglePeriodProblem {
  StopNetwork net;
  PlanningHorizon horizon;
  int period = 1;
  int fleet_cap = 0;
  std::vector<int> future_caps;  // periods period+1..N; empty means no rows
  bool third_party = false;
  double rho = 10.0;

  static SinglePeriodProblem uncapped_future(StopNetwork net, int fleet_cap);

  // Objective coefficient: arrival sum, plus the hiring charge for hired routes.
  double column_cost(const PricedRoute& r) const {
    return r.metrics.cost + (r.third_party ? rho * r.metrics.duration : 0.0);
  }
};

struct ColumnGenerationOptions {
  PricingOptions pricing;
  int max_iterations = 10000;
  double artificial_cost = 1e6;
  bool greedy_first = true;  // exact pricing only once the greedy pass finds nothing
};

enum class CgStatus { kOptimal, kInfeasible, kIterationLimit, kOverflow };
const char* to_string(CgStatus s);

struct ColumnGenerationResult {
  CgStatus status = CgStatus::kOptimal;
  double value = 0.0;             // phi(RF1)
  Duals duals;                    // optimal duals, or the Farkas ray when infeasible
  std::vector<PricedRoute> pool;  // every generated column
  std::vector<double> x;          // LP values over pool
  int iterations = 0;

  bool feasible() const { return status == CgStatus::kOptimal; }
};

ColumnGenerationResult column_generation(const SinglePeriodProblem& problem,
                                         const ColumnGenerationOptions& opt = {});

struct Sf1Options {
  double step_size = -1.0;  // negative: 5% of phi(RF1) + 1
  double time_limit = 3600.0;
  long label_budget = 5'000'000;
  ColumnGenerationOptions cg;
};

enum class Sf1Status { kOptimal, kInfeasible, kTimeLimit, kUnsolved };
const char* to_string(Sf1Status s);

struct Sf1Result {
  Sf1Status status = Sf1Status::kOptimal;
  double cost = kInf;    // objective, hiring charges included
  double hiring = 0.0;   // rho * duration summed over hired routes
  double lp_value = 0.0;
  std::vector<PricedRoute> routes;
  double gap = 0.0;  // ub - lb when not proven optimal
  int rounds = 0;
  long enumerated = 0;
  double seconds = 0.0;

  bool solved() const { return status == Sf1Status::kOptimal; }
};

Sf1Result solve_sf1(const SinglePeriodProblem& problem, const Sf1Options& opt = {});
// Continues from a finished column generation run.
Sf1Result solve_sf1(const SinglePeriodProblem& problem, const ColumnGenerationResult& cg,
                    const Sf1Options& opt = {});

// H^s(k): optimal cost with at most k routes, +inf if none exists.
double evaluate_hs(const StopNetwork& net, int k, const Sf1Options& opt = {});
Sf1Result solve_hs(const StopNetwork& net, int k, const Sf1Options& opt = {});

struct NoFeasibleFleet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smallest k with finite H^s(k); throws NoFeasibleFleet when an order cannot
// be served even alone.
int minimal_feasible_k(const StopNetwork& net, const Sf1Options& opt = {});

// Myopic period solve with hired drivers as recourse: at most fleet_cap
// in-house routes, hired routes charged rho per minute of duration.
Sf1Result solve_with_recourse(const StopNetwork& net, int fleet_cap, double rho,
                              const Sf1Options& opt = {});

}  // namespace ontime
