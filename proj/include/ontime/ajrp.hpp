#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "ontime/cost_oracle.hpp"
#include "ontime/lp.hpp"
#include "ontime/single_period.hpp"

namespace ontime {

// Everything a lookahead step sees besides the current orders.
struct LookaheadContext {
  PlanningHorizon horizon;
  int fleet_size = 0;        // K-bar
  const CostTables* tables = nullptr;
};

// A cut of the master. Dual cuts read
//   constant + sum_j coef[j] * Z_j  <=  eta   (optimality)
//   constant + sum_j coef[j] * Z_j  <=  0     (feasibility)
// where Z_j is the number of current routes allowed to be busy in period
// n + 1 + j. A logic cut forbids one (x, Z) count pattern.
struct BendersCut {
  enum class Kind { kOptimality, kFeasibility, kLogic };
  Kind kind = Kind::kLogic;
  double constant = 0.0;
  std::vector<double> coef;
  std::vector<int> x_pattern;  // dispatch count per future period
  std::vector<int> z_pattern;

  bool satisfied(const std::vector<int>& x, const std::vector<int>& z, double eta,
                 double tol = 1e-7) const;
};
const char* to_string(BendersCut::Kind k);

BendersCut make_optimality_cut(const Duals& duals, int fleet_cap);
BendersCut make_feasibility_cut(const Duals& ray, int fleet_cap);
BendersCut make_logic_cut(std::vector<int> x, std::vector<int> z);

struct AjrpOptions {
  double epsilon = 1e-4;  // relative to ub
  double time_limit = 600.0;
  int max_iterations = 100000;
  Sf1Options sf1;
  MipOptions mip;
};

enum class AjrpStatus { kOptimal, kInfeasible, kTimeLimit, kIterationLimit, kUnsolved };
const char* to_string(AjrpStatus s);

struct TraceRow {
  int iteration = 0;
  double lb = 0.0;
  double ub = kInf;
  std::string cut;
};

struct AjrpResult {
  AjrpStatus status = AjrpStatus::kUnsolved;
  std::vector<PricedRoute> routes;  // current period
  std::vector<int> plan;            // dispatch count for periods n+1..N
  std::vector<int> z_caps;          // busy allowance used for the routes
  double routing_cost = kInf;       // phi(SF1)
  double future_cost = kInf;        // table cost of the plan
  double lb = -kInf;
  double ub = kInf;
  int iterations = 0;
  std::vector<BendersCut> cuts;
  std::vector<TraceRow> trace;

  bool has_incumbent() const { return std::isfinite(ub); }
};

// One AJRP decision at period n under driver status zeta.
AjrpResult ajrp_step(const StopNetwork& net, int period, const DriverStatus& status,
                     const LookaheadContext& ctx, const AjrpOptions& opt = {});

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

// The approximation program with the current period's cost given per k:
//   min sum_k current[k] x^n_k + sum_{m > n} sum_k E[H_m(k)] x^m_k
//   s.t. sum_{m=n}^{n'} sum_k omega_m^{n'}(k) x^m_k <= K-bar - zeta_{n'}
struct DispatchResult {
  bool feasible = false;
  int now = 0;            // drivers dispatched in period n
  std::vector<int> plan;  // periods n+1..N
  double objective = kInf;
};

DispatchResult solve_dispatch_ip(const std::vector<double>& current, int period,
                                 const DriverStatus& status, const LookaheadContext& ctx,
                                 const MipOptions& opt = {});

}  // namespace ontime
