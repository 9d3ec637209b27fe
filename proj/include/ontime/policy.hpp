#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ontime/ajrp.hpp"
#include "ontime/cost_oracle.hpp"
#include "ontime/demand.hpp"
#include "ontime/instance.hpp"

namespace ontime {

enum class PolicyKind { kSimpleMyopic, kAdaptiveMyopic, kAjrp };
const char* to_string(PolicyKind k);
PolicyKind parse_policy_kind(const std::string& s);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kSimpleMyopic;
  double rho = 10.0;  // hiring cost per minute of a third-party trip
  const CostTables* tables = nullptr;
  Sf1Options sf1;
  AjrpOptions ajrp;

  void validate() const;
};

struct PolicyDecision {
  std::vector<Route> routes;  // in-house and hired, hired ones flagged
  std::vector<int> plan;      // lookahead dispatch plan for later periods
  double arrival_cost = 0.0;  // sum of arrival times over all routes
  double hiring_cost = 0.0;   // rho times the duration of hired trips
  bool recourse = false;      // hired drivers were allowed

  double cost() const { return arrival_cost + hiring_cost; }
  int in_house() const;
};

// One decision at period n with driver status zeta. The setting supplies
// horizon, fleet and depot; its realizations are ignored.
PolicyDecision policy_step(const PolicyConfig& cfg, const Instance& setting,
                           const PeriodRealization& orders, const DriverStatus& status);

PolicyDecision simple_myopic_step(const PolicyConfig& cfg, const Instance& setting,
                                  const PeriodRealization& orders, const DriverStatus& status);
PolicyDecision adaptive_myopic_step(const PolicyConfig& cfg, const Instance& setting,
                                    const PeriodRealization& orders, const DriverStatus& status);
PolicyDecision ajrp_policy_step(const PolicyConfig& cfg, const Instance& setting,
                                const PeriodRealization& orders, const DriverStatus& status);

// Myopic solve with hired drivers allowed next to at most fleet_cap in-house routes.
PolicyDecision recourse_step(const PolicyConfig& cfg, const Instance& setting,
                             const PeriodRealization& orders, int fleet_cap);

class DpSizeExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact Bellman recursion over a finite scenario tree whose periods are
// independent. Actions are all partitions of the current orders into at most
// K-bar - zeta_n sequenced in-house routes; no hired drivers.
class BruteForceDp {
 public:
  BruteForceDp(const Instance& setting, const DemandModel& model, long size_bound = 1'000'000);

  // Optimal cost-to-go at period n after outcome `outcome` of that period.
  double value(int period, int outcome, const DriverStatus& status);
  // Expected optimal cost from period 1 with every driver idle.
  double expected_value();

 private:
  // Cheapest partition per (route count, busy counts for periods n+1..N).
  using Actions = std::map<std::vector<int>, double>;
  const Actions& actions(int period, int outcome);

  Instance setting_;
  DemandModel model_;
  long size_bound_;
  long work_ = 0;
  std::map<std::pair<int, int>, Actions> actions_;
  std::map<std::pair<std::pair<int, int>, std::vector<int>>, double> memo_;
};

}  // namespace ontime
