#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ontime/demand.hpp"
#include "ontime/io.hpp"
#include "ontime/policy.hpp"

namespace ontime {

inline constexpr const char* kReportSchema = "ontime.report/1";

// Outcome of one policy on one sample path.
struct PathRecord {
  int path = 0;
  std::string policy;
  double total = 0.0;
  double arrival = 0.0;
  double hiring = 0.0;
  std::vector<int> dispatched;  // in-house routes per period
  std::vector<int> hired;       // third-party routes per period
  std::vector<double> durations;
  int orders = 0;
  int covered = 0;
  int recourse_periods = 0;
  std::string error;  // set when a step failed; the path is then dropped from comparisons

  bool ok() const { return error.empty(); }
};

// Paired relative improvement (C_base - C_other) / C_base over the paths
// where both policies finished and C_base > 0.
struct PairedComparison {
  std::string baseline;
  std::string challenger;
  int paths = 0;         // pairs used
  int undefined = 0;     // pairs with C_base = 0 (reported as NA)
  int failed = 0;        // pairs with a failed path
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;   // 95% normal approximation
  double ci_high = 0.0;
  double p_greater = 1.0;  // one-sided, H1: mean > 0
  double p_less = 1.0;     // one-sided, H1: mean < 0

  bool defined() const { return paths > 0; }
};

struct PairedStats {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_greater = 1.0;
  double p_less = 1.0;
};
PairedStats paired_stats(const std::vector<double>& diffs);

struct SimulationReport {
  int num_paths = 0;
  std::vector<std::string> policies;
  std::vector<PathRecord> records;  // path-major, policies in order
  std::vector<double> mean_cost;    // per policy, over finished paths
  std::vector<PairedComparison> comparisons;
  Json config;

  const PathRecord& record(int path, int policy) const {
    return records.at(static_cast<size_t>(path) * policies.size() + policy);
  }
  const PairedComparison* compare(const std::string& baseline, const std::string& challenger) const;
};

// Policy names default to the kind; duplicates get a numeric suffix.
struct NamedPolicy {
  std::string name;
  PolicyConfig config;
};

// Rolls every policy over every path from an idle fleet. Comparisons cover
// each later policy against each earlier one.
SimulationReport run_simulation(const std::vector<NamedPolicy>& policies, const Instance& setting,
                                const std::vector<SamplePath>& paths, int threads = 1,
                                Json config = Json::object());

PairedComparison compare_policies(const SimulationReport& report, int baseline, int challenger);

void write_report_csv(std::ostream& out, const SimulationReport& report);
Json summary_json(const SimulationReport& report);

struct FleetScenarios {
  int small = 0;
  int medium = 0;
  int large = 0;
};

// small = max_n K-lower_n, then +25% and +50% of the peak I_n, rounded up.
FleetScenarios fleet_scenarios(const std::vector<int>& min_k, int peak_locations);

// Drivers busy at once when every period dispatches its smallest usable k:
// ceil of max_n sum_{m<=n} omega_m^n(k_min(m)). Below this the dispatch
// program has no feasible plan from an idle fleet. Throws when some period
// has no usable k.
int occupancy_fleet(const CostTables& tables);

// K-lower_n estimated as the largest minimal fleet over `samples` draws per period.
std::vector<int> pilot_min_k(const DemandModel& model, const Instance& setting, int samples,
                             std::uint64_t seed, const Sf1Options& sf1 = {});

}  // namespace ontime
