#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ontime/demand.hpp"
#include "ontime/io.hpp"
#include "ontime/single_period.hpp"

namespace ontime {

struct OracleConfig {
  int samples = 100;           // per period, sampled models only
  double rho_prune = 1.0 / 3;  // entry finite only with this share of feasible samples
  std::uint64_t seed = 1;
  int max_k = -1;              // negative: the fleet size
  int threads = 1;
  bool monotone_repair = true;
  Sf1Options sf1;

  void validate() const;
};

// Estimated E[H^s(k)] per period n = 1..N and k = 0..max_k.
struct CostTable {
  int max_k = 0;
  std::vector<std::vector<double>> cost;      // [n - 1][k], +inf when unusable
  std::vector<std::vector<double>> feasible;  // weight of samples feasible at k
  std::vector<double> total;                  // weight of all samples of period n
  std::vector<int> sample_count;

  int num_periods() const { return static_cast<int>(cost.size()); }
  double at(int n, int k) const { return cost.at(n - 1).at(k); }
  bool usable(int n, int k) const;

  // Table with every entry given; weights default to one feasible sample.
  static CostTable from_values(std::vector<std::vector<double>> values);
};

// Average number of drivers dispatched in period m with k routes that are
// still out in period n >= m; the n = m entry is k.
struct OmegaTable {
  int max_k = 0;
  std::vector<std::vector<std::vector<double>>> values;  // [m - 1][n - m][k]

  int num_periods() const { return static_cast<int>(values.size()); }
  double at(int m, int n, int k) const { return values.at(m - 1).at(n - m).at(k); }

  // omega^n_m(k) = k when n = m and 0 otherwise: every trip ends within a period.
  static OmegaTable instant(int periods, int max_k);
};

struct CostTables {
  CostTable cost;
  OmegaTable omega;
  Json provenance;  // config, seed and model that produced the tables
};

class OracleConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Routes of an optimal H^s(k) solution still busy in period n when dispatched
// at period m, counted from their durations.
int busy_count(const PlanningHorizon& horizon, int m, int n, const std::vector<double>& durations);

CostTables build_tables(const DemandModel& model, const Instance& setting, const OracleConfig& cfg);

// Pool-adjacent-violators fit of a weighted sequence, nonincreasing when
// `decreasing`, nondecreasing otherwise.
std::vector<double> isotonic_fit(const std::vector<double>& values,
                                 const std::vector<double>& weights, bool decreasing);

Json to_json(const CostTables& t);
CostTables tables_from_json(const Json& j);
void write_tables(const std::string& path, const CostTables& t);
CostTables read_tables(const std::string& path);

}  // namespace ontime
