#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ontime/instance.hpp"
#include "ontime/io.hpp"

namespace ontime {

enum class DemandKind { kStationary, kSinglePeak, kDoublePeak, kEmpirical, kScenarioTree };
const char* to_string(DemandKind k);
DemandKind parse_demand_kind(const std::string& s);

// One outcome of a period with a finite demand law.
struct DemandBranch {
  double probability = 1.0;
  std::vector<Order> orders;
};

// Per-period order law. Location counts I_n are deterministic; positions are
// uniform on the square [0, side]^2 and quantities Poisson(lambda) resampled
// until they fall in [1, max_quantity]. Empirical models draw a stored
// realization uniformly; scenario trees carry explicit probabilities and are
// independent across periods.
struct DemandModel {
  DemandKind kind = DemandKind::kStationary;
  std::vector<int> locations;  // I_n, index n - 1
  double side_km = 10.0;
  double lambda = 2.0;
  int max_quantity = 20;
  std::vector<std::vector<DemandBranch>> branches;  // empirical and tree kinds

  int num_periods() const;
  // True when every period follows the same law.
  bool stationary() const;
  bool finite() const { return kind == DemandKind::kScenarioTree; }
  int peak_locations() const;

  PeriodRealization sample(int period, std::mt19937_64& rng) const;
  // Outcomes of a finite-law period with their probabilities.
  std::vector<DemandBranch> outcomes(int period) const;

  void validate() const;

  static DemandModel stationary_model(int periods, int locations, int max_quantity = 20,
                                      double lambda = 2.0);
  // Rises linearly from low to high and back; the double peak repeats the
  // single-peak shape over each half of the horizon.
  static DemandModel single_peak(int periods, int low, int high, int max_quantity = 20,
                                 double lambda = 2.0);
  static DemandModel double_peak(int periods, int low, int high, int max_quantity = 20,
                                 double lambda = 2.0);
  static DemandModel empty(int periods);
};

int sample_quantity(double lambda, int max_quantity, std::mt19937_64& rng);

// Stream for (seed, index) pairs; independent of how many are drawn.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

using SamplePath = std::vector<PeriodRealization>;

// Path p draws from make_stream(seed, p).
std::vector<SamplePath> generate_paths(const DemandModel& model, int count, std::uint64_t seed);

// Every combination of outcomes of a finite model, with its probability.
struct WeightedPath {
  double probability = 1.0;
  SamplePath path;
};
std::vector<WeightedPath> enumerate_paths(const DemandModel& model);

Json to_json(const DemandModel& m);
DemandModel demand_from_json(const Json& j);

}  // namespace ontime
