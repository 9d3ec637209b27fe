#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ontime/cost_oracle.hpp"
#include "ontime/demand.hpp"
#include "ontime/io.hpp"
#include "ontime/mtrp.hpp"
#include "ontime/policy.hpp"

namespace ontime {

inline constexpr const char* kConfigSchema = "ontime.config/1";

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Line (1-based) of every value in a JSON text, keyed by JSON pointer ("" is
// the root). The text must already be valid JSON.
std::map<std::string, int> json_value_lines(const std::string& text);

struct SimulationSettings {
  int paths = 100;
  std::vector<PolicyKind> policies{PolicyKind::kSimpleMyopic, PolicyKind::kAdaptiveMyopic,
                                   PolicyKind::kAjrp};
  double rho = 10.0;
  double epsilon = 1e-4;
};

struct SolvePeriodSettings {
  std::string instance;  // resolved path
  int period = 1;
  std::vector<int> status;  // busy drivers for periods n..N, empty: idle
  PolicyKind policy = PolicyKind::kAjrp;
  std::string tables;  // resolved path, may be empty for the simple policy
};

struct BenchEntry {
  std::string file;  // resolved path
  MtrpClass cls = MtrpClass::kE;
  int vehicles = 0;
  bool round_distances = false;
  bool enforce_capacity = false;
};

// A run configuration file. With paper_scale, the "paper_scale" object is
// merged over the document (RFC 7386) before anything is read.
class RunConfig {
 public:
  static RunConfig load(const std::string& path, bool paper_scale = false);
  static RunConfig parse(const std::string& text, const std::string& path = "<config>",
                         bool paper_scale = false);

  const Json& json() const { return doc_; }
  const std::string& path() const { return path_; }
  std::string name() const;

  // Horizon, fleet and depot.
  Instance setting() const;
  DemandModel demand() const;
  OracleConfig oracle(std::uint64_t seed, int threads) const;
  SimulationSettings simulation() const;
  SolvePeriodSettings solve_period() const;
  std::vector<BenchEntry> bench() const;

  [[noreturn]] void error(const std::string& pointer, const std::string& what) const;

 private:
  int line_of(std::string pointer) const;
  const Json* find(const std::string& pointer) const;
  const Json& require(const std::string& pointer) const;
  double number(const std::string& pointer, double fallback) const;
  int integer(const std::string& pointer, int fallback) const;
  bool boolean(const std::string& pointer, bool fallback) const;
  std::string string(const std::string& pointer, const std::string& fallback) const;
  std::string resolve(const std::string& relative) const;

  std::string path_;
  Json doc_;
  bool paper_scale_ = false;
  std::map<std::string, int> lines_;
};

}  // namespace ontime
