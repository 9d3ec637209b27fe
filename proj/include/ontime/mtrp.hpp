#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ontime/instance.hpp"
#include "ontime/single_period.hpp"

namespace ontime {

// LQL instances are TSPLIB subsets without capacities; E and P are CVRP files.
enum class MtrpClass { kLql, kE, kP };
const char* to_string(MtrpClass c);
MtrpClass parse_mtrp_class(const std::string& s);

struct MtrpInstance {
  std::string name;
  MtrpClass cls = MtrpClass::kE;
  std::vector<Point> coords;  // depot first
  std::vector<int> demands;   // depot first, 0 for the depot
  int vehicles = 1;
  int capacity = 0;           // 0 when uncapacitated
  bool round_distances = false;
  // The repairman benchmarks route k vehicles without load limits; the file's
  // CAPACITY is kept but only binds when this is set.
  bool enforce_capacity = false;

  int num_customers() const { return static_cast<int>(coords.size()) - 1; }
};

class MtrpParseError : public std::runtime_error {
 public:
  MtrpParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// vehicles <= 0 takes the count from a "-k<count>" name suffix.
MtrpInstance parse_mtrp(std::istream& in, MtrpClass cls, int vehicles = 0);
MtrpInstance read_mtrp(const std::string& path, MtrpClass cls, int vehicles = 0);
void write_mtrp(std::ostream& out, const MtrpInstance& inst);

// Euclidean travel (nearest-integer when round_distances), no service time,
// no duration limit, capacity only when enforced.
StopNetwork to_network(const MtrpInstance& inst);

struct MtrpBenchRow {
  std::string name;
  std::string status;
  double cost = kInf;
  double lp_value = 0.0;
  double seconds = 0.0;
  long routes = 0;
};

MtrpBenchRow bench_mtrp(const MtrpInstance& inst, double time_limit);
void write_bench_csv(std::ostream& out, const std::vector<MtrpBenchRow>& rows);

}  // namespace ontime
