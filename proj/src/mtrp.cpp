#include "ontime/mtrp.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

namespace ontime {

const char* to_string(MtrpClass c) {
  switch (c) {
    case MtrpClass::kLql: return "LQL";
    case MtrpClass::kE: return "E";
    case MtrpClass::kP: return "P";
  }
  return "?";
}

MtrpClass parse_mtrp_class(const std::string& s) {
  if (s == "LQL" || s == "lql") return MtrpClass::kLql;
  if (s == "E" || s == "e") return MtrpClass::kE;
  if (s == "P" || s == "p") return MtrpClass::kP;
  throw std::invalid_argument("unknown MTRP class '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

MtrpInstance parse_mtrp(std::istream& in, MtrpClass cls, int vehicles) {
  MtrpInstance inst;
  inst.cls = cls;
  int dimension = -1;
  enum class Section { kNone, kCoords, kDemands, kDepot } section = Section::kNone;
  std::map<int, Point> coords;
  std::map<int, int> demands;
  std::vector<int> depots;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty()) continue;
    if (text == "EOF") break;
    if (text == "NODE_COORD_SECTION") { section = Section::kCoords; continue; }
    if (text == "DEMAND_SECTION") { section = Section::kDemands; continue; }
    if (text == "DEPOT_SECTION") { section = Section::kDepot; continue; }
    const auto colon = text.find(':');
    if (colon != std::string::npos && !std::isdigit(static_cast<unsigned char>(text[0])) &&
        text[0] != '-') {
      const std::string key = trim(text.substr(0, colon));
      const std::string value = trim(text.substr(colon + 1));
      section = Section::kNone;
      if (key == "NAME") inst.name = value;
      else if (key == "DIMENSION") dimension = std::stoi(value);
      else if (key == "CAPACITY") inst.capacity = std::stoi(value);
      else if (key == "VEHICLES") vehicles = vehicles > 0 ? vehicles : std::stoi(value);
      else if (key == "EDGE_WEIGHT_TYPE") {
        if (value != "EUC_2D") throw MtrpParseError(line, "unsupported EDGE_WEIGHT_TYPE " + value);
      } else if (key == "DISTANCE_CONVENTION") {
        if (value == "ROUNDED") inst.round_distances = true;
        else if (value != "EXACT") throw MtrpParseError(line, "unknown DISTANCE_CONVENTION " + value);
      } else if (key == "CAPACITY_CONVENTION") {
        if (value == "ENFORCED") inst.enforce_capacity = true;
        else if (value != "IGNORED") throw MtrpParseError(line, "unknown CAPACITY_CONVENTION " + value);
      } else if (key != "TYPE" && key != "COMMENT") {
        throw MtrpParseError(line, "unknown keyword " + key);
      }
      continue;
    }
    std::istringstream row(text);
    switch (section) {
      case Section::kCoords: {
        int id;
        double x, y;
        if (!(row >> id >> x >> y) || !std::isfinite(x) || !std::isfinite(y))
          throw MtrpParseError(line, "malformed coordinate line");
        coords[id] = {x, y};
        break;
      }
      case Section::kDemands: {
        int id, q;
        if (!(row >> id >> q) || q < 0) throw MtrpParseError(line, "malformed demand line");
        demands[id] = q;
        break;
      }
      case Section::kDepot: {
        int id;
        if (!(row >> id)) throw MtrpParseError(line, "malformed depot line");
        if (id >= 0) depots.push_back(id);
        break;
      }
      case Section::kNone:
        throw MtrpParseError(line, "data outside of a section");
    }
  }
  if (coords.empty()) throw MtrpParseError(line, "missing NODE_COORD_SECTION");
  if (dimension >= 0 && static_cast<int>(coords.size()) != dimension)
    throw MtrpParseError(line, "DIMENSION does not match the coordinate count");
  const int depot = depots.empty() ? coords.begin()->first : depots.front();
  if (!coords.count(depot)) throw MtrpParseError(line, "depot has no coordinates");
  inst.coords.push_back(coords[depot]);
  inst.demands.push_back(0);
  for (const auto& [id, p] : coords) {
    if (id == depot) continue;
    inst.coords.push_back(p);
    const auto it = demands.find(id);
    inst.demands.push_back(it == demands.end() ? (cls == MtrpClass::kLql ? 1 : -1) : it->second);
    if (inst.demands.back() < 0) throw MtrpParseError(line, "node " + std::to_string(id) + " has no demand");
  }
  if (vehicles <= 0) {
    std::smatch m;
    static const std::regex suffix("-k([0-9]+)");
    if (std::regex_search(inst.name, m, suffix)) vehicles = std::stoi(m[1]);
  }
  if (vehicles <= 0) throw MtrpParseError(line, "vehicle count unknown");
  inst.vehicles = vehicles;
  return inst;
}

MtrpInstance read_mtrp(const std::string& path, MtrpClass cls, int vehicles) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_mtrp(in, cls, vehicles);
}

void write_mtrp(std::ostream& out, const MtrpInstance& inst) {
  out << "NAME : " << inst.name << "\n";
  out << "TYPE : " << (inst.capacity > 0 ? "CVRP" : "TSP") << "\n";
  out << "DIMENSION : " << inst.coords.size() << "\n";
  out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
  out << "DISTANCE_CONVENTION : " << (inst.round_distances ? "ROUNDED" : "EXACT") << "\n";
  out << "VEHICLES : " << inst.vehicles << "\n";
  if (inst.capacity > 0) out << "CAPACITY : " << inst.capacity << "\n";
  out << "CAPACITY_CONVENTION : " << (inst.enforce_capacity ? "ENFORCED" : "IGNORED") << "\n";
  out << "NODE_COORD_SECTION\n" << std::setprecision(17);
  for (size_t i = 0; i < inst.coords.size(); ++i)
    out << i + 1 << " " << inst.coords[i].x << " " << inst.coords[i].y << "\n";
  out << "DEMAND_SECTION\n";
  for (size_t i = 0; i < inst.demands.size(); ++i) out << i + 1 << " " << inst.demands[i] << "\n";
  out << "DEPOT_SECTION\n1\n-1\nEOF\n";
}

StopNetwork to_network(const MtrpInstance& inst) {
  const int n = static_cast<int>(inst.coords.size());
  std::vector<double> travel(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = euclidean(inst.coords[i], inst.coords[j]);
      if (inst.round_distances) d = std::round(d);
      travel[static_cast<size_t>(i) * n + j] = d;
    }
  std::vector<double> service(n, 0.0);
  const int total = std::accumulate(inst.demands.begin(), inst.demands.end(), 0);
  const int capacity =
      inst.enforce_capacity && inst.capacity > 0 ? inst.capacity : std::max(1, total);
  return StopNetwork(std::move(travel), std::move(service), inst.demands, capacity, kInf);
}

MtrpBenchRow bench_mtrp(const MtrpInstance& inst, double time_limit) {
  MtrpBenchRow row;
  row.name = inst.name;
  Sf1Options opt;
  opt.time_limit = time_limit;
  auto r = solve_hs(to_network(inst), inst.vehicles, opt);
  row.status = to_string(r.status);
  row.cost = r.cost;
  row.lp_value = r.lp_value;
  row.seconds = r.seconds;
  row.routes = r.enumerated;
  return row;
}

void write_bench_csv(std::ostream& out, const std::vector<MtrpBenchRow>& rows) {
  out << "instance,status,cost,lp_value,time_s,route_number\n";
  for (const auto& r : rows) {
    out << r.name << "," << r.status << ",";
    if (std::isfinite(r.cost)) out << std::fixed << std::setprecision(2) << r.cost;
    else out << "inf";
    out << "," << std::fixed << std::setprecision(2) << r.lp_value << "," << std::setprecision(3)
        << r.seconds << "," << r.routes << "\n";
    out.unsetf(std::ios::fixed);
  }
}

}  // namespace ontime
