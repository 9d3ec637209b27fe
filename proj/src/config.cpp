#include "ontime/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ontime {

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Walks a valid JSON text and records the line each value starts on.
class LineScanner {
 public:
  explicit LineScanner(const std::string& text) : s_(text) {}

  std::map<std::string, int> run() {
    value("");
    return std::move(out_);
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') {
        ++i_;
        if (s_[i_] == 'u') {
          i_ += 4;  // keys with escapes only need to stay distinct
          out += '?';
        } else {
          out += s_[i_];
        }
      } else {
        out += s_[i_];
      }
      ++i_;
    }
    ++i_;
    return out;
  }

  void value(const std::string& pointer) {
    skip();
    out_[pointer] = line_;
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip();
      if (s_[i_] == '}') return void(++i_);
      while (true) {
        skip();
        const std::string key = string();
        skip();
        ++i_;  // colon
        value(pointer + "/" + escape_token(key));
        skip();
        if (s_[i_++] == '}') return;
      }
    } else if (c == '[') {
      ++i_;
      skip();
      if (s_[i_] == ']') return void(++i_);
      for (int k = 0;; ++k) {
        value(pointer + "/" + std::to_string(k));
        skip();
        if (s_[i_++] == ']') return;
      }
    } else if (c == '"') {
      string();
    } else {
      while (i_ < s_.size() && !std::strchr(",}] \t\r\n", s_[i_])) ++i_;
    }
  }

  const std::string& s_;
  size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> out_;
};

int line_at_offset(const std::string& text, size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

}  // namespace

std::map<std::string, int> json_value_lines(const std::string& text) {
  return LineScanner(text).run();
}

RunConfig RunConfig::load(const std::string& path, bool paper_scale) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path, paper_scale);
}

RunConfig RunConfig::parse(const std::string& text, const std::string& path, bool paper_scale) {
  RunConfig c;
  c.path_ = path;
  c.paper_scale_ = paper_scale;
  try {
    c.doc_ = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is one past the offending character.
    throw ConfigError(path, line_at_offset(text, e.byte == 0 ? 0 : e.byte - 1),
                      std::string("malformed JSON: ") + e.what());
  }
  c.lines_ = json_value_lines(text);
  if (!c.doc_.is_object()) c.error("", "top level must be an object");
  if (c.string("/schema", kConfigSchema) != kConfigSchema)
    c.error("/schema", std::string("expected schema \"") + kConfigSchema + "\"");
  if (paper_scale) {
    const Json* patch = c.find("/paper_scale");
    if (!patch) c.error("", "--paper-scale given but the config has no \"paper_scale\" object");
    if (!patch->is_object()) c.error("/paper_scale", "must be an object");
    Json merged = c.doc_;
    merged.merge_patch(*patch);
    c.doc_ = std::move(merged);
  }
  return c;
}

std::string RunConfig::name() const {
  std::string n = string("/name", std::filesystem::path(path_).stem().string());
  return paper_scale_ ? n + "@paper" : n;
}

int RunConfig::line_of(std::string pointer) const {
  while (true) {
    if (paper_scale_)
      if (auto it = lines_.find("/paper_scale" + pointer); it != lines_.end()) return it->second;
    if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
    if (pointer.empty()) return 1;
    pointer.erase(pointer.rfind('/'));
  }
}

void RunConfig::error(const std::string& pointer, const std::string& what) const {
  throw ConfigError(path_, line_of(pointer), (pointer.empty() ? "" : pointer + ": ") + what);
}

const Json* RunConfig::find(const std::string& pointer) const {
  const Json::json_pointer p(pointer);
  return doc_.contains(p) ? &doc_.at(p) : nullptr;
}

const Json& RunConfig::require(const std::string& pointer) const {
  if (const Json* j = find(pointer)) return *j;
  error(pointer, "missing required value");
}

double RunConfig::number(const std::string& pointer, double fallback) const {
  const Json* j = find(pointer);
  if (!j) return fallback;
  try {
    return number_from_json(*j);
  } catch (const std::exception&) {
    error(pointer, "expected a number");
  }
}

int RunConfig::integer(const std::string& pointer, int fallback) const {
  const Json* j = find(pointer);
  if (!j) return fallback;
  if (!j->is_number_integer()) error(pointer, "expected an integer");
  return j->get<int>();
}

bool RunConfig::boolean(const std::string& pointer, bool fallback) const {
  const Json* j = find(pointer);
  if (!j) return fallback;
  if (!j->is_boolean()) error(pointer, "expected true or false");
  return j->get<bool>();
}

std::string RunConfig::string(const std::string& pointer, const std::string& fallback) const {
  const Json* j = find(pointer);
  if (!j) return fallback;
  if (!j->is_string()) error(pointer, "expected a string");
  return j->get<std::string>();
}

std::string RunConfig::resolve(const std::string& relative) const {
  namespace fs = std::filesystem;
  const fs::path p(relative);
  if (p.is_absolute()) return p.string();
  return (fs::path(path_).parent_path() / p).lexically_normal().string();
}

Instance RunConfig::setting() const {
  Instance s;
  auto& h = s.horizon;
  h.num_periods = integer("/horizon/num_periods", h.num_periods);
  if (h.num_periods < 1) error("/horizon/num_periods", "must be >= 1");
  h.period_length = number("/horizon/period_length", h.period_length);
  if (!(h.period_length > 0)) error("/horizon/period_length", "must be > 0");
  h.start_time = number("/horizon/start_time", h.start_time);
  h.prep_time = number("/horizon/prep_time", h.prep_time);
  if (h.prep_time < 0) error("/horizon/prep_time", "must be >= 0");

  auto& f = s.fleet;
  f.fleet_size = integer("/fleet/fleet_size", f.fleet_size);
  if (f.fleet_size < 0) error("/fleet/fleet_size", "must be >= 0");
  f.capacity = integer("/fleet/capacity", f.capacity);
  if (f.capacity < 1) error("/fleet/capacity", "must be >= 1");
  f.max_duration = number("/fleet/max_duration", f.max_duration);
  if (!(f.max_duration > 0)) error("/fleet/max_duration", "must be > 0");
  f.service_time = number("/fleet/service_time", f.service_time);
  if (f.service_time < 0) error("/fleet/service_time", "must be >= 0");
  f.speed_kmh = number("/fleet/speed_kmh", f.speed_kmh);
  if (!(f.speed_kmh > 0)) error("/fleet/speed_kmh", "must be > 0");

  if (const Json* d = find("/depot")) {
    if (!d->is_array() || d->size() != 2) error("/depot", "expected [x, y]");
    s.depot = {number("/depot/0", 0.0), number("/depot/1", 0.0)};
  }
  try {
    s.validate();
  } catch (const std::exception& e) {
    error("/fleet", e.what());
  }
  return s;
}

DemandModel RunConfig::demand() const {
  const int N = setting().horizon.num_periods;
  DemandModel m;
  if (const Json* file = find("/demand_file")) {
    if (!file->is_string()) error("/demand_file", "expected a path");
    try {
      m = demand_from_json(read_json(resolve(file->get<std::string>())));
    } catch (const std::exception& e) {
      error("/demand_file", e.what());
    }
  } else {
    const Json& j = require("/demand");
    if (!j.is_object()) error("/demand", "expected an object");
    const std::string kind = string("/demand/kind", "");
    try {
      parse_demand_kind(kind);
    } catch (const std::exception& e) {
      error("/demand/kind", e.what());
    }
    if (const Json* loc = find("/demand/locations")) {
      if (!loc->is_array()) error("/demand/locations", "expected one count per period");
      for (size_t i = 0; i < loc->size(); ++i) {
        const std::string p = "/demand/locations/" + std::to_string(i);
        if (integer(p, 0) < 0) error(p, "location counts must be >= 0");
      }
    }
    if (!(number("/demand/lambda", 2.0) > 0)) error("/demand/lambda", "must be > 0");
    if (integer("/demand/max_quantity", 20) < 1) error("/demand/max_quantity", "must be >= 1");
    if (!(number("/demand/side_km", 10.0) > 0)) error("/demand/side_km", "must be > 0");
    try {
      m = demand_from_json(j);
    } catch (const std::exception& e) {
      error("/demand", e.what());
    }
  }
  if (m.num_periods() != N)
    error(find("/demand_file") ? "/demand_file" : "/demand",
          "demand has " + std::to_string(m.num_periods()) + " periods, horizon has " + std::to_string(N));
  return m;
}

OracleConfig RunConfig::oracle(std::uint64_t seed, int threads) const {
  OracleConfig c;
  c.seed = seed;
  c.threads = threads;
  c.samples = integer("/oracle/samples", c.samples);
  if (c.samples < 1) error("/oracle/samples", "must be >= 1");
  c.rho_prune = number("/oracle/rho_prune", c.rho_prune);
  if (!(c.rho_prune > 0 && c.rho_prune <= 1)) error("/oracle/rho_prune", "must be in (0, 1]");
  c.max_k = integer("/oracle/max_k", c.max_k);
  c.monotone_repair = boolean("/oracle/monotone_repair", c.monotone_repair);
  return c;
}

SimulationSettings RunConfig::simulation() const {
  SimulationSettings s;
  s.paths = integer("/simulation/paths", s.paths);
  if (s.paths < 1) error("/simulation/paths", "must be >= 1");
  if (const Json* p = find("/simulation/policies")) {
    if (!p->is_array() || p->empty()) error("/simulation/policies", "expected a nonempty list");
    s.policies.clear();
    for (size_t i = 0; i < p->size(); ++i) {
      const std::string ptr = "/simulation/policies/" + std::to_string(i);
      try {
        s.policies.push_back(parse_policy_kind(string(ptr, "")));
      } catch (const std::invalid_argument& e) {
        error(ptr, e.what());
      }
    }
  }
  s.rho = number("/simulation/rho", s.rho);
  if (!(s.rho > 0)) error("/simulation/rho", "must be > 0");
  s.epsilon = number("/simulation/epsilon", s.epsilon);
  if (!(s.epsilon > 0)) error("/simulation/epsilon", "must be > 0");
  return s;
}

SolvePeriodSettings RunConfig::solve_period() const {
  SolvePeriodSettings s;
  require("/solve_period");
  s.instance = resolve(string("/solve_period/instance", ""));
  if (!find("/solve_period/instance")) error("/solve_period/instance", "missing required value");
  s.period = integer("/solve_period/period", s.period);
  if (s.period < 1) error("/solve_period/period", "must be >= 1");
  if (const Json* z = find("/solve_period/status")) {
    if (!z->is_array()) error("/solve_period/status", "expected busy counts for periods n..N");
    for (size_t i = 0; i < z->size(); ++i) {
      const std::string p = "/solve_period/status/" + std::to_string(i);
      s.status.push_back(integer(p, 0));
      if (s.status.back() < 0) error(p, "must be >= 0");
    }
  }
  try {
    s.policy = parse_policy_kind(string("/solve_period/policy", "ajrp"));
  } catch (const std::invalid_argument& e) {
    error("/solve_period/policy", e.what());
  }
  if (find("/solve_period/tables")) s.tables = resolve(string("/solve_period/tables", ""));
  if (s.policy != PolicyKind::kSimpleMyopic && s.tables.empty())
    error("/solve_period", "lookahead policies need \"tables\"");
  return s;
}

std::vector<BenchEntry> RunConfig::bench() const {
  const Json& list = require("/bench/instances");
  if (!list.is_array() || list.empty()) error("/bench/instances", "expected a nonempty list");
  std::vector<BenchEntry> out;
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string p = "/bench/instances/" + std::to_string(i);
    BenchEntry e;
    require(p + "/file");
    e.file = resolve(string(p + "/file", ""));
    try {
      e.cls = parse_mtrp_class(string(p + "/class", "E"));
    } catch (const std::exception& ex) {
      error(p + "/class", ex.what());
    }
    e.vehicles = integer(p + "/vehicles", 0);
    if (e.vehicles < 0) error(p + "/vehicles", "must be >= 0");
    e.round_distances = boolean(p + "/round_distances", false);
    e.enforce_capacity = boolean(p + "/enforce_capacity", false);
    out.push_back(e);
  }
  return out;
}

}  // namespace ontime
