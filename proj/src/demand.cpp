#include "ontime/demand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ontime {

const char* to_string(DemandKind k) {
  switch (k) {
    case DemandKind::kStationary: return "stationary";
    case DemandKind::kSinglePeak: return "nonstationary_single_peak";
    case DemandKind::kDoublePeak: return "nonstationary_double_peak";
    case DemandKind::kEmpirical: return "empirical";
    case DemandKind::kScenarioTree: return "scenario_tree";
  }
  return "?";
}

DemandKind parse_demand_kind(const std::string& s) {
  for (auto k : {DemandKind::kStationary, DemandKind::kSinglePeak, DemandKind::kDoublePeak,
                 DemandKind::kEmpirical, DemandKind::kScenarioTree})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown demand kind '" + s + "'");
}

int DemandModel::num_periods() const {
  if (kind == DemandKind::kEmpirical || kind == DemandKind::kScenarioTree)
    return static_cast<int>(branches.size());
  return static_cast<int>(locations.size());
}

bool DemandModel::stationary() const {
  if (kind == DemandKind::kEmpirical || kind == DemandKind::kScenarioTree) return false;
  return std::adjacent_find(locations.begin(), locations.end(), std::not_equal_to<>()) ==
         locations.end();
}

int DemandModel::peak_locations() const {
  int peak = 0;
  if (kind == DemandKind::kEmpirical || kind == DemandKind::kScenarioTree) {
    for (const auto& period : branches)
      for (const auto& b : period) peak = std::max(peak, static_cast<int>(b.orders.size()));
    return peak;
  }
  for (int i : locations) peak = std::max(peak, i);
  return peak;
}

int sample_quantity(double lambda, int max_quantity, std::mt19937_64& rng) {
  std::poisson_distribution<int> draw(lambda);
  while (true) {
    const int q = draw(rng);
    if (q >= 1 && q <= max_quantity) return q;
  }
}

PeriodRealization DemandModel::sample(int period, std::mt19937_64& rng) const {
  if (period < 1 || period > num_periods()) throw std::out_of_range("demand: period out of range");
  PeriodRealization r;
  r.period = period;
  if (kind == DemandKind::kEmpirical || kind == DemandKind::kScenarioTree) {
    const auto& options = branches[period - 1];
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double draw = u(rng), acc = 0.0;
    for (const auto& b : options) {
      acc += kind == DemandKind::kEmpirical ? 1.0 / options.size() : b.probability;
      if (draw < acc || &b == &options.back()) {
        r.orders = b.orders;
        break;
      }
    }
    return r;
  }
  std::uniform_real_distribution<double> coord(0.0, side_km);
  for (int i = 0; i < locations[period - 1]; ++i) {
    Order o;
    o.position.x = coord(rng);
    o.position.y = coord(rng);
    o.quantity = sample_quantity(lambda, max_quantity, rng);
    r.orders.push_back(o);
  }
  return r;
}

std::vector<DemandBranch> DemandModel::outcomes(int period) const {
  if (!finite()) throw std::logic_error("demand: outcomes need a scenario tree");
  return branches.at(period - 1);
}

void DemandModel::validate() const {
  if (num_periods() < 1) throw std::invalid_argument("demand: at least one period required");
  if (!(lambda > 0.0)) throw std::invalid_argument("demand: lambda must be > 0");
  if (max_quantity < 1) throw std::invalid_argument("demand: max_quantity must be >= 1");
  for (int i : locations)
    if (i < 0) throw std::invalid_argument("demand: location counts must be >= 0");
  for (const auto& period : branches) {
    if (period.empty()) throw std::invalid_argument("demand: a period has no outcomes");
    double total = 0.0;
    for (const auto& b : period) {
      if (b.probability < 0.0) throw std::invalid_argument("demand: negative probability");
      total += b.probability;
      for (const auto& o : b.orders)
        if (o.quantity < 1 || o.quantity > max_quantity)
          throw std::invalid_argument("demand: quantity outside [1, max_quantity]");
    }
    if (kind == DemandKind::kScenarioTree && std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("demand: outcome probabilities must sum to 1");
  }
}

DemandModel DemandModel::stationary_model(int periods, int locations, int max_quantity,
                                          double lambda) {
  DemandModel m;
  m.kind = DemandKind::kStationary;
  m.locations.assign(periods, locations);
  m.max_quantity = max_quantity;
  m.lambda = lambda;
  return m;
}

namespace {

std::vector<int> tent(int periods, int low, int high) {
  std::vector<int> out(periods, low);
  const int half = (periods + 1) / 2;
  for (int n = 1; n <= half; ++n) {
    const double frac = half > 1 ? static_cast<double>(n - 1) / (half - 1) : 1.0;
    out[n - 1] = static_cast<int>(std::lround(low + (high - low) * frac));
    out[periods - n] = out[n - 1];
  }
  return out;
}

}  // namespace

DemandModel DemandModel::single_peak(int periods, int low, int high, int max_quantity,
                                     double lambda) {
  auto m = stationary_model(periods, low, max_quantity, lambda);
  m.kind = DemandKind::kSinglePeak;
  m.locations = tent(periods, low, high);
  return m;
}

DemandModel DemandModel::double_peak(int periods, int low, int high, int max_quantity,
                                     double lambda) {
  auto m = stationary_model(periods, low, max_quantity, lambda);
  m.kind = DemandKind::kDoublePeak;
  const int first = periods / 2;
  m.locations = tent(first, low, high);
  auto second = tent(periods - first, low, high);
  m.locations.insert(m.locations.end(), second.begin(), second.end());
  return m;
}

DemandModel DemandModel::empty(int periods) { return stationary_model(periods, 0); }

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<SamplePath> generate_paths(const DemandModel& model, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("generate_paths: count must be >= 1");
  std::vector<SamplePath> paths;
  for (int p = 0; p < count; ++p) {
    auto rng = make_stream(seed, static_cast<std::uint64_t>(p));
    SamplePath path;
    for (int n = 1; n <= model.num_periods(); ++n) path.push_back(model.sample(n, rng));
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<WeightedPath> enumerate_paths(const DemandModel& model) {
  std::vector<WeightedPath> out{WeightedPath{}};
  for (int n = 1; n <= model.num_periods(); ++n) {
    std::vector<WeightedPath> next;
    for (const auto& prefix : out)
      for (const auto& b : model.outcomes(n)) {
        WeightedPath w = prefix;
        w.probability *= b.probability;
        w.path.push_back(PeriodRealization{n, b.orders});
        next.push_back(std::move(w));
      }
    out = std::move(next);
  }
  return out;
}

Json to_json(const DemandModel& m) {
  Json j = {{"kind", to_string(m.kind)},
            {"side_km", m.side_km},
            {"lambda", m.lambda},
            {"max_quantity", m.max_quantity}};
  if (!m.locations.empty()) j["locations"] = m.locations;
  if (!m.branches.empty()) {
    Json periods = Json::array();
    for (size_t n = 0; n < m.branches.size(); ++n) {
      Json outs = Json::array();
      for (const auto& b : m.branches[n]) {
        PeriodRealization r{static_cast<int>(n) + 1, b.orders};
        outs.push_back({{"probability", b.probability}, {"orders", to_json(r)["orders"]}});
      }
      periods.push_back(std::move(outs));
    }
    j["branches"] = std::move(periods);
  }
  return j;
}

DemandModel demand_from_json(const Json& j) {
  DemandModel m;
  m.kind = parse_demand_kind(j.at("kind").get<std::string>());
  m.side_km = j.value("side_km", m.side_km);
  m.lambda = j.value("lambda", m.lambda);
  m.max_quantity = j.value("max_quantity", m.max_quantity);
  if (j.contains("locations")) m.locations = j["locations"].get<std::vector<int>>();
  if (j.contains("branches")) {
    int n = 0;
    for (const auto& period : j["branches"]) {
      ++n;
      std::vector<DemandBranch> outs;
      for (const auto& b : period) {
        DemandBranch d;
        d.probability = b.value("probability", 1.0);
        d.orders = realization_from_json({{"period", n}, {"orders", b.at("orders")}}).orders;
        outs.push_back(std::move(d));
      }
      m.branches.push_back(std::move(outs));
    }
  }
  m.validate();
  return m;
}

}  // namespace ontime
