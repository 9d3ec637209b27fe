#include "ontime/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace ontime {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ';';
    if constexpr (std::is_floating_point_v<T>) s += fmt(xs[i]);
    else s += std::to_string(xs[i]);
  }
  return s;
}

PathRecord simulate_path(const NamedPolicy& policy, const Instance& setting, const SamplePath& path,
                         int index) {
  const int N = setting.horizon.num_periods;
  PathRecord rec;
  rec.path = index;
  rec.policy = policy.name;
  rec.dispatched.assign(N, 0);
  rec.hired.assign(N, 0);
  for (const auto& p : path) rec.orders += static_cast<int>(p.orders.size());
  auto status = DriverStatus::idle(1, N);
  int n = 1;
  try {
    if (static_cast<int>(path.size()) != N) throw std::invalid_argument("path length differs from N");
    for (; n <= N; ++n) {
      const auto& orders = path[n - 1];
      if (orders.period != n) throw std::invalid_argument("realization out of order");
      const auto d = policy_step(policy.config, setting, orders, status);
      rec.arrival += d.arrival_cost;
      rec.hiring += d.hiring_cost;
      rec.recourse_periods += d.recourse ? 1 : 0;
      for (const auto& r : d.routes) {
        (r.third_party ? rec.hired : rec.dispatched)[n - 1] += 1;
        rec.durations.push_back(r.duration);
        rec.covered += static_cast<int>(r.stops.size());
      }
      if (n < N) status = transition(setting.horizon, setting.fleet.fleet_size, status, d.routes, n);
    }
  } catch (const std::exception& e) {
    rec.error = "period " + std::to_string(n) + ": " + e.what();
  }
  rec.total = rec.arrival + rec.hiring;
  return rec;
}

}  // namespace

PairedStats paired_stats(const std::vector<double>& diffs) {
  PairedStats s;
  s.n = static_cast<int>(diffs.size());
  if (s.n == 0) {
    s.mean = s.sd = s.ci_low = s.ci_high = std::nan("");
    return s;
  }
  for (double d : diffs) s.mean += d;
  s.mean /= s.n;
  double ss = 0.0;
  for (double d : diffs) ss += (d - s.mean) * (d - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;
  const double se = s.sd / std::sqrt(static_cast<double>(s.n));
  s.ci_low = s.mean - kZ95 * se;
  s.ci_high = s.mean + kZ95 * se;
  if (se > 0.0) {
    const double z = s.mean / se;
    s.p_greater = 0.5 * std::erfc(z / std::sqrt(2.0));
    s.p_less = 0.5 * std::erfc(-z / std::sqrt(2.0));
  } else {
    // Degenerate sample: the sign of the mean decides.
    s.p_greater = s.mean > 0.0 ? 0.0 : 1.0;
    s.p_less = s.mean < 0.0 ? 0.0 : 1.0;
  }
  return s;
}

const PairedComparison* SimulationReport::compare(const std::string& baseline,
                                                  const std::string& challenger) const {
  for (const auto& c : comparisons)
    if (c.baseline == baseline && c.challenger == challenger) return &c;
  return nullptr;
}

PairedComparison compare_policies(const SimulationReport& report, int baseline, int challenger) {
  PairedComparison c;
  c.baseline = report.policies.at(baseline);
  c.challenger = report.policies.at(challenger);
  std::vector<double> diffs;
  for (int p = 0; p < report.num_paths; ++p) {
    const auto& a = report.record(p, baseline);
    const auto& b = report.record(p, challenger);
    if (!a.ok() || !b.ok()) {
      ++c.failed;
    } else if (a.total <= 0.0) {
      ++c.undefined;
    } else {
      diffs.push_back((a.total - b.total) / a.total);
    }
  }
  const auto s = paired_stats(diffs);
  c.paths = s.n;
  c.mean = s.mean;
  c.sd = s.sd;
  c.ci_low = s.ci_low;
  c.ci_high = s.ci_high;
  c.p_greater = s.p_greater;
  c.p_less = s.p_less;
  return c;
}

SimulationReport run_simulation(const std::vector<NamedPolicy>& policies, const Instance& setting,
                                const std::vector<SamplePath>& paths, int threads, Json config) {
  setting.validate();
  if (policies.empty()) throw std::invalid_argument("simulation: no policies");
  std::map<std::string, int> seen;
  SimulationReport report;
  report.num_paths = static_cast<int>(paths.size());
  for (const auto& p : policies) {
    p.config.validate();
    std::string name = p.name.empty() ? to_string(p.config.kind) : p.name;
    if (int k = seen[name]++; k > 0) name += "_" + std::to_string(k + 1);
    report.policies.push_back(name);
  }
  std::vector<NamedPolicy> named = policies;
  for (size_t i = 0; i < named.size(); ++i) named[i].name = report.policies[i];

  const size_t jobs = paths.size() * named.size();
  report.records.resize(jobs);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t j; (j = next++) < jobs;) {
      const size_t path = j / named.size(), pol = j % named.size();
      report.records[j] = simulate_path(named[pol], setting, paths[path], static_cast<int>(path));
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (size_t pol = 0; pol < named.size(); ++pol) {
    double sum = 0.0;
    int count = 0;
    for (int p = 0; p < report.num_paths; ++p)
      if (const auto& r = report.record(p, static_cast<int>(pol)); r.ok()) sum += r.total, ++count;
    report.mean_cost.push_back(count ? sum / count : std::nan(""));
  }
  for (int a = 0; a < static_cast<int>(named.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(named.size()); ++b)
      report.comparisons.push_back(compare_policies(report, a, b));

  config["paths"] = report.num_paths;
  config["setting"] = to_json(Instance{setting.horizon, setting.fleet, setting.depot, {}, {}});
  Json pols = Json::array();
  for (size_t i = 0; i < named.size(); ++i) {
    const auto& c = named[i].config;
    pols.push_back({{"name", named[i].name},
                    {"kind", to_string(c.kind)},
                    {"rho", c.rho},
                    {"epsilon", c.ajrp.epsilon},
                    {"tables", c.tables ? config_hash(to_json(*c.tables)) : "none"}});
  }
  config["policies"] = pols;
  report.config = std::move(config);
  return report;
}

void write_report_csv(std::ostream& out, const SimulationReport& report) {
  out << "# schema=" << kReportSchema << " version=" << version_string()
      << " config_hash=" << config_hash(report.config) << "\n";
  out << "path,policy,total,arrival,hiring,orders,covered,recourse_periods,dispatched,hired,"
         "durations,error\n";
  for (const auto& r : report.records) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.path << ',' << r.policy << ',' << fmt(r.total) << ',' << fmt(r.arrival) << ','
        << fmt(r.hiring) << ',' << r.orders << ',' << r.covered << ',' << r.recourse_periods << ','
        << join(r.dispatched) << ',' << join(r.hired) << ',' << join(r.durations) << ',' << err
        << "\n";
  }
}

Json summary_json(const SimulationReport& report) {
  auto num = [](double v) { return std::isnan(v) ? Json("NA") : number_to_json(v); };
  Json j;
  j["schema"] = kReportSchema;
  j["version"] = version_string();
  j["config_hash"] = config_hash(report.config);
  j["config"] = report.config;
  j["paths"] = report.num_paths;
  Json pols = Json::array();
  for (size_t i = 0; i < report.policies.size(); ++i) {
    int failed = 0, recourse = 0;
    for (int p = 0; p < report.num_paths; ++p) {
      const auto& r = report.record(p, static_cast<int>(i));
      failed += r.ok() ? 0 : 1;
      recourse += r.recourse_periods;
    }
    pols.push_back({{"name", report.policies[i]},
                    {"mean_cost", num(report.mean_cost[i])},
                    {"failed_paths", failed},
                    {"recourse_periods", recourse}});
  }
  j["policies"] = pols;
  Json cmp = Json::array();
  for (const auto& c : report.comparisons) {
    cmp.push_back({{"baseline", c.baseline},
                   {"challenger", c.challenger},
                   {"paths", c.paths},
                   {"undefined", c.undefined},
                   {"failed", c.failed},
                   {"mean_improvement", num(c.mean)},
                   {"sd", num(c.sd)},
                   {"ci95", Json::array({num(c.ci_low), num(c.ci_high)})},
                   {"p_greater", c.p_greater},
                   {"p_less", c.p_less}});
  }
  j["comparisons"] = cmp;
  return j;
}

FleetScenarios fleet_scenarios(const std::vector<int>& min_k, int peak_locations) {
  if (peak_locations < 0) throw std::invalid_argument("fleet_scenarios: negative peak");
  FleetScenarios f;
  for (int k : min_k) f.small = std::max(f.small, k);
  f.medium = f.small + (peak_locations + 3) / 4;
  f.large = f.small + (peak_locations + 1) / 2;
  return f;
}

int occupancy_fleet(const CostTables& tables) {
  const int N = tables.cost.num_periods();
  std::vector<int> k_min(N + 1, 0);
  for (int m = 1; m <= N; ++m) {
    while (k_min[m] <= tables.cost.max_k && !tables.cost.usable(m, k_min[m])) ++k_min[m];
    if (k_min[m] > tables.cost.max_k)
      throw std::invalid_argument("occupancy_fleet: period " + std::to_string(m) + " has no usable k");
  }
  double worst = 0.0;
  for (int n = 1; n <= N; ++n) {
    double busy = 0.0;
    for (int m = 1; m <= n; ++m) busy += tables.omega.at(m, n, k_min[m]);
    worst = std::max(worst, busy);
  }
  return static_cast<int>(std::ceil(worst - 1e-9));
}

std::vector<int> pilot_min_k(const DemandModel& model, const Instance& setting, int samples,
                             std::uint64_t seed, const Sf1Options& sf1) {
  if (samples < 1) throw std::invalid_argument("pilot_min_k: samples must be >= 1");
  const int N = model.num_periods();
  std::vector<int> out(N, 0);
  for (int n = 1; n <= N; ++n) {
    if (model.finite()) {
      for (const auto& b : model.outcomes(n))
        if (b.probability > 0.0)
          out[n - 1] = std::max(out[n - 1],
                                minimal_feasible_k(setting.network({n, b.orders}), sf1));
      continue;
    }
    auto rng = make_stream(seed, static_cast<std::uint64_t>(n));
    for (int s = 0; s < samples; ++s)
      out[n - 1] = std::max(out[n - 1], minimal_feasible_k(setting.network(model.sample(n, rng)), sf1));
  }
  return out;
}

}  // namespace ontime
