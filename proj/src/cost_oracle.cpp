#include "ontime/cost_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace ontime {

void OracleConfig::validate() const {
  if (samples < 1) throw OracleConfigError("oracle: samples must be >= 1");
  if (!(rho_prune > 0.0 && rho_prune <= 1.0))
    throw OracleConfigError("oracle: pruning parameter must lie in (0, 1]");
  if (threads < 1) throw OracleConfigError("oracle: threads must be >= 1");
}

bool CostTable::usable(int n, int k) const { return std::isfinite(at(n, k)); }

CostTable CostTable::from_values(std::vector<std::vector<double>> values) {
  CostTable t;
  t.max_k = values.empty() ? 0 : static_cast<int>(values[0].size()) - 1;
  for (const auto& row : values) {
    if (static_cast<int>(row.size()) != t.max_k + 1)
      throw std::invalid_argument("cost table rows must have equal length");
    std::vector<double> feasible;
    for (double v : row) feasible.push_back(std::isfinite(v) ? 1.0 : 0.0);
    t.feasible.push_back(std::move(feasible));
    t.total.push_back(1.0);
    t.sample_count.push_back(1);
  }
  t.cost = std::move(values);
  return t;
}

OmegaTable OmegaTable::instant(int periods, int max_k) {
  OmegaTable t;
  t.max_k = max_k;
  for (int m = 1; m <= periods; ++m) {
    std::vector<std::vector<double>> rows(periods - m + 1, std::vector<double>(max_k + 1, 0.0));
    for (int k = 0; k <= max_k; ++k) rows[0][k] = k;
    t.values.push_back(std::move(rows));
  }
  return t;
}

int busy_count(const PlanningHorizon& horizon, int m, int n, const std::vector<double>& durations) {
  int count = 0;
  for (double d : durations) count += busy_through(horizon, m, d) >= n;
  return count;
}

std::vector<double> isotonic_fit(const std::vector<double>& values,
                                 const std::vector<double>& weights, bool decreasing) {
  struct Block {
    double mean, weight;
    int size;
  };
  std::vector<Block> blocks;
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = decreasing ? -values[i] : values[i];
    blocks.push_back({v, std::max(weights[i], 1e-12), 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.mean = (a.mean * a.weight + b.mean * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.size += b.size;
    }
  }
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.size, decreasing ? -b.mean : b.mean);
  return out;
}

namespace {

struct Sample {
  PeriodRealization orders;
  double weight = 1.0;
};

// H^s(k) and the route durations of its optimal solution, k = 0..max_k.
struct SampleSolve {
  std::vector<double> cost;
  std::vector<std::vector<double>> durations;
};

SampleSolve solve_sample(const Instance& setting, const PeriodRealization& orders, int max_k,
                         const Sf1Options& opt) {
  SampleSolve out;
  out.cost.assign(max_k + 1, kInf);
  out.durations.assign(max_k + 1, {});
  const auto net = setting.network(orders);
  const int customers = net.num_customers();
  if (customers == 0) {
    std::fill(out.cost.begin(), out.cost.end(), 0.0);
    return out;
  }
  for (int i = 1; i <= customers; ++i)
    if (!evaluate_route(net, {i})) return out;
  const int lower = std::max(1, (net.total_demand() + net.capacity() - 1) / net.capacity());
  for (int k = lower; k <= std::min(customers, max_k); ++k) {
    auto r = solve_hs(net, k, opt);
    if (r.status == Sf1Status::kInfeasible) continue;
    if (!r.solved())
      throw std::runtime_error("oracle: period " + std::to_string(orders.period) + " sample with " +
                               std::to_string(customers) + " orders left " + to_string(r.status) +
                               " at k = " + std::to_string(k));
    out.cost[k] = r.cost;
    for (const auto& route : r.routes) out.durations[k].push_back(route.metrics.duration);
  }
  for (int k = customers + 1; k <= max_k; ++k) {
    out.cost[k] = out.cost[customers];
    out.durations[k] = out.durations[customers];
  }
  return out;
}

std::vector<SampleSolve> solve_all(const Instance& setting, const std::vector<Sample>& samples,
                                   int max_k, const OracleConfig& cfg) {
  std::vector<SampleSolve> out(samples.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (size_t i = next++; i < samples.size(); i = next++) {
      try {
        out[i] = solve_sample(setting, samples[i].orders, max_k, cfg.sf1);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(cfg.threads, static_cast<int>(samples.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Sample> draw_samples(const DemandModel& model, int n, std::uint64_t stream,
                                 const OracleConfig& cfg) {
  std::vector<Sample> out;
  if (model.kind == DemandKind::kScenarioTree || model.kind == DemandKind::kEmpirical) {
    const auto& options = model.branches.at(n - 1);
    for (const auto& b : options)
      out.push_back({PeriodRealization{n, b.orders},
                     model.kind == DemandKind::kEmpirical ? 1.0 / options.size() : b.probability});
    return out;
  }
  auto rng = make_stream(cfg.seed, stream);
  for (int s = 0; s < cfg.samples; ++s) out.push_back({model.sample(n, rng), 1.0});
  return out;
}

Json config_json(const OracleConfig& cfg, int max_k) {
  return {{"samples", cfg.samples},
          {"rho_prune", cfg.rho_prune},
          {"seed", cfg.seed},
          {"max_k", max_k},
          {"monotone_repair", cfg.monotone_repair}};
}

}  // namespace

CostTables build_tables(const DemandModel& model, const Instance& setting, const OracleConfig& cfg) {
  cfg.validate();
  model.validate();
  const int periods = model.num_periods();
  if (periods != setting.horizon.num_periods)
    throw OracleConfigError("oracle: demand model has " + std::to_string(periods) +
                            " periods, horizon has " + std::to_string(setting.horizon.num_periods));
  const int max_k = cfg.max_k >= 0 ? cfg.max_k : setting.fleet.fleet_size;

  // Stationary laws share one sample set; its solves do not depend on the period.
  std::vector<std::vector<Sample>> samples(periods);
  std::vector<std::vector<SampleSolve>> solves(periods);
  if (model.stationary()) {
    auto shared = draw_samples(model, 1, 0, cfg);
    auto solved = solve_all(setting, shared, max_k, cfg);
    for (int n = 1; n <= periods; ++n) {
      samples[n - 1] = shared;
      solves[n - 1] = solved;
    }
  } else {
    for (int n = 1; n <= periods; ++n) {
      samples[n - 1] = draw_samples(model, n, static_cast<std::uint64_t>(n), cfg);
      solves[n - 1] = solve_all(setting, samples[n - 1], max_k, cfg);
    }
  }

  CostTables out;
  out.cost.max_k = out.omega.max_k = max_k;
  for (int m = 1; m <= periods; ++m) {
    const auto& ss = samples[m - 1];
    const auto& sol = solves[m - 1];
    double total = 0.0;
    for (const auto& s : ss) total += s.weight;
    std::vector<double> cost(max_k + 1, kInf), feasible(max_k + 1, 0.0);
    std::vector<std::vector<double>> omega(periods - m + 1, std::vector<double>(max_k + 1, 0.0));
    for (int k = 0; k <= max_k; ++k) {
      double sum = 0.0;
      std::vector<double> busy(periods - m + 1, 0.0);
      for (size_t s = 0; s < ss.size(); ++s) {
        if (!std::isfinite(sol[s].cost[k])) continue;
        feasible[k] += ss[s].weight;
        sum += ss[s].weight * sol[s].cost[k];
        for (int n = m + 1; n <= periods; ++n)
          busy[n - m] += ss[s].weight * busy_count(setting.horizon, m, n, sol[s].durations[k]);
      }
      omega[0][k] = k;
      if (feasible[k] > 0.0 && feasible[k] >= cfg.rho_prune * total * (1.0 - 1e-12)) {
        cost[k] = sum / feasible[k];
        for (int n = m + 1; n <= periods; ++n) omega[n - m][k] = busy[n - m] / feasible[k];
      }
    }
    if (std::all_of(feasible.begin(), feasible.end(), [](double w) { return w == 0.0; }))
      throw OracleConfigError("oracle: period " + std::to_string(m) +
                              " has no sample that any fleet of up to " + std::to_string(max_k) +
                              " drivers can serve");

    std::vector<int> usable;
    for (int k = 0; k <= max_k; ++k)
      if (std::isfinite(cost[k])) usable.push_back(k);
    auto refit = [&](std::vector<double>& row, bool decreasing) {
      std::vector<double> v, w;
      for (int k : usable) {
        v.push_back(row[k]);
        w.push_back(feasible[k]);
      }
      v = isotonic_fit(v, w, decreasing);
      for (size_t i = 0; i < usable.size(); ++i) row[usable[i]] = v[i];
    };
    if (cfg.monotone_repair) refit(cost, true);
    for (int n = m + 1; n <= periods; ++n) {
      auto& row = omega[n - m];
      if (cfg.monotone_repair) refit(row, false);
      for (int k = 0; k <= max_k; ++k) row[k] = std::min<double>(row[k], k);
      // Unusable entries sit below the usable range; keep the row nondecreasing.
      double right = kInf;
      for (int k = max_k; k >= 0; --k) {
        if (std::isfinite(cost[k])) right = row[k];
        else row[k] = std::min<double>(k, right);
      }
    }
    out.cost.cost.push_back(std::move(cost));
    out.cost.feasible.push_back(std::move(feasible));
    out.cost.total.push_back(total);
    out.cost.sample_count.push_back(static_cast<int>(ss.size()));
    out.omega.values.push_back(std::move(omega));
  }
  Json setting_json = to_json(setting);
  setting_json.erase("realizations");
  out.provenance = {{"config", config_json(cfg, max_k)},
                    {"model", to_json(model)},
                    {"setting", std::move(setting_json)}};
  return out;
}

Json to_json(const CostTables& t) {
  Json periods = Json::array();
  for (int n = 1; n <= t.cost.num_periods(); ++n) {
    Json cost = Json::array();
    for (double v : t.cost.cost[n - 1]) cost.push_back(number_to_json(v));
    periods.push_back({{"period", n},
                       {"samples", t.cost.sample_count[n - 1]},
                       {"total_weight", t.cost.total[n - 1]},
                       {"feasible_weight", t.cost.feasible[n - 1]},
                       {"cost", std::move(cost)},
                       {"omega", t.omega.values.at(n - 1)}});
  }
  return {{"schema", "ontime.tables/1"},
          {"version", version_string()},
          {"config_hash", config_hash(t.provenance)},
          {"provenance", t.provenance},
          {"max_k", t.cost.max_k},
          {"periods", std::move(periods)}};
}

CostTables tables_from_json(const Json& j) {
  if (j.value("schema", std::string()) != "ontime.tables/1")
    throw std::invalid_argument("tables: schema must be \"ontime.tables/1\"");
  CostTables t;
  t.provenance = j.value("provenance", Json::object());
  t.cost.max_k = t.omega.max_k = j.at("max_k").get<int>();
  for (const auto& p : j.at("periods")) {
    std::vector<double> cost;
    for (const auto& v : p.at("cost")) cost.push_back(number_from_json(v));
    if (static_cast<int>(cost.size()) != t.cost.max_k + 1)
      throw std::invalid_argument("tables: cost row length differs from max_k + 1");
    t.cost.cost.push_back(std::move(cost));
    t.cost.sample_count.push_back(p.at("samples").get<int>());
    t.cost.total.push_back(p.at("total_weight").get<double>());
    t.cost.feasible.push_back(p.at("feasible_weight").get<std::vector<double>>());
    t.omega.values.push_back(p.at("omega").get<std::vector<std::vector<double>>>());
  }
  return t;
}

void write_tables(const std::string& path, const CostTables& t) { write_json(path, to_json(t)); }

CostTables read_tables(const std::string& path) { return tables_from_json(read_json(path)); }

}  // namespace ontime
