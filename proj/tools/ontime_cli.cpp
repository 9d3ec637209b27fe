#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "ontime/ajrp.hpp"
#include "ontime/config.hpp"
#include "ontime/cost_oracle.hpp"
#include "ontime/io.hpp"
#include "ontime/mtrp.hpp"
#include "ontime/policy.hpp"
#include "ontime/simulation.hpp"
#include "suite.hpp"

namespace fs = std::filesystem;
using namespace ontime;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  double time_limit = 600.0;
  std::string out = "out";
  int threads = 1;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config, bool stochastic) {
  auto* opt = cmd->add_option("--config", c.config, "run configuration (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  auto* seed = cmd->add_option("--seed", c.seed, "random seed");
  if (stochastic) seed->required();
  cmd->add_option("--time-limit", c.time_limit, "seconds per solve")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1, 1024));
  cmd->add_flag("--paper-scale", c.paper_scale, "apply the config's paper_scale overrides");
}

std::string out_file(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / name).string();
}

Json run_header(const RunConfig& cfg, const Common& c, const char* command) {
  Json h;
  h["command"] = command;
  h["config_name"] = cfg.name();
  h["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  h["paper_scale"] = c.paper_scale;
  h["config"] = cfg.json();
  return h;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

Sf1Options sf1_options(const Common& c) {
  Sf1Options o;
  o.time_limit = c.time_limit;
  return o;
}

CostTables estimate_tables(const RunConfig& cfg, const Common& c) {
  auto oc = cfg.oracle(*c.seed, c.threads);
  oc.sf1 = sf1_options(c);
  return build_tables(cfg.demand(), cfg.setting(), oc);
}

int cmd_estimate(const Common& c) {
  const auto cfg = RunConfig::load(c.config, c.paper_scale);
  auto tables = estimate_tables(cfg, c);
  tables.provenance["run"] = run_header(cfg, c, "estimate");
  const auto path = out_file(c, "tables.json");
  write_tables(path, tables);
  std::cout << "wrote " << path << "\n";
  try {
    std::cout << "occupancy fleet " << occupancy_fleet(tables) << "\n";
  } catch (const std::invalid_argument&) {
    std::cout << "occupancy fleet undefined: a period has no usable k\n";
  }
  return 0;
}

int cmd_simulate(const Common& c, std::optional<int> paths_override, const std::string& tables_path) {
  const auto cfg = RunConfig::load(c.config, c.paper_scale);
  const auto setting = cfg.setting();
  const auto model = cfg.demand();
  const auto sim = cfg.simulation();
  const int count = paths_override.value_or(sim.paths);
  if (count < 1) throw CLI::ValidationError("--paths", "must be >= 1");

  CostTables tables;
  if (!tables_path.empty()) {
    tables = read_tables(tables_path);
  } else {
    tables = estimate_tables(cfg, c);
    tables.provenance["run"] = run_header(cfg, c, "simulate");
    write_tables(out_file(c, "tables.json"), tables);
  }
  std::vector<NamedPolicy> policies;
  for (auto kind : sim.policies) {
    NamedPolicy p;
    p.config.kind = kind;
    p.config.rho = sim.rho;
    p.config.tables = &tables;
    p.config.sf1 = sf1_options(c);
    p.config.ajrp.epsilon = sim.epsilon;
    p.config.ajrp.time_limit = c.time_limit;
    policies.push_back(p);
  }
  // Paths use the next seed so they stay independent of the table samples.
  const auto paths = generate_paths(model, count, *c.seed + 1);
  Json run = run_header(cfg, c, "simulate");
  run["tables_hash"] = config_hash(to_json(tables));
  run["paths"] = count;
  const auto report = run_simulation(policies, setting, paths, c.threads, run);

  std::ostringstream csv;
  write_report_csv(csv, report);
  write_text(out_file(c, "report.csv"), csv.str());
  const auto summary = summary_json(report);
  write_json(out_file(c, "summary.json"), summary);
  for (const auto& p : summary["policies"])
    std::cout << p["name"].get<std::string>() << " mean cost " << p["mean_cost"].dump() << "\n";
  for (const auto& cmp : report.comparisons)
    std::cout << cmp.challenger << " over " << cmp.baseline << ": mean " << cmp.mean << " CI95 ["
              << cmp.ci_low << ", " << cmp.ci_high << "] p " << cmp.p_greater << "\n";
  return 0;
}

Json route_json(const Route& r) {
  return {{"stops", r.stops},
          {"arrivals", r.arrivals},
          {"duration", r.duration},
          {"cost", r.cost},
          {"load", r.load},
          {"busy_last", r.busy_last},
          {"third_party", r.third_party}};
}

int cmd_solve_period(const Common& c) {
  const auto cfg = RunConfig::load(c.config, c.paper_scale);
  const auto sp = cfg.solve_period();
  const auto inst = read_instance(sp.instance);
  const int N = inst.horizon.num_periods;
  if (sp.period > N) cfg.error("/solve_period/period", "beyond the instance horizon");
  if (static_cast<int>(inst.realizations.size()) < sp.period)
    cfg.error("/solve_period/instance", "no realization for period " + std::to_string(sp.period));
  auto status = DriverStatus::idle(sp.period, N);
  if (!sp.status.empty()) {
    if (static_cast<int>(sp.status.size()) != N - sp.period + 1)
      cfg.error("/solve_period/status", "expected " + std::to_string(N - sp.period + 1) + " counts");
    status.busy = sp.status;
  }
  CostTables tables;
  PolicyConfig pc;
  pc.kind = sp.policy;
  pc.sf1 = sf1_options(c);
  pc.ajrp.time_limit = c.time_limit;
  if (!sp.tables.empty()) {
    tables = read_tables(sp.tables);
    pc.tables = &tables;
  }
  const auto& orders = inst.realizations[sp.period - 1];
  const auto d = policy_step(pc, inst, orders, status);

  Json out;
  out["schema"] = "ontime.decision/1";
  out["version"] = version_string();
  Json run = run_header(cfg, c, "solve-period");
  out["config_hash"] = config_hash(run);
  out["policy"] = to_string(sp.policy);
  out["period"] = sp.period;
  out["status"] = status.busy;
  out["arrival_cost"] = d.arrival_cost;
  out["hiring_cost"] = d.hiring_cost;
  out["recourse"] = d.recourse;
  out["plan"] = d.plan;
  out["routes"] = Json::array();
  for (const auto& r : d.routes) out["routes"].push_back(route_json(r));
  if (sp.policy == PolicyKind::kAjrp) {
    const LookaheadContext ctx{inst.horizon, inst.fleet.fleet_size, &tables};
    auto opt = pc.ajrp;
    opt.sf1 = pc.sf1;
    const auto r = ajrp_step(inst.network(orders), sp.period, status, ctx, opt);
    out["benders"] = {{"status", to_string(r.status)},
                      {"lb", number_to_json(r.lb)},
                      {"ub", number_to_json(r.ub)},
                      {"iterations", r.iterations}};
    std::ofstream trace(out_file(c, "trace.csv"));
    write_trace_csv(trace, r.trace);
  }
  write_json(out_file(c, "decision.json"), out);
  std::cout << "period " << sp.period << ": " << d.routes.size() << " routes, cost " << d.cost() << "\n";
  return 0;
}

int cmd_bench(const Common& c) {
  const auto cfg = RunConfig::load(c.config, c.paper_scale);
  const auto entries = cfg.bench();
  for (const auto& e : entries) verify_checksum(e.file);  // refuse the whole run up front
  std::vector<MtrpBenchRow> rows;
  for (const auto& e : entries) {
    auto inst = read_mtrp(e.file, e.cls, e.vehicles);
    inst.round_distances = e.round_distances;
    inst.enforce_capacity = e.enforce_capacity;
    rows.push_back(bench_mtrp(inst, c.time_limit));
    std::cout << rows.back().name << " " << rows.back().status << " " << rows.back().cost << " ("
              << rows.back().seconds << " s)\n";
  }
  std::ostringstream csv;
  csv << "# schema=ontime.bench/1 version=" << version_string()
      << " config_hash=" << config_hash(run_header(cfg, c, "bench-mtrp")) << "\n";
  write_bench_csv(csv, rows);
  write_text(out_file(c, "bench.csv"), csv.str());
  return 0;
}

int cmd_oracle_check(const Common& c) {
  oracle::SuiteOptions opt;
  opt.seed = *c.seed;
  const auto checks = oracle::run_suite(opt);
  Json out;
  out["schema"] = "ontime.oracle_check/1";
  out["version"] = version_string();
  out["config_hash"] = config_hash({{"seed", opt.seed},
                                    {"sf1", opt.sf1},
                                    {"pricing", opt.pricing},
                                    {"benders", opt.benders},
                                    {"two_period", opt.two_period}});
  out["checks"] = Json::array();
  bool ok = true;
  for (const auto& [r, required] : checks) {
    const bool pass = r.passed(required);
    ok &= pass;
    std::cout << (pass ? "PASS " : "FAIL ") << r.name << " cases=" << r.cases << " failures=" << r.failures
              << (r.detail.empty() ? "" : " first: " + r.detail) << "\n";
    out["checks"].push_back({{"name", r.name},
                             {"cases", r.cases},
                             {"required", required},
                             {"failures", r.failures},
                             {"passed", pass},
                             {"detail", r.detail}});
  }
  write_json(out_file(c, "oracle_check.json"), out);
  return ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiperiod on-time dispatch and routing workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  Common estimate, simulate, solve, bench, check;
  std::optional<int> paths;
  std::string tables;
  auto* c_est = app.add_subcommand("estimate", "build single-period cost tables");
  add_common(c_est, estimate, true, true);
  auto* c_sim = app.add_subcommand("simulate", "roll policies over sampled demand paths");
  add_common(c_sim, simulate, true, true);
  c_sim->add_option("--paths", paths, "override the configured path count");
  c_sim->add_option("--tables", tables, "prebuilt tables instead of estimating")->check(CLI::ExistingFile);
  auto* c_solve = app.add_subcommand("solve-period", "one policy decision on a fixed instance");
  add_common(c_solve, solve, true, false);
  auto* c_bench = app.add_subcommand("bench-mtrp", "solve checksummed repairman benchmarks");
  add_common(c_bench, bench, true, false);
  auto* c_check = app.add_subcommand("oracle-check", "compare solvers with brute-force oracles");
  add_common(c_check, check, false, true);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*c_est) return cmd_estimate(estimate);
    if (*c_sim) return cmd_simulate(simulate, paths, tables);
    if (*c_solve) return cmd_solve_period(solve);
    if (*c_bench) return cmd_bench(bench);
    if (*c_check) return cmd_oracle_check(check);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
