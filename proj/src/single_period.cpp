#include "ontime/single_period.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace ontime {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct MasterRows {
  int customers = 0;
  int fleet = 0;
  int first_future = 0;
  int futures = 0;
};

MasterRows add_rows(LinearProgram& lp, const SinglePeriodProblem& p, RowSense cover) {
  MasterRows r;
  r.customers = p.net.num_customers();
  for (int i = 1; i <= r.customers; ++i) lp.add_row(cover, 1.0);
  r.fleet = lp.add_row(RowSense::kLessEqual, p.fleet_cap);
  r.first_future = lp.num_rows();
  r.futures = static_cast<int>(p.future_caps.size());
  for (int cap : p.future_caps) lp.add_row(RowSense::kLessEqual, cap);
  return r;
}

SparseVec route_column(const SinglePeriodProblem& p, const MasterRows& rows, const PricedRoute& r) {
  SparseVec col;
  for (int s : r.stops) col.emplace_back(s - 1, 1.0);
  if (r.third_party) return col;
  col.emplace_back(rows.fleet, 1.0);
  for (int q = p.period + 1; q <= r.busy_last && q - p.period - 1 < rows.futures; ++q)
    col.emplace_back(rows.first_future + q - p.period - 1, 1.0);
  return col;
}

Duals read_duals(const MasterRows& rows, const std::vector<double>& y) {
  Duals d;
  d.nu.assign(rows.customers + 1, 0.0);
  for (int i = 1; i <= rows.customers; ++i) d.nu[i] = y[i - 1];
  d.mu_now = y[rows.fleet];
  for (int k = 0; k < rows.futures; ++k) d.mu_future.push_back(y[rows.first_future + k]);
  return d;
}

}  // namespace

SinglePeriodProblem SinglePeriodProblem::uncapped_future(StopNetwork net, int fleet_cap) {
  SinglePeriodProblem p;
  p.net = std::move(net);
  p.horizon.num_periods = 1;
  p.fleet_cap = fleet_cap;
  return p;
}

const char* to_string(CgStatus s) {
  switch (s) {
    case CgStatus::kOptimal: return "optimal";
    case CgStatus::kInfeasible: return "infeasible";
    case CgStatus::kIterationLimit: return "iteration_limit";
    case CgStatus::kOverflow: return "label_overflow";
  }
  return "?";
}

const char* to_string(Sf1Status s) {
  switch (s) {
    case Sf1Status::kOptimal: return "optimal";
    case Sf1Status::kInfeasible: return "infeasible";
    case Sf1Status::kTimeLimit: return "time_limit";
    case Sf1Status::kUnsolved: return "unsolved";
  }
  return "?";
}

ColumnGenerationResult column_generation(const SinglePeriodProblem& problem,
                                         const ColumnGenerationOptions& opt) {
  ColumnGenerationResult out;
  const auto& net = problem.net;
  LinearProgram lp;
  const MasterRows rows = add_rows(lp, problem, RowSense::kGreaterEqual);
  // Capacity alone rules out the fleet: nu_i = q_i / Q, mu = -1 is a ray.
  if (!problem.third_party &&
      static_cast<long>(problem.fleet_cap) * net.capacity() < net.total_demand()) {
    out.status = CgStatus::kInfeasible;
    out.value = kInf;
    out.duals = Duals::zero(net, rows.futures);
    for (int i = 1; i <= rows.customers; ++i)
      out.duals.nu[i] = static_cast<double>(net.demand(i)) / net.capacity();
    out.duals.mu_now = -1.0;
    return out;
  }
  std::vector<int> artificials;
  for (int i = 0; i < rows.customers; ++i)
    artificials.push_back(lp.add_column(opt.artificial_cost, 0.0, kInf, {{i, 1.0}}));
  const int first_route = lp.num_cols();

  std::set<std::pair<bool, std::vector<int>>> seen;
  auto add = [&](PricedRoute r) {
    if (!seen.emplace(r.third_party, r.stops).second) return false;
    lp.add_column(problem.column_cost(r), 0.0, kInf, route_column(problem, rows, r));
    out.pool.push_back(std::move(r));
    return true;
  };

  std::vector<PricingOptions> modes{opt.pricing};
  modes[0].mode = DriverMode::kFullTime;
  modes[0].arrival_weight = 1.0;
  if (problem.third_party) {
    modes.push_back(modes[0]);
    modes[1].mode = DriverMode::kPartTime;
    modes[1].rho = problem.rho;
  }
  std::vector<PricingOptions> farkas = modes;
  for (auto& f : farkas) {
    f.arrival_weight = 0.0;
    f.threshold = -1e-7;
  }

  const Duals zero = Duals::zero(net, rows.futures);
  for (const auto& m : modes)
    for (int i = 1; i <= rows.customers; ++i)
      if (evaluate_route(net, {i}))
        add(price_route(net, problem.horizon, problem.period, zero, {i}, m.mode, m.rho, 0.0));

  // Greedy pass over every mode first; exact pricing only when it stalls.
  enum class Priced { kAdded, kNothing, kOverflow };
  auto price = [&](const Duals& duals, const std::vector<PricingOptions>& opts) {
    bool added = false;
    if (opt.greedy_first) {
      for (const auto& o : opts)
        for (auto& r : greedy_pricing(net, problem.horizon, problem.period, duals, o).routes)
          added |= add(std::move(r));
      if (added) return Priced::kAdded;
    }
    for (const auto& o : opts) {
      auto priced = solve_pricing(net, problem.horizon, problem.period, duals, o);
      if (priced.overflow) return Priced::kOverflow;
      for (auto& r : priced.routes) added |= add(std::move(r));
    }
    return added ? Priced::kAdded : Priced::kNothing;
  };

  bool artificial_on = true;
  while (true) {
    if (++out.iterations > opt.max_iterations) {
      out.status = CgStatus::kIterationLimit;
      return out;
    }
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::kInfeasible) {
      const Duals ray = read_duals(rows, sol.farkas);
      const auto p = price(ray, farkas);
      if (p == Priced::kOverflow) {
        out.status = CgStatus::kOverflow;
        return out;
      }
      if (p == Priced::kAdded) continue;
      out.status = CgStatus::kInfeasible;
      out.duals = ray;
      out.value = kInf;
      return out;
    }
    if (!sol.optimal())
      throw std::runtime_error(std::string("column_generation: master LP ") + to_string(sol.status));
    out.duals = read_duals(rows, sol.duals);
    const auto p = price(out.duals, modes);
    if (p == Priced::kOverflow) {
      out.status = CgStatus::kOverflow;
      return out;
    }
    if (p == Priced::kAdded) continue;
    // Final duals come from the master without artificials, so big-M values
    // never reach the caller.
    if (artificial_on) {
      artificial_on = false;
      for (int a : artificials) lp.set_bounds(a, 0.0, 0.0);
      continue;
    }
    out.status = CgStatus::kOptimal;
    out.value = 0.0;
    out.x.assign(sol.x.begin() + first_route, sol.x.end());
    for (size_t k = 0; k < out.pool.size(); ++k) out.value += problem.column_cost(out.pool[k]) * out.x[k];
    return out;
  }
}

Sf1Result solve_sf1(const SinglePeriodProblem& problem, const Sf1Options& opt) {
  const auto start = Clock::now();
  auto cg = column_generation(problem, opt.cg);
  Sf1Options rest = opt;
  rest.time_limit = std::max(0.0, opt.time_limit - since(start));
  auto r = solve_sf1(problem, cg, rest);
  r.seconds = since(start);
  return r;
}

Sf1Result solve_sf1(const SinglePeriodProblem& problem, const ColumnGenerationResult& cg,
                    const Sf1Options& opt) {
  const auto start = Clock::now();
  Sf1Result out;
  const auto& net = problem.net;
  if (cg.status == CgStatus::kInfeasible) {
    out.status = Sf1Status::kInfeasible;
    return out;
  }
  if (!cg.feasible()) {
    out.status = Sf1Status::kUnsolved;
    return out;
  }
  out.lp_value = cg.value;
  if (net.num_customers() == 0) {
    out.cost = 0.0;
    return out;
  }
  const double phi = cg.value;
  const double step = opt.step_size > 0.0 ? opt.step_size : 0.05 * phi + 1.0;
  double ub = kInf;
  double delta = step;
  EnumerationOptions en_opt;
  en_opt.label_budget = opt.label_budget;

  while (true) {
    if (since(start) > opt.time_limit) {
      out.status = std::isfinite(ub) ? Sf1Status::kTimeLimit : Sf1Status::kUnsolved;
      break;
    }
    ++out.rounds;
    const double d = std::min(delta, ub - phi);
    auto en = enumerate_routes(net, problem.horizon, problem.period, cg.duals, d, en_opt);
    if (problem.third_party && !en.overflow) {
      EnumerationOptions hired = en_opt;
      hired.mode = DriverMode::kPartTime;
      hired.rho = problem.rho;
      hired.label_budget = std::max(1L, en_opt.label_budget - en.labels);
      auto more = enumerate_routes(net, problem.horizon, problem.period, cg.duals, d, hired);
      en.overflow = more.overflow;
      en.complete = en.complete && more.complete;
      for (auto& r : more.routes) en.routes.push_back(std::move(r));
    }
    out.enumerated = std::max<long>(out.enumerated, static_cast<long>(en.routes.size()));
    if (en.overflow) {
      out.status = std::isfinite(ub) ? Sf1Status::kTimeLimit : Sf1Status::kUnsolved;
      break;
    }
    LinearProgram lp;
    const MasterRows rows = add_rows(lp, problem, RowSense::kEqual);
    std::vector<int> ints;
    for (const auto& r : en.routes)
      ints.push_back(lp.add_column(problem.column_cost(r), 0.0, 1.0,
                                   route_column(problem, rows, r)));
    MipOptions mip_opt;
    mip_opt.time_limit = std::max(1.0, opt.time_limit - since(start));
    const auto mip = solve_mip(lp, ints, mip_opt);
    const bool solved = mip.status == MipStatus::kOptimal;
    if (mip.has_incumbent() && mip.objective < ub - 1e-9) {
      ub = mip.objective;
      out.routes.clear();
      out.hiring = 0.0;
      for (size_t k = 0; k < en.routes.size(); ++k)
        for (long copies = std::lround(mip.x[k]); copies > 0; --copies) {
          out.routes.push_back(en.routes[k]);
          if (en.routes[k].third_party) out.hiring += problem.rho * en.routes[k].metrics.duration;
        }
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(ub));
    if (solved && std::isfinite(ub) && d >= ub - phi - tol) {
      out.status = Sf1Status::kOptimal;
      break;
    }
    if (en.complete && (solved || mip.status == MipStatus::kInfeasible)) {
      out.status = std::isfinite(ub) ? Sf1Status::kOptimal : Sf1Status::kInfeasible;
      break;
    }
    delta += step;
  }
  out.cost = ub;
  out.gap = out.status == Sf1Status::kOptimal ? 0.0 : ub - phi;
  std::stable_sort(out.routes.begin(), out.routes.end(), [](const PricedRoute& a, const PricedRoute& b) {
    return std::tie(a.third_party, a.stops) < std::tie(b.third_party, b.stops);
  });
  out.seconds = since(start);
  return out;
}

Sf1Result solve_hs(const StopNetwork& net, int k, const Sf1Options& opt) {
  if (net.num_customers() == 0) {
    Sf1Result r;
    r.cost = 0.0;
    return r;
  }
  if (k <= 0) {
    Sf1Result r;
    r.status = Sf1Status::kInfeasible;
    return r;
  }
  return solve_sf1(SinglePeriodProblem::uncapped_future(net, k), opt);
}

double evaluate_hs(const StopNetwork& net, int k, const Sf1Options& opt) {
  auto r = solve_hs(net, k, opt);
  if (r.status == Sf1Status::kInfeasible) return kInf;
  if (r.status == Sf1Status::kUnsolved)
    throw std::runtime_error("evaluate_hs: single-period problem left unsolved");
  return r.cost;
}

int minimal_feasible_k(const StopNetwork& net, const Sf1Options& opt) {
  if (net.num_customers() == 0) return 0;
  for (int i = 1; i <= net.num_customers(); ++i)
    if (!evaluate_route(net, {i}))
      throw NoFeasibleFleet("order " + std::to_string(i) + " cannot be served even alone");
  int lo = std::max(1, (net.total_demand() + net.capacity() - 1) / net.capacity());
  int hi = net.num_customers();
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (std::isfinite(evaluate_hs(net, mid, opt))) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

Sf1Result solve_with_recourse(const StopNetwork& net, int fleet_cap, double rho,
                              const Sf1Options& opt) {
  auto p = SinglePeriodProblem::uncapped_future(net, std::max(0, fleet_cap));
  p.third_party = true;
  p.rho = rho;
  if (net.num_customers() == 0) {
    Sf1Result r;
    r.cost = 0.0;
    return r;
  }
  return solve_sf1(p, opt);
}

}  // namespace ontime
