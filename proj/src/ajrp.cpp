#include "ontime/ajrp.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace ontime {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void check_context(const LookaheadContext& ctx, int period) {
  if (!ctx.tables) throw std::invalid_argument("lookahead step needs cost tables");
  if (ctx.tables->cost.num_periods() < ctx.horizon.num_periods ||
      ctx.tables->omega.num_periods() < ctx.horizon.num_periods)
    throw std::invalid_argument("cost tables cover fewer periods than the horizon");
  if (period < 1 || period > ctx.horizon.num_periods)
    throw std::out_of_range("lookahead step: period out of range");
}

// F2: one-hot dispatch counts x for periods n+1..N, one-hot busy allowances z
// for the same periods, and eta for the current routing cost.
class Master {
 public:
  Master(int period, const DriverStatus& status, const LookaheadContext& ctx) {
    const int n = period, N = ctx.horizon.num_periods, K = ctx.fleet_size;
    const auto& cost = ctx.tables->cost;
    const auto& omega = ctx.tables->omega;
    const int cap_now = K - status.at(n);
    futures_ = N - n;
    x_.resize(futures_);
    z_.resize(futures_);
    for (int j = 0; j < futures_; ++j) {
      const int p = n + 1 + j, cap = K - status.at(p);
      for (int k = 0; k <= std::min(cap, cost.max_k); ++k)
        if (cost.usable(p, k)) x_[j].push_back({k, lp_.add_column(cost.at(p, k), 0.0, 1.0)});
      for (int k = 0; k <= std::min(cap, cap_now); ++k) z_[j].push_back({k, lp_.add_column(0.0, 0.0, 1.0)});
      if (x_[j].empty() || z_[j].empty()) empty_ = true;
    }
    eta_ = lp_.add_column(1.0, 0.0, kInf);
    for (int j = 0; j < futures_; ++j) {
      SparseVec xs, zs;
      for (auto [k, c] : x_[j]) xs.push_back({c, 1.0});
      for (auto [k, c] : z_[j]) zs.push_back({c, 1.0});
      add_row(RowSense::kEqual, 1.0, xs);
      add_row(RowSense::kEqual, 1.0, zs);
    }
    for (int j = 0; j < futures_; ++j) {
      const int p = n + 1 + j;
      SparseVec row;
      for (int i = 0; i <= j; ++i)
        for (auto [k, c] : x_[i])
          if (double w = omega.at(n + 1 + i, p, k); w != 0.0) row.push_back({c, w});
      for (auto [k, c] : z_[j])
        if (k > 0) row.push_back({c, static_cast<double>(k)});
      add_row(RowSense::kLessEqual, K - status.at(p), row);
    }
    for (int c = 0; c < eta_; ++c) binaries_.push_back(c);
  }

  struct Point {
    double objective = 0.0;
    double eta = 0.0;
    std::vector<int> x, z;
  };

  // Empty optional when F2 has no feasible point.
  std::optional<Point> solve(const MipOptions& opt) const {
    if (empty_ || dead_) return std::nullopt;
    const auto sol = solve_mip(lp_, binaries_, opt);
    if (sol.status == MipStatus::kInfeasible) return std::nullopt;
    if (sol.status != MipStatus::kOptimal)
      throw std::runtime_error(std::string("ajrp master: ") + to_string(sol.status));
    Point p;
    p.objective = sol.objective;
    p.eta = sol.x[eta_];
    for (int j = 0; j < futures_; ++j) {
      p.x.push_back(pick(x_[j], sol.x));
      p.z.push_back(pick(z_[j], sol.x));
    }
    return p;
  }

  void add(const BendersCut& cut) {
    SparseVec row;
    if (cut.kind == BendersCut::Kind::kLogic) {
      double rhs = 1.0;
      auto pattern = [&](const std::vector<std::pair<int, int>>& vars, int chosen) {
        for (auto [k, c] : vars) {
          if (k == chosen) {
            row.push_back({c, -1.0});
            rhs -= 1.0;
          } else {
            row.push_back({c, 1.0});
          }
        }
      };
      for (int j = 0; j < futures_; ++j) {
        pattern(x_[j], cut.x_pattern[j]);
        pattern(z_[j], cut.z_pattern[j]);
      }
      add_row(RowSense::kGreaterEqual, rhs, row);
      return;
    }
    for (int j = 0; j < futures_; ++j) {
      const double a = j < static_cast<int>(cut.coef.size()) ? cut.coef[j] : 0.0;
      if (a == 0.0) continue;
      for (auto [k, c] : z_[j])
        if (k > 0) row.push_back({c, a * k});
    }
    if (cut.kind == BendersCut::Kind::kOptimality) row.push_back({eta_, -1.0});
    add_row(RowSense::kLessEqual, -cut.constant, row);
  }

  int futures() const { return futures_; }

 private:
  static int pick(const std::vector<std::pair<int, int>>& vars, const std::vector<double>& x) {
    for (auto [k, c] : vars)
      if (x[c] > 0.5) return k;
    throw std::logic_error("ajrp master: convexity row without a chosen value");
  }

  void add_row(RowSense sense, double rhs, const SparseVec& row) {
    if (row.empty()) {
      const bool ok = sense == RowSense::kLessEqual      ? 0.0 <= rhs + 1e-9
                      : sense == RowSense::kGreaterEqual ? 0.0 >= rhs - 1e-9
                                                         : std::abs(rhs) <= 1e-9;
      if (!ok) dead_ = true;
      return;
    }
    lp_.add_row(sense, rhs, row);
  }

  LinearProgram lp_;
  int futures_ = 0;
  std::vector<std::vector<std::pair<int, int>>> x_, z_;  // (k, column)
  int eta_ = 0;
  std::vector<int> binaries_;
  bool empty_ = false;
  bool dead_ = false;
};

struct Subproblem {
  ColumnGenerationResult rf1;
  std::optional<Sf1Result> sf1;
};

double cut_lhs(const BendersCut& cut, const std::vector<int>& z) {
  double v = cut.constant;
  for (size_t j = 0; j < cut.coef.size() && j < z.size(); ++j) v += cut.coef[j] * z[j];
  return v;
}

}  // namespace

const char* to_string(BendersCut::Kind k) {
  switch (k) {
    case BendersCut::Kind::kOptimality: return "optimality";
    case BendersCut::Kind::kFeasibility: return "feasibility";
    case BendersCut::Kind::kLogic: return "logic";
  }
  return "?";
}

const char* to_string(AjrpStatus s) {
  switch (s) {
    case AjrpStatus::kOptimal: return "optimal";
    case AjrpStatus::kInfeasible: return "infeasible";
    case AjrpStatus::kTimeLimit: return "time_limit";
    case AjrpStatus::kIterationLimit: return "iteration_limit";
    case AjrpStatus::kUnsolved: return "unsolved";
  }
  return "?";
}

bool BendersCut::satisfied(const std::vector<int>& x, const std::vector<int>& z, double eta,
                           double tol) const {
  switch (kind) {
    case Kind::kOptimality: return cut_lhs(*this, z) <= eta + tol;
    case Kind::kFeasibility: return cut_lhs(*this, z) <= tol;
    case Kind::kLogic: return x != x_pattern || z != z_pattern;
  }
  return false;
}

BendersCut make_optimality_cut(const Duals& duals, int fleet_cap) {
  BendersCut cut;
  cut.kind = BendersCut::Kind::kOptimality;
  cut.constant = duals.mu_now * fleet_cap;
  for (size_t i = 1; i < duals.nu.size(); ++i) cut.constant += duals.nu[i];
  cut.coef = duals.mu_future;
  return cut;
}

BendersCut make_feasibility_cut(const Duals& ray, int fleet_cap) {
  auto cut = make_optimality_cut(ray, fleet_cap);
  cut.kind = BendersCut::Kind::kFeasibility;
  return cut;
}

BendersCut make_logic_cut(std::vector<int> x, std::vector<int> z) {
  BendersCut cut;
  cut.kind = BendersCut::Kind::kLogic;
  cut.x_pattern = std::move(x);
  cut.z_pattern = std::move(z);
  return cut;
}

AjrpResult ajrp_step(const StopNetwork& net, int period, const DriverStatus& status,
                     const LookaheadContext& ctx, const AjrpOptions& opt) {
  check_context(ctx, period);
  const auto start = Clock::now();
  const int cap_now = ctx.fleet_size - status.at(period);
  if (cap_now < 0) throw std::invalid_argument("ajrp_step: more drivers busy than on shift");

  AjrpResult out;
  Master master(period, status, ctx);
  std::map<std::vector<int>, Subproblem> cache;
  auto subproblem = [&](const std::vector<int>& caps) -> Subproblem& {
    auto it = cache.find(caps);
    if (it != cache.end()) return it->second;
    Subproblem s;
    SinglePeriodProblem p;
    p.net = net;
    p.horizon = ctx.horizon;
    p.period = period;
    p.fleet_cap = cap_now;
    p.future_caps = caps;
    if (net.num_customers() == 0) {
      s.rf1.duals = Duals::zero(net, static_cast<int>(caps.size()));
      s.sf1 = Sf1Result{};
      s.sf1->cost = 0.0;
    } else {
      s.rf1 = column_generation(p, opt.sf1.cg);
      if (s.rf1.status == CgStatus::kInfeasible) {
        s.sf1 = Sf1Result{};
        s.sf1->status = Sf1Status::kInfeasible;
      }
    }
    return cache.emplace(caps, std::move(s)).first->second;
  };
  auto sf1 = [&](const std::vector<int>& caps) -> const Sf1Result& {
    auto& s = subproblem(caps);
    if (!s.sf1) {
      SinglePeriodProblem p;
      p.net = net;
      p.horizon = ctx.horizon;
      p.period = period;
      p.fleet_cap = cap_now;
      p.future_caps = caps;
      s.sf1 = solve_sf1(p, s.rf1, opt.sf1);
    }
    return *s.sf1;
  };
  auto converged = [&] {
    return std::isfinite(out.ub) && out.ub - out.lb <= opt.epsilon * std::max(1.0, std::abs(out.ub));
  };

  while (true) {
    if (out.iterations >= opt.max_iterations) {
      out.status = AjrpStatus::kIterationLimit;
      break;
    }
    if (since(start) > opt.time_limit) {
      out.status = AjrpStatus::kTimeLimit;
      break;
    }
    ++out.iterations;
    TraceRow row{out.iterations, out.lb, out.ub, ""};
    const auto point = master.solve(opt.mip);
    if (!point) {
      // Every assignment is cut off: the incumbent is optimal, or there is none.
      if (std::isfinite(out.ub)) {
        out.status = AjrpStatus::kOptimal;
        out.lb = out.ub;
      } else {
        out.status = AjrpStatus::kInfeasible;
      }
      row.lb = out.lb;
      row.cut = "none";
      out.trace.push_back(row);
      break;
    }
    out.lb = std::max(out.lb, point->objective);
    row.lb = out.lb;
    if (converged()) {
      out.status = AjrpStatus::kOptimal;
      row.cut = "none";
      out.trace.push_back(row);
      break;
    }
    const double future = point->objective - point->eta;
    auto& sub = subproblem(point->z);
    BendersCut cut;
    if (sub.rf1.status == CgStatus::kInfeasible) {
      cut = make_feasibility_cut(sub.rf1.duals, cap_now);
      if (cut_lhs(cut, point->z) <= 1e-9) cut = make_logic_cut(point->x, point->z);
    } else if (!sub.rf1.feasible()) {
      throw std::runtime_error(std::string("ajrp_step: relaxation ") + to_string(sub.rf1.status));
    } else if (sub.rf1.value - point->eta >= out.ub - out.lb) {
      cut = make_optimality_cut(sub.rf1.duals, cap_now);
      if (cut_lhs(cut, point->z) <= point->eta + 1e-9) cut = make_logic_cut(point->x, point->z);
    } else {
      cut = make_logic_cut(point->x, point->z);
      const auto& r = sf1(point->z);
      if (r.solved() && future + r.cost < out.ub) {
        out.ub = future + r.cost;
        out.routes = r.routes;
        out.plan = point->x;
        out.z_caps = point->z;
        out.routing_cost = r.cost;
        out.future_cost = future;
      } else if (!r.solved() && r.status != Sf1Status::kInfeasible) {
        throw std::runtime_error(std::string("ajrp_step: routing problem ") + to_string(r.status));
      }
    }
    master.add(cut);
    out.cuts.push_back(cut);
    row.ub = out.ub;
    row.cut = to_string(cut.kind);
    out.trace.push_back(row);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iter,lb,ub,cut\n";
  auto num = [](double v) { return std::isfinite(v) ? std::to_string(v) : std::string(v > 0 ? "inf" : "-inf"); };
  for (const auto& r : trace) out << r.iteration << ',' << num(r.lb) << ',' << num(r.ub) << ',' << r.cut << '\n';
}

DispatchResult solve_dispatch_ip(const std::vector<double>& current, int period,
                                 const DriverStatus& status, const LookaheadContext& ctx,
                                 const MipOptions& opt) {
  check_context(ctx, period);
  const int n = period, N = ctx.horizon.num_periods, K = ctx.fleet_size;
  const auto& cost = ctx.tables->cost;
  const auto& omega = ctx.tables->omega;
  DispatchResult out;
  LinearProgram lp;
  std::vector<std::vector<std::pair<int, int>>> vars(N - n + 1);
  for (int m = n; m <= N; ++m) {
    const int cap = K - status.at(m);
    auto& v = vars[m - n];
    for (int k = 0; k <= std::min(cap, cost.max_k); ++k) {
      const double c = m == n ? (k < static_cast<int>(current.size()) ? current[k] : kInf) : cost.at(m, k);
      if (std::isfinite(c)) v.push_back({k, lp.add_column(c, 0.0, 1.0)});
    }
    if (v.empty()) return out;
  }
  for (const auto& v : vars) {
    SparseVec row;
    for (auto [k, c] : v) row.push_back({c, 1.0});
    lp.add_row(RowSense::kEqual, 1.0, row);
  }
  for (int p = n; p <= N; ++p) {
    SparseVec row;
    for (int m = n; m <= p; ++m)
      for (auto [k, c] : vars[m - n])
        if (double w = omega.at(m, p, k); w != 0.0) row.push_back({c, w});
    if (!row.empty()) lp.add_row(RowSense::kLessEqual, K - status.at(p), row);
  }
  std::vector<int> binaries(lp.num_cols());
  for (int c = 0; c < lp.num_cols(); ++c) binaries[c] = c;
  const auto sol = solve_mip(lp, binaries, opt);
  if (sol.status == MipStatus::kInfeasible) return out;
  if (sol.status != MipStatus::kOptimal)
    throw std::runtime_error(std::string("dispatch IP: ") + to_string(sol.status));
  out.feasible = true;
  out.objective = sol.objective;
  for (int m = n; m <= N; ++m)
    for (auto [k, c] : vars[m - n])
      if (sol.x[c] > 0.5) (m == n ? out.now : out.plan.emplace_back()) = k;
  return out;
}

}  // namespace ontime
