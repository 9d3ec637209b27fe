#include <chrono>
#include <cmath>
#include <queue>

#include "ontime/lp.hpp"

namespace ontime {

namespace {

struct Node {
  double bound;
  long id;
  std::vector<double> lo, hi;  // over integer_vars
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace

MipSolution solve_mip(const LinearProgram& lp, const std::vector<int>& integer_vars,
                      const MipOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  MipSolution out;
  LinearProgram work = lp;
  const size_t nint = integer_vars.size();

  Node root{-kInf, 0, {}, {}};
  root.lo.resize(nint);
  root.hi.resize(nint);
  for (size_t k = 0; k < nint; ++k) {
    root.lo[k] = std::ceil(lp.lower(integer_vars[k]) - opt.integrality_tol);
    root.hi[k] = std::floor(lp.upper(integer_vars[k]) + opt.integrality_tol);
  }
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(std::move(root));
  long next_id = 1;
  bool limit_hit = false;
  MipStatus limit_status = MipStatus::kOptimal;

  auto prune_at = [&] {
    return out.objective - opt.gap_tol * std::max(1.0, std::abs(out.objective));
  };

  while (!open.empty()) {
    if (elapsed() > opt.time_limit) {
      limit_hit = true;
      limit_status = MipStatus::kTimeLimit;
      break;
    }
    if (out.nodes > opt.node_limit) {
      limit_hit = true;
      limit_status = MipStatus::kNodeLimit;
      break;
    }
    Node node = open.top();
    open.pop();
    if (out.has_incumbent() && node.bound >= prune_at()) continue;
    for (size_t k = 0; k < nint; ++k) work.set_bounds(integer_vars[k], node.lo[k], node.hi[k]);
    LpSolution rel = solve_lp(work, opt.lp);
    if (rel.status == LpStatus::kInfeasible) continue;
    if (rel.status == LpStatus::kUnbounded) {
      out.status = MipStatus::kUnbounded;
      return out;
    }
    if (rel.status != LpStatus::kOptimal) {
      out.status = MipStatus::kError;
      return out;
    }
    if (out.has_incumbent() && rel.objective >= prune_at()) continue;

    int branch = -1;
    double frac_best = 0.0;
    for (size_t k = 0; k < nint; ++k) {
      const double v = rel.x[integer_vars[k]];
      const double f = v - std::floor(v);
      const double dist = std::min(f, 1.0 - f);
      if (dist > opt.integrality_tol && dist > frac_best) {
        frac_best = dist;
        branch = static_cast<int>(k);
      }
    }
    if (branch < 0) {
      out.x = rel.x;
      for (int j : integer_vars) out.x[j] = std::round(out.x[j]);
      out.objective = 0.0;
      for (int j = 0; j < lp.num_cols(); ++j) out.objective += lp.cost(j) * out.x[j];
      continue;
    }
    const double v = rel.x[integer_vars[branch]];
    Node down{rel.objective, next_id++, node.lo, node.hi};
    down.hi[branch] = std::floor(v);
    Node up{rel.objective, next_id++, std::move(node.lo), std::move(node.hi)};
    up.lo[branch] = std::ceil(v);
    open.push(std::move(down));
    open.push(std::move(up));
    out.nodes += 2;
  }

  if (limit_hit) {
    out.status = limit_status;
    double bound = out.objective;
    if (!open.empty()) bound = std::min(bound, open.top().bound);
    out.bound = bound;
  } else {
    out.status = out.has_incumbent() ? MipStatus::kOptimal : MipStatus::kInfeasible;
    out.bound = out.objective;
  }
  if (out.has_incumbent())
    out.gap = std::max(0.0, (out.objective - out.bound) / std::max(1.0, std::abs(out.objective)));
  if (out.status == MipStatus::kOptimal) out.gap = 0.0;
  return out;
}

}  // namespace ontime
