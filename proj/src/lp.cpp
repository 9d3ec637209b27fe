#include "ontime/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace ontime {

int LinearProgram::add_row(RowSense sense, double rhs, const SparseVec& coefs) {
  const int i = num_rows();
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  for (const auto& [j, a] : coefs) {
    if (j < 0 || j >= num_cols()) throw std::out_of_range("add_row: column index");
    if (a != 0.0) cols_[j].emplace_back(i, a);
  }
  return i;
}

int LinearProgram::add_column(double cost, double lower, double upper, const SparseVec& coefs) {
  if (lower > upper) throw std::invalid_argument("add_column: lower > upper");
  const int j = num_cols();
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  SparseVec col;
  for (const auto& [i, a] : coefs) {
    if (i < 0 || i >= num_rows()) throw std::out_of_range("add_column: row index");
    if (a != 0.0) col.emplace_back(i, a);
  }
  cols_.push_back(std::move(col));
  names_.emplace_back();
  return j;
}

void LinearProgram::set_bounds(int j, double lower, double upper) {
  lower_[j] = lower;
  upper_[j] = upper;
}

void LinearProgram::set_name(int j, std::string name) { names_[j] = std::move(name); }

const std::string& LinearProgram::name(int j) const { return names_[j]; }

void LinearProgram::write_lp(std::ostream& os) const {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(12);
  auto var = [&](int j) { return names_[j].empty() ? "x" + std::to_string(j) : names_[j]; };
  auto term = [&](double a, int j, bool first) {
    if (a < 0)
      os << (first ? "- " : " - ") << -a << ' ' << var(j);
    else
      os << (first ? "" : " + ") << a << ' ' << var(j);
  };
  os << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < num_cols(); ++j) {
    if (cost_[j] == 0.0) continue;
    os << ' ';
    term(cost_[j], j, first);
    first = false;
  }
  if (first) os << " 0";
  os << "\nSubject To\n";
  std::vector<SparseVec> rows(num_rows());
  for (int j = 0; j < num_cols(); ++j)
    for (const auto& [i, a] : cols_[j]) rows[i].emplace_back(j, a);
  for (int i = 0; i < num_rows(); ++i) {
    os << " r" << i << ":";
    first = true;
    for (const auto& [j, a] : rows[i]) {
      os << ' ';
      term(a, j, first);
      first = false;
    }
    if (first) os << " 0 " << var(0);
    switch (sense_[i]) {
      case RowSense::kLessEqual: os << " <= "; break;
      case RowSense::kGreaterEqual: os << " >= "; break;
      case RowSense::kEqual: os << " = "; break;
    }
    os << rhs_[i] << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < num_cols(); ++j) {
    const double lo = lower_[j], hi = upper_[j];
    if (std::isinf(lo) && std::isinf(hi))
      os << ' ' << var(j) << " free\n";
    else if (std::isinf(hi))
      os << ' ' << var(j) << " >= " << lo << '\n';
    else if (std::isinf(lo))
      os << " -inf <= " << var(j) << " <= " << hi << '\n';
    else
      os << ' ' << lo << " <= " << var(j) << " <= " << hi << '\n';
  }
  os << "End\n";
  os.flags(old_flags);
  os.precision(old_prec);
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
    case LpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::kOptimal: return "optimal";
    case MipStatus::kInfeasible: return "infeasible";
    case MipStatus::kNodeLimit: return "node_limit";
    case MipStatus::kTimeLimit: return "time_limit";
    case MipStatus::kUnbounded: return "unbounded";
    case MipStatus::kError: return "error";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;

enum class VarState : unsigned char { kBasic, kLower, kUpper, kZero };

// Bounded-variable primal simplex on [A I D] (structurals, slacks,
// artificials) with an explicit dense basis inverse.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.num_rows();
    n_ = lp.num_cols();
    total_ = n_ + 2 * m_;
    lo_.resize(total_);
    hi_.resize(total_);
    cost_.assign(total_, 0.0);
    sigma_.assign(m_, 1.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp.lower(j);
      hi_[j] = lp.upper(j);
    }
    for (int i = 0; i < m_; ++i) {
      switch (lp.sense(i)) {
        case RowSense::kLessEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
        case RowSense::kGreaterEqual: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
        case RowSense::kEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
      }
      lo_[n_ + m_ + i] = 0.0;
      hi_[n_ + m_ + i] = kInf;
    }
    max_iter_ = opt.max_iterations > 0 ? opt.max_iterations : 20000 + 50 * (m_ + n_);
  }

  LpSolution run() {
    LpSolution sol;
    init_basis();
    for (int i = 0; i < m_; ++i) cost_[n_ + m_ + i] = 1.0;
    LpStatus st = iterate();
    if (st != LpStatus::kOptimal) return finish(sol, st);
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i) infeas += x_[n_ + m_ + i];
    double bnorm = 1.0;
    for (int i = 0; i < m_; ++i) bnorm = std::max(bnorm, std::abs(lp_.rhs(i)));
    if (infeas > opt_.feasibility_tol * bnorm) {
      sol.farkas = duals();
      return finish(sol, LpStatus::kInfeasible);
    }
    for (int i = 0; i < m_; ++i) {
      const int a = n_ + m_ + i;
      cost_[a] = 0.0;
      hi_[a] = 0.0;
      if (state_[a] != VarState::kBasic) x_[a] = 0.0;
    }
    for (int j = 0; j < n_; ++j) cost_[j] = lp_.cost(j);
    st = iterate();
    if (st == LpStatus::kOptimal) {
      sol.duals = duals();
      sol.reduced_costs.resize(n_);
      for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = reduced_cost(j, sol.duals);
    }
    return finish(sol, st);
  }

 private:
  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < n_) {
      for (const auto& [i, a] : lp_.column(j)) f(i, a);
    } else if (j < n_ + m_) {
      f(j - n_, 1.0);
    } else {
      f(j - n_ - m_, sigma_[j - n_ - m_]);
    }
  }

  void init_basis() {
    x_.assign(total_, 0.0);
    state_.assign(total_, VarState::kLower);
    for (int j = 0; j < n_ + m_; ++j) {
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = VarState::kLower;
      } else if (std::isfinite(hi_[j])) {
        x_[j] = hi_[j];
        state_[j] = VarState::kUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::kZero;
      }
    }
    std::vector<double> r(m_);
    for (int i = 0; i < m_; ++i) r[i] = lp_.rhs(i);
    for (int j = 0; j < n_ + m_; ++j) {
      if (x_[j] == 0.0) continue;
      for_col(j, [&](int i, double a) { r[i] -= a * x_[j]; });
    }
    basis_.resize(m_);
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      sigma_[i] = r[i] >= 0.0 ? 1.0 : -1.0;
      const int a = n_ + m_ + i;
      basis_[i] = a;
      state_[a] = VarState::kBasic;
      x_[a] = std::abs(r[i]);
      binv_[static_cast<size_t>(i) * m_ + i] = sigma_[i];
    }
  }

  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      const double cb = cost_[basis_[k]];
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<size_t>(k) * m_];
      for (int i = 0; i < m_; ++i) y[i] += cb * row[i];
    }
    return y;
  }

  double reduced_cost(int j, const std::vector<double>& y) const {
    double d = cost_[j];
    for_col(j, [&](int i, double a) { d -= y[i] * a; });
    return d;
  }

  bool refactor() {
    std::vector<double> b(static_cast<size_t>(m_) * m_, 0.0);
    for (int k = 0; k < m_; ++k) for_col(basis_[k], [&](int i, double a) { b[static_cast<size_t>(i) * m_ + k] = a; });
    std::vector<double> inv(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<size_t>(i) * m_ + i] = 1.0;
    for (int c = 0; c < m_; ++c) {
      int p = c;
      double best = std::abs(b[static_cast<size_t>(c) * m_ + c]);
      for (int r = c + 1; r < m_; ++r) {
        const double v = std::abs(b[static_cast<size_t>(r) * m_ + c]);
        if (v > best) { best = v; p = r; }
      }
      if (best < 1e-11) return false;
      if (p != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(b[static_cast<size_t>(p) * m_ + k], b[static_cast<size_t>(c) * m_ + k]);
          std::swap(inv[static_cast<size_t>(p) * m_ + k], inv[static_cast<size_t>(c) * m_ + k]);
        }
      }
      const double piv = b[static_cast<size_t>(c) * m_ + c];
      for (int k = 0; k < m_; ++k) {
        b[static_cast<size_t>(c) * m_ + k] /= piv;
        inv[static_cast<size_t>(c) * m_ + k] /= piv;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = b[static_cast<size_t>(r) * m_ + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          b[static_cast<size_t>(r) * m_ + k] -= f * b[static_cast<size_t>(c) * m_ + k];
          inv[static_cast<size_t>(r) * m_ + k] -= f * inv[static_cast<size_t>(c) * m_ + k];
        }
      }
    }
    // Row k of B^{-1} belongs to basis position k: inv is (B)^{-1} with B's
    // columns in basis order, so rows of inv are indexed by position.
    binv_ = std::move(inv);
    std::vector<double> r(m_);
    for (int i = 0; i < m_; ++i) r[i] = lp_.rhs(i);
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      for_col(j, [&](int i, double a) { r[i] -= a * x_[j]; });
    }
    for (int k = 0; k < m_; ++k) {
      double v = 0.0;
      const double* row = &binv_[static_cast<size_t>(k) * m_];
      for (int i = 0; i < m_; ++i) v += row[i] * r[i];
      x_[basis_[k]] = v;
    }
    return true;
  }

  bool eligible(int j, double d) const {
    if (lo_[j] == hi_[j]) return false;
    switch (state_[j]) {
      case VarState::kLower: return d < -opt_.optimality_tol;
      case VarState::kUpper: return d > opt_.optimality_tol;
      case VarState::kZero: return std::abs(d) > opt_.optimality_tol;
      case VarState::kBasic: return false;
    }
    return false;
  }

  LpStatus iterate() {
    std::vector<double> alpha(m_);
    int since_refactor = 0;
    int degenerate = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= max_iter_) return LpStatus::kIterationLimit;
      const std::vector<double> y = duals();
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        const double d = reduced_cost(j, y);
        if (!eligible(j, d)) continue;
        if (bland) { q = j; best = d; break; }
        if (std::abs(d) > std::abs(best)) { best = d; q = j; }
      }
      if (q < 0) return LpStatus::kOptimal;
      const double dir = best < 0.0 ? 1.0 : -1.0;

      std::fill(alpha.begin(), alpha.end(), 0.0);
      for_col(q, [&](int i, double a) {
        for (int k = 0; k < m_; ++k) alpha[k] += binv_[static_cast<size_t>(k) * m_ + i] * a;
      });

      // Harris two-pass ratio test.
      double relaxed = kInf;
      for (int k = 0; k < m_; ++k) {
        const double rate = -dir * alpha[k];
        const int b = basis_[k];
        if (rate < -kPivotTol && std::isfinite(lo_[b]))
          relaxed = std::min(relaxed, (x_[b] - lo_[b] + opt_.feasibility_tol) / -rate);
        else if (rate > kPivotTol && std::isfinite(hi_[b]))
          relaxed = std::min(relaxed, (hi_[b] - x_[b] + opt_.feasibility_tol) / rate);
      }
      int leave = -1;
      double step = kInf;
      double pivot_mag = 0.0;
      for (int k = 0; k < m_; ++k) {
        const double rate = -dir * alpha[k];
        const int b = basis_[k];
        double t;
        if (rate < -kPivotTol && std::isfinite(lo_[b]))
          t = (x_[b] - lo_[b]) / -rate;
        else if (rate > kPivotTol && std::isfinite(hi_[b]))
          t = (hi_[b] - x_[b]) / rate;
        else
          continue;
        if (t > relaxed) continue;
        const bool better = bland ? (leave < 0 || b < basis_[leave])
                                  : std::abs(alpha[k]) > pivot_mag;
        if (better) {
          leave = k;
          pivot_mag = std::abs(alpha[k]);
          step = std::max(0.0, t);
        }
      }
      const double span = hi_[q] - lo_[q];
      const bool flip = std::isfinite(span) && span <= step;
      if (!flip && leave < 0) return LpStatus::kUnbounded;
      if (flip) step = span;

      ++iterations_;
      if (step < 1e-12) {
        if (++degenerate > opt_.degenerate_switch) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      for (int k = 0; k < m_; ++k) x_[basis_[k]] -= dir * step * alpha[k];
      x_[q] += dir * step;
      if (flip) {
        state_[q] = dir > 0 ? VarState::kUpper : VarState::kLower;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        continue;
      }
      const int out = basis_[leave];
      const double rate = -dir * alpha[leave];
      if (rate < 0) {
        x_[out] = lo_[out];
        state_[out] = VarState::kLower;
      } else {
        x_[out] = hi_[out];
        state_[out] = VarState::kUpper;
      }
      basis_[leave] = q;
      state_[q] = VarState::kBasic;
      pivot(leave, alpha);
      if (++since_refactor >= opt_.refactor_interval) {
        since_refactor = 0;
        if (!refactor()) return LpStatus::kNumericalFailure;
      }
    }
  }

  void pivot(int r, const std::vector<double>& alpha) {
    double* prow = &binv_[static_cast<size_t>(r) * m_];
    const double piv = alpha[r];
    for (int i = 0; i < m_; ++i) prow[i] /= piv;
    for (int k = 0; k < m_; ++k) {
      if (k == r || alpha[k] == 0.0) continue;
      double* row = &binv_[static_cast<size_t>(k) * m_];
      const double f = alpha[k];
      for (int i = 0; i < m_; ++i) row[i] -= f * prow[i];
    }
  }

  LpSolution& finish(LpSolution& sol, LpStatus st) {
    sol.status = st;
    sol.iterations = iterations_;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += lp_.cost(j) * sol.x[j];
    sol.objective = obj;
    return sol;
  }

  const LinearProgram& lp_;
  LpOptions opt_;
  int m_ = 0, n_ = 0, total_ = 0;
  int max_iter_ = 0;
  int iterations_ = 0;
  std::vector<double> lo_, hi_, cost_, sigma_, x_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  std::vector<double> binv_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opt) {
  Simplex s(lp, opt);
  return s.run();
}

double dual_objective(const LinearProgram& lp, const LpSolution& sol) {
  double v = 0.0;
  for (int i = 0; i < lp.num_rows(); ++i) v += sol.duals[i] * lp.rhs(i);
  for (int j = 0; j < lp.num_cols(); ++j) {
    const double d = sol.reduced_costs[j];
    if (d > 0.0 && std::isfinite(lp.lower(j)))
      v += d * lp.lower(j);
    else if (d < 0.0 && std::isfinite(lp.upper(j)))
      v += d * lp.upper(j);
  }
  return v;
}

}  // namespace ontime
