#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ontime/instance.hpp"

namespace ontime {

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

using SparseVec = std::vector<std::pair<int, double>>;

// min c'x s.t. rows, lower <= x <= upper. Stored column-wise so that
// column generation can append variables cheaply.
class LinearProgram {
 public:
  int add_row(RowSense sense, double rhs, const SparseVec& coefs = {});
  int add_column(double cost, double lower, double upper, const SparseVec& coefs = {});

  int num_rows() const { return static_cast<int>(rhs_.size()); }
  int num_cols() const { return static_cast<int>(cost_.size()); }

  double cost(int j) const { return cost_[j]; }
  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }
  const SparseVec& column(int j) const { return cols_[j]; }
  RowSense sense(int i) const { return sense_[i]; }
  double rhs(int i) const { return rhs_[i]; }

  void set_bounds(int j, double lower, double upper);
  void set_cost(int j, double cost) { cost_[j] = cost; }
  void set_rhs(int i, double rhs) { rhs_[i] = rhs; }

  void set_name(int j, std::string name);
  const std::string& name(int j) const;

  // Text dump in LP format, 12 significant digits.
  void write_lp(std::ostream& os) const;

 private:
  std::vector<double> cost_, lower_, upper_;
  std::vector<SparseVec> cols_;
  std::vector<std::string> names_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalFailure };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  // Row duals: <= rows are nonpositive, >= rows nonnegative.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  // When infeasible: y with y'A_j sign-consistent with every column's
  // bounds and y'b minus the bound terms strictly positive.
  std::vector<double> farkas;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-6;
  int refactor_interval = 64;
  int max_iterations = 0;  // 0 picks a size-dependent default
  int degenerate_switch = 50;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opt = {});

// Value of the dual objective y'b plus the bound terms of the reduced costs.
double dual_objective(const LinearProgram& lp, const LpSolution& sol);

enum class MipStatus { kOptimal, kInfeasible, kNodeLimit, kTimeLimit, kUnbounded, kError };

const char* to_string(MipStatus s);

struct MipSolution {
  MipStatus status = MipStatus::kError;
  std::vector<double> x;
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;
  int nodes = 0;

  bool has_incumbent() const { return !x.empty(); }
};

struct MipOptions {
  double integrality_tol = 1e-6;
  double gap_tol = 1e-9;
  long node_limit = 1'000'000;
  double time_limit = 3600.0;
  LpOptions lp;
};

MipSolution solve_mip(const LinearProgram& lp, const std::vector<int>& integer_vars,
                      const MipOptions& opt = {});

}  // namespace ontime
