#include "ontime/lp.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace ontime {
namespace {

TEST(SolveLp, SingleConstraint) {
  LinearProgram lp;
  int r = lp.add_row(RowSense::kGreaterEqual, 3.0);
  lp.add_column(1.0, 0.0, kInf, {{r, 1.0}});
  auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.x[0], 3.0, 1e-9);
  EXPECT_NEAR(sol.duals[0], 1.0, 1e-9);
}

TEST(SolveLp, ContradictoryBoundsGiveRay) {
  LinearProgram lp;
  int r = lp.add_row(RowSense::kLessEqual, -1.0);
  lp.add_column(0.0, 0.0, kInf, {{r, 1.0}});
  auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kInfeasible);
  ASSERT_EQ(sol.farkas.size(), 1u);
  // y <= 0 on a <= row, y*a_j <= 0 for the column at its lower bound, y*b > 0.
  EXPECT_LT(sol.farkas[0], 0.0);
  EXPECT_GT(sol.farkas[0] * -1.0, 0.0);
}

TEST(SolveLp, SetCoverWithUniqueCover) {
  // Three customers, single-customer columns only: value is the cost sum.
  LinearProgram lp;
  std::vector<int> rows;
  for (int i = 0; i < 3; ++i) rows.push_back(lp.add_row(RowSense::kGreaterEqual, 1.0));
  int fleet = lp.add_row(RowSense::kLessEqual, 3.0);
  const double costs[] = {10.0, 14.0, 9.5};
  for (int i = 0; i < 3; ++i) lp.add_column(costs[i], 0.0, kInf, {{rows[i], 1.0}, {fleet, 1.0}});
  auto sol = solve_lp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, 33.5, 1e-9);
}

TEST(SolveLp, Unbounded) {
  LinearProgram lp;
  int r = lp.add_row(RowSense::kGreaterEqual, 1.0);
  lp.add_column(-1.0, 0.0, kInf, {{r, 1.0}});
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kUnbounded);
}

TEST(SolveLp, EqualityAndFreeVariable) {
  // min x + 2y, x - y = 1, x in [0, 4], y free, y >= -0.5 via row.
  LinearProgram lp;
  int e = lp.add_row(RowSense::kEqual, 1.0);
  int g = lp.add_row(RowSense::kGreaterEqual, -0.5);
  lp.add_column(1.0, 0.0, 4.0, {{e, 1.0}});
  lp.add_column(2.0, -kInf, kInf, {{e, -1.0}, {g, 1.0}});
  auto sol = solve_lp(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.x[0], 0.5, 1e-9);
  EXPECT_NEAR(sol.x[1], -0.5, 1e-9);
  EXPECT_NEAR(sol.objective, -0.5, 1e-9);
}

LinearProgram random_lp(std::mt19937& rng, int m, int n) {
  std::uniform_real_distribution<> u(-5, 5);
  std::uniform_int_distribution<> sense(0, 2);
  LinearProgram lp;
  for (int i = 0; i < m; ++i) lp.add_row(static_cast<RowSense>(sense(rng)), u(rng));
  for (int j = 0; j < n; ++j) {
    SparseVec col;
    for (int i = 0; i < m; ++i)
      if (rng() % 2) col.emplace_back(i, std::round(u(rng)));
    lp.add_column(std::abs(u(rng)) + 0.1, 0.0, (rng() % 3 == 0) ? 3.0 : kInf, col);
  }
  return lp;
}

double violation(const LinearProgram& lp, const std::vector<double>& x) {
  std::vector<double> act(lp.num_rows(), 0.0);
  double worst = 0.0;
  for (int j = 0; j < lp.num_cols(); ++j) {
    worst = std::max({worst, lp.lower(j) - x[j], x[j] - lp.upper(j)});
    for (const auto& [i, a] : lp.column(j)) act[i] += a * x[j];
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    const double d = act[i] - lp.rhs(i);
    if (lp.sense(i) == RowSense::kLessEqual) worst = std::max(worst, d);
    if (lp.sense(i) == RowSense::kGreaterEqual) worst = std::max(worst, -d);
    if (lp.sense(i) == RowSense::kEqual) worst = std::max(worst, std::abs(d));
  }
  return worst;
}

TEST(SolveLp, RandomWeakDualityAndCertificates) {
  std::mt19937 rng(11);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto lp = random_lp(rng, 1 + trial % 8, 2 + trial % 11);
    auto sol = solve_lp(lp);
    ASSERT_NE(sol.status, LpStatus::kNumericalFailure);
    ASSERT_NE(sol.status, LpStatus::kIterationLimit);
    if (sol.optimal()) {
      ++optimal;
      EXPECT_LE(violation(lp, sol.x), 1e-6);
      const double dual = dual_objective(lp, sol);
      EXPECT_LE(dual, sol.objective + 1e-6 * (1 + std::abs(sol.objective)));
      EXPECT_GE(dual + 1e-6 * (1 + std::abs(sol.objective)), sol.objective);
      for (int i = 0; i < lp.num_rows(); ++i) {
        if (lp.sense(i) == RowSense::kLessEqual) EXPECT_LE(sol.duals[i], 1e-9);
        if (lp.sense(i) == RowSense::kGreaterEqual) EXPECT_GE(sol.duals[i], -1e-9);
      }
      auto again = solve_lp(lp);
      EXPECT_NEAR(again.objective, sol.objective, 1e-9);
    } else if (sol.status == LpStatus::kInfeasible) {
      ++infeasible;
      // Farkas: max over the box of y'Ax is below y'b.
      const auto& y = sol.farkas;
      double lhs_max = 0.0;
      for (int j = 0; j < lp.num_cols(); ++j) {
        double ya = 0.0;
        for (const auto& [i, a] : lp.column(j)) ya += y[i] * a;
        if (ya > 1e-9) lhs_max += std::isfinite(lp.upper(j)) ? ya * lp.upper(j) : kInf;
        else if (ya < -1e-9) lhs_max += ya * lp.lower(j);
      }
      double yb = 0.0;
      for (int i = 0; i < lp.num_rows(); ++i) {
        yb += y[i] * lp.rhs(i);
        if (lp.sense(i) == RowSense::kLessEqual) EXPECT_LE(y[i], 1e-9);
        if (lp.sense(i) == RowSense::kGreaterEqual) EXPECT_GE(y[i], -1e-9);
      }
      EXPECT_LT(lhs_max, yb);
    }
  }
  EXPECT_GT(optimal, 50);
  EXPECT_GT(infeasible, 10);
}

TEST(SolveLp, WritesLpFormat) {
  LinearProgram lp;
  int r = lp.add_row(RowSense::kLessEqual, 1.0 / 3.0);
  int j = lp.add_column(2.0, 0.0, 1.0, {{r, 1.0}});
  lp.set_name(j, "theta");
  std::ostringstream os;
  lp.write_lp(os);
  EXPECT_NE(os.str().find("0.333333333333"), std::string::npos);
  EXPECT_NE(os.str().find("theta"), std::string::npos);
}

TEST(SolveMip, IntegralRootNeedsNoBranching) {
  LinearProgram lp;
  int r = lp.add_row(RowSense::kGreaterEqual, 2.0);
  lp.add_column(1.0, 0.0, 5.0, {{r, 1.0}});
  auto sol = solve_mip(lp, {0});
  ASSERT_EQ(sol.status, MipStatus::kOptimal);
  EXPECT_EQ(sol.nodes, 0);
  EXPECT_NEAR(sol.objective, 2.0, 1e-9);
}

TEST(SolveMip, TwoCustomerPartition) {
  // Routes {A}, {B}, {A,B} with costs 10, 12, 15.
  LinearProgram lp;
  int a = lp.add_row(RowSense::kEqual, 1.0);
  int b = lp.add_row(RowSense::kEqual, 1.0);
  lp.add_column(10.0, 0.0, 1.0, {{a, 1.0}});
  lp.add_column(12.0, 0.0, 1.0, {{b, 1.0}});
  lp.add_column(15.0, 0.0, 1.0, {{a, 1.0}, {b, 1.0}});
  auto sol = solve_mip(lp, {0, 1, 2});
  ASSERT_EQ(sol.status, MipStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 15.0, 1e-9);
  EXPECT_NEAR(sol.x[2], 1.0, 1e-9);
  EXPECT_EQ(sol.gap, 0.0);
}

TEST(SolveMip, UncoveredCustomerIsInfeasible) {
  LinearProgram lp;
  int a = lp.add_row(RowSense::kEqual, 1.0);
  lp.add_row(RowSense::kEqual, 1.0);
  lp.add_column(10.0, 0.0, 1.0, {{a, 1.0}});
  EXPECT_EQ(solve_mip(lp, {0}).status, MipStatus::kInfeasible);
}

TEST(SolveMip, KnapsackMatchesEnumeration) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 6;
    std::vector<double> w(n), v(n);
    for (int j = 0; j < n; ++j) {
      w[j] = 1 + rng() % 9;
      v[j] = 1 + rng() % 20;
    }
    const double cap = 5 + rng() % 20;
    LinearProgram lp;
    int r = lp.add_row(RowSense::kLessEqual, cap);
    std::vector<int> ints;
    for (int j = 0; j < n; ++j) ints.push_back(lp.add_column(-v[j], 0.0, 1.0, {{r, w[j]}}));
    auto sol = solve_mip(lp, ints);
    double best = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      double ww = 0, vv = 0;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1) { ww += w[j]; vv += v[j]; }
      if (ww <= cap) best = std::max(best, vv);
    }
    ASSERT_EQ(sol.status, MipStatus::kOptimal);
    EXPECT_NEAR(-sol.objective, best, 1e-6);
    auto root = solve_lp(lp);
    EXPECT_GE(sol.objective, root.objective - 1e-9);
  }
}

}  // namespace
}  // namespace ontime
