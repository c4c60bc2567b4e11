#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

#include "lincompress/lp_solver.hpp"
#include "test_support.hpp"

using namespace lincompress;
using lincompress::testing::make_1d;

namespace {

LpProblem single_var(double c) {
  LpProblem lp(1);
  lp.objective = {c};
  return lp;
}

double dot(const std::vector<double>& u, const std::vector<double>& v) {
  double t = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) t += u[i] * v[i];
  return t;
}

// c = A^T y + r, signs of y by relation, complementary slackness, and
// c.v = y.rhs + r.v.
void expect_kkt(const LpProblem& lp, const LpSolution& sol, double tol = 1e-7) {
  ASSERT_TRUE(sol.optimal());
  std::vector<double> r = lp.objective;
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    for (std::size_t j = 0; j < lp.num_vars; ++j) r[j] -= sol.duals[i] * c.row[j];
    dual_obj += sol.duals[i] * c.rhs;
    if (c.relation == Relation::LessEq) EXPECT_LE(sol.duals[i], tol);
    if (c.relation == Relation::GreaterEq) EXPECT_GE(sol.duals[i], -tol);
    const bool active =
        std::find(sol.active_set.begin(), sol.active_set.end(), i) != sol.active_set.end();
    if (!active) EXPECT_EQ(sol.duals[i], 0.0);
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    EXPECT_NEAR(r[j], sol.reduced_costs[j], tol);
    const VariableBounds bd = lp.bounds.empty() ? VariableBounds{} : lp.bounds[j];
    const double v = sol.vertex[j];
    const bool at_lo = bd.lower && std::abs(v - *bd.lower) <= 1e-7;
    const bool at_hi = bd.upper && std::abs(v - *bd.upper) <= 1e-7;
    if (!at_lo && !at_hi) EXPECT_NEAR(r[j], 0.0, tol);
    if (at_lo && !at_hi) EXPECT_GE(r[j], -tol);
    if (at_hi && !at_lo) EXPECT_LE(r[j], tol);
    dual_obj += r[j] * v;
  }
  EXPECT_NEAR(dot(lp.objective, sol.vertex), dual_obj, tol * std::max(1.0, std::abs(dual_obj)));
  EXPECT_NEAR(sol.objective_value, dot(lp.objective, sol.vertex), 1e-12);
}

}  // namespace

TEST(Solve, SingleTightBound) {
  LpProblem lp = single_var(1.0);
  lp.add({1.0}, Relation::GreaterEq, 3.0);
  const LpSolution sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.vertex[0], 3.0, 1e-12);
  EXPECT_NEAR(sol.objective_value, 3.0, 1e-12);
  EXPECT_EQ(sol.active_set, std::vector<std::size_t>{0});
  EXPECT_NEAR(sol.duals[0], 1.0, 1e-12);
}

TEST(Solve, Infeasible) {
  LpProblem lp = single_var(1.0);
  lp.add({1.0}, Relation::GreaterEq, 1.0);
  lp.add({1.0}, Relation::LessEq, 0.0);
  EXPECT_EQ(solve(lp).status, LpStatus::Infeasible);
}

TEST(Solve, Unbounded) {
  EXPECT_EQ(solve(single_var(1.0)).status, LpStatus::Unbounded);
  LpProblem lp = single_var(-1.0);
  lp.add({1.0}, Relation::GreaterEq, 0.0);
  EXPECT_EQ(solve(lp).status, LpStatus::Unbounded);
}

TEST(Solve, DimensionMismatchIsContractViolation) {
  LpProblem lp = single_var(1.0);
  lp.add({1.0, 2.0}, Relation::GreaterEq, 0.0);
  EXPECT_THROW(solve(lp), ContractViolation);
}

TEST(Solve, EqualitiesAndRedundantRows) {
  LpProblem lp(2);
  lp.objective = {1.0, 0.0};
  lp.bounds = {{0.0, {}}, {0.0, {}}};
  lp.add({1.0, 1.0}, Relation::Equal, 1.0);
  lp.add({2.0, 2.0}, Relation::Equal, 2.0);
  const LpSolution sol = solve(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.vertex[0], 0.0, 1e-12);
  EXPECT_NEAR(sol.vertex[1], 1.0, 1e-12);
  expect_kkt(lp, sol);
}

TEST(Solve, BoxBounds) {
  LpProblem lp(2);
  lp.objective = {-1.0, -1.0};
  lp.bounds = {{{}, 3.0}, {1.0, 2.0}};
  lp.add({1.0, -1.0}, Relation::LessEq, 10.0);
  const LpSolution sol = solve(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.vertex[0], 3.0, 1e-12);
  EXPECT_NEAR(sol.vertex[1], 2.0, 1e-12);
  EXPECT_NEAR(sol.objective_value, -5.0, 1e-12);
  EXPECT_EQ(sol.active_bounds.size(), 2u);
  expect_kkt(lp, sol);
}

// Beale's example cycles under the textbook largest-coefficient rule.
TEST(Solve, BealeCyclingExampleTerminates) {
  for (PivotRule rule : {PivotRule::Bland, PivotRule::DantzigWithBlandFallback}) {
    LpProblem lp(4);
    lp.objective = {-0.75, 20.0, -0.5, 6.0};
    lp.bounds.assign(4, VariableBounds{0.0, {}});
    lp.add({0.25, -8.0, -1.0, 9.0}, Relation::LessEq, 0.0);
    lp.add({0.5, -12.0, -0.5, 3.0}, Relation::LessEq, 0.0);
    lp.add({0.0, 0.0, 1.0, 0.0}, Relation::LessEq, 1.0);
    SolverOptions opt;
    opt.rule = rule;
    const LpSolution sol = solve(lp, opt);
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective_value, -1.25, 1e-12);
    expect_kkt(lp, sol);
  }
}

TEST(Solve, RandomBoundedProgramsSatisfyVertexAndKkt) {
  std::mt19937_64 rng(lincompress::testing::kSuiteSeed);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const std::size_t rows = 1 + trial % 9;
    LpProblem lp(n);
    for (double& c : lp.objective) c = g(rng);
    lp.bounds.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j % 3 == 0) lp.bounds[j] = {-2.0, 2.0};
      if (j % 3 == 1) lp.bounds[j] = {{}, 1.5};
      if (j % 3 == 2) lp.bounds[j] = {-1.0, 5.0};
    }
    // Feasible by construction around a random point.
    std::vector<double> x0(n);
    for (double& v : x0) v = 0.2 * g(rng);
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<double> row(n);
      for (double& v : row) v = g(rng);
      const double lhs = dot(row, x0);
      const Relation rel = i % 3 == 0 ? Relation::LessEq : (i % 3 == 1 ? Relation::GreaterEq : Relation::Equal);
      const double rhs = rel == Relation::LessEq ? lhs + 0.5 : (rel == Relation::GreaterEq ? lhs - 0.5 : lhs);
      lp.add(std::move(row), rel, rhs);
    }
    // Upper-only variables still need a floor for boundedness.
    for (std::size_t j = 1; j < n; j += 3) {
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      lp.add(std::move(row), Relation::GreaterEq, -4.0);
    }
    for (PivotRule rule : {PivotRule::Bland, PivotRule::DantzigWithBlandFallback}) {
      SolverOptions opt;
      opt.rule = rule;
      const LpSolution sol = solve(lp, opt);
      ASSERT_TRUE(sol.optimal()) << "trial " << trial;
      EXPECT_GE(sol.active_set.size() + sol.active_bounds.size(), n) << "trial " << trial;
      for (std::size_t i : sol.active_set) {
        const auto& c = lp.constraints[i];
        EXPECT_LE(std::abs(dot(c.row, sol.vertex) - c.rhs), 1e-7 * std::max(1.0, std::abs(c.rhs)));
      }
      expect_kkt(lp, sol);
    }
  }
}

TEST(BuildL1Lp, Shape) {
  const Dataset s = make_1d({{0, 0}, {1, 1}, {2, 0}});
  const LpProblem lp = build_l1_lp(s);
  EXPECT_EQ(lp.num_vars, 3u + 1u + 1u);
  EXPECT_EQ(lp.constraints.size(), 6u);
  EXPECT_TRUE(lp.bounds.empty());
}

TEST(BuildL1Lp, TwoPointsGiveZeroErrorLine) {
  const Dataset s = make_1d({{0, 0}, {1, 1}});
  const LpSolution sol = solve(build_l1_lp(s));
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective_value, 0.0, 1e-12);
  EXPECT_NEAR(sol.vertex[0], 0.0, 1e-12);
  EXPECT_NEAR(sol.vertex[1], 0.0, 1e-12);
  const LinearModel f = model_from_l1_vertex(sol.vertex, 2, 1);
  EXPECT_NEAR(f.a[0], 1.0, 1e-12);
  EXPECT_NEAR(f.b, 0.0, 1e-12);
  EXPECT_EQ(evaluate_loss(f, s, LossSpec::l1()), 0.0);
}

TEST(BuildL1Lp, SinglePointRealizable) {
  EXPECT_NEAR(solve(build_l1_lp(make_1d({{0, 5}}))).objective_value, 0.0, 1e-12);
}

TEST(BuildL1Lp, ThreePointsMatchPairOracle) {
  const Dataset s = make_1d({{0, 0}, {1, 1}, {2, 0}});
  const double oracle = lincompress::testing::pair_lines_l1(s);
  ASSERT_DOUBLE_EQ(oracle, 1.0);
  EXPECT_NEAR(solve(build_l1_lp(s)).objective_value, oracle, 1e-12);
}

TEST(BuildL1Lp, ZeroDimensionalMedian) {
  const std::vector<double> ys{1, 2, 5};
  double argmin = 0.0;
  const double oracle = lincompress::testing::grid_scan_constant_l1(ys, 0.0, 6.0, 6000, &argmin);
  ASSERT_NEAR(oracle, 4.0, 1e-9);
  ASSERT_NEAR(argmin, 2.0, 1e-9);
  const LpSolution sol = solve(build_l1_lp(Dataset::from_labels(ys)));
  EXPECT_NEAR(sol.objective_value, oracle, 1e-12);
  EXPECT_NEAR(sol.vertex.back(), 2.0, 1e-12);
}

TEST(BuildLinfLp, Examples) {
  {
    const LpSolution sol = solve(build_linf_lp(make_1d({{0, 0}, {1, 1}})));
    EXPECT_NEAR(sol.vertex[0], 0.0, 1e-12);
    EXPECT_NEAR(sol.vertex[1], 1.0, 1e-12);
    EXPECT_NEAR(sol.vertex[2], 0.0, 1e-12);
  }
  {
    // Equioscillation: a x_k + b - y_k = s_k eps with s = (+, -, +).
    Eigen::Matrix3d sys;
    sys << 0, 1, -1, 1, 1, 1, 2, 1, -1;
    const Eigen::Vector3d z = sys.lu().solve(Eigen::Vector3d(0, 1, 0));
    const LpSolution sol = solve(build_linf_lp(make_1d({{0, 0}, {1, 1}, {2, 0}})));
    EXPECT_NEAR(sol.vertex[0], z(2), 1e-12);
    EXPECT_NEAR(sol.vertex[1], z(0), 1e-12);
    EXPECT_NEAR(sol.vertex[2], z(1), 1e-12);
    EXPECT_NEAR(sol.vertex[0], 0.5, 1e-12);
  }
  {
    const LpSolution sol = solve(build_linf_lp(Dataset::from_labels(std::vector<double>{0, 4})));
    EXPECT_NEAR(sol.vertex[0], 2.0, 1e-12);
    EXPECT_NEAR(sol.vertex[1], 2.0, 1e-12);
  }
}

TEST(RegressionLps, PropertiesOnRandomSamples) {
  std::mt19937_64 rng(lincompress::testing::kSuiteSeed + 1);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t d = trial % 4;
    const std::size_t m = d + 2 + trial % 25;
    const Dataset s = lincompress::testing::random_uniform(rng, m, d);

    const LpProblem l1 = build_l1_lp(s);
    const LpSolution a = solve(l1);
    ASSERT_TRUE(a.optimal());
    EXPECT_GE(a.active_set.size(), l1.num_vars);
    expect_kkt(l1, a);
    const LinearModel fa = model_from_l1_vertex(a.vertex, m, d);
    EXPECT_NEAR(a.objective_value / static_cast<double>(m), evaluate_loss(fa, s, LossSpec::l1()), 1e-8);

    const LpProblem li = build_linf_lp(s);
    const LpSolution b = solve(li);
    ASSERT_TRUE(b.optimal());
    EXPECT_GE(b.active_set.size(), li.num_vars);
    expect_kkt(li, b);
    const LinearModel fb = model_from_linf_vertex(b.vertex, d);
    EXPECT_NEAR(b.objective_value, evaluate_loss(fb, s, LossSpec::linf()), 1e-8);

    // Deleting a point relaxes both programs.
    std::vector<std::size_t> keep;
    for (std::size_t i = 1; i < m; ++i) keep.push_back(i);
    const Dataset smaller = s.subset(keep);
    EXPECT_LE(solve(build_l1_lp(smaller)).objective_value, a.objective_value + 1e-9);
    EXPECT_LE(solve(build_linf_lp(smaller)).objective_value, b.objective_value + 1e-9);
  }
}
