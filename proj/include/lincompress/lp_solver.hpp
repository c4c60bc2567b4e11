#pragma once

// Dense two-phase primal simplex. Returns basic (vertex) solutions together
// with the tight constraints and the dual multipliers, which is what the
// compression schemes consume.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lincompress/core.hpp"

namespace lincompress {

enum class Relation { LessEq, GreaterEq, Equal };

struct LpConstraint {
  std::vector<double> row;
  Relation relation = Relation::LessEq;
  double rhs = 0.0;
};

struct VariableBounds {
  std::optional<double> lower;
  std::optional<double> upper;
};

/// minimize objective . v subject to the constraints and variable bounds.
/// Variables without bounds are free.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<VariableBounds> bounds;  // empty means all free

  explicit LpProblem(std::size_t n = 0) : num_vars(n), objective(n, 0.0) {}

  void add(std::vector<double> row, Relation rel, double rhs) {
    constraints.push_back({std::move(row), rel, rhs});
  }

  void validate() const {
    detail::require(objective.size() == num_vars, "LpProblem: objective length != num_vars");
    detail::require(bounds.empty() || bounds.size() == num_vars,
                    "LpProblem: bounds length != num_vars");
    for (const auto& c : constraints) {
      detail::require(c.row.size() == num_vars, "LpProblem: row length != num_vars");
    }
    for (const auto& bd : bounds) {
      detail::require(!(bd.lower && bd.upper) || *bd.lower <= *bd.upper,
                      "LpProblem: empty variable range");
    }
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> vertex;
  double objective_value = 0.0;
  /// Constraint indices tight at the vertex.
  std::vector<std::size_t> active_set;
  /// Variable indices sitting on one of their bounds.
  std::vector<std::size_t> active_bounds;
  /// One multiplier per constraint: objective = A^T duals + reduced_costs.
  /// Nonnegative for >= rows, nonpositive for <= rows.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

enum class PivotRule {
  /// Lowest-index improving column, lowest-index leaving row on ties.
  Bland,
  /// Most negative reduced cost; drops to Bland after a run of degenerate
  /// pivots and returns to Dantzig after the next strict improvement.
  DantzigWithBlandFallback,
};

struct SolverOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  /// A constraint is active when |row.v - rhs| <= active_rel_tol * max(1, |rhs|).
  double active_rel_tol = 1e-7;
  double pivot_tol = 1e-9;
  PivotRule rule = PivotRule::Bland;
  std::size_t degenerate_streak = 25;
  std::size_t max_iterations = 0;  // 0: derived from the problem size
};

namespace detail {

/// Dense tableau in standard form: rows are B^-1 [A | b], plus a separate
/// reduced-cost row. Every column is nonnegative.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), cost_row_(cols + 1, 0.0),
        basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  double& reduced(std::size_t c) { return cost_row_[c]; }
  double reduced(std::size_t c) const { return cost_row_[c]; }
  /// Negated objective value of the current basis.
  double& neg_objective() { return cost_row_[cols_]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void set_costs(const std::vector<double>& cost) {
    for (std::size_t c = 0; c <= cols_; ++c) cost_row_[c] = c < cols_ ? cost[c] : 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &data_[r * (cols_ + 1)];
      for (std::size_t c = 0; c <= cols_; ++c) cost_row_[c] -= cb * row[c];
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t width = cols_ + 1;
    double* prow = &data_[pr * width];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < width; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    // Only columns with a nonzero pivot-row entry change.
    nz_.clear();
    for (std::size_t c = 0; c < width; ++c) {
      if (prow[c] != 0.0) nz_.push_back(c);
    }
    auto eliminate = [&](double* row) {
      const double f = row[pc];
      if (f == 0.0) return;
      for (std::size_t c : nz_) row[c] -= f * prow[c];
      row[pc] = 0.0;
    };
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r != pr) eliminate(&data_[r * width]);
    }
    eliminate(cost_row_.data());
    basis_[pr] = pc;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<double> cost_row_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
};

enum class PhaseResult { Optimal, Unbounded };

/// Runs simplex iterations until no eligible column improves the cost row.
inline PhaseResult run_phase(Tableau& t, const std::vector<char>& may_enter,
                             const SolverOptions& opt, std::size_t& iterations,
                             std::size_t max_iterations) {
  bool bland = opt.rule == PivotRule::Bland;
  std::size_t degenerate_run = 0;
  for (;;) {
    std::size_t enter = t.cols();
    double best = -opt.optimality_tol;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (!may_enter[c]) continue;
      const double d = t.reduced(c);
      if (d < best) {
        enter = c;
        if (bland) break;
        best = d;
      }
    }
    if (enter == t.cols()) return PhaseResult::Optimal;

    std::size_t leave = t.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= opt.pivot_tol) continue;
      const double ratio = std::max(t.rhs(r), 0.0) / a;
      if (leave == t.rows() || ratio < best_ratio - 1e-12) {
        leave = r;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-12 && t.basis()[r] < t.basis()[leave]) {
        leave = r;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    if (leave == t.rows()) return PhaseResult::Unbounded;

    const bool degenerate = best_ratio <= opt.feasibility_tol;
    t.pivot(leave, enter);
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (t.rhs(r) < 0.0 && t.rhs(r) > -opt.feasibility_tol) t.rhs(r) = 0.0;
    }
    if (++iterations > max_iterations) {
      throw SolverError("simplex: iteration limit exceeded");
    }
    if (opt.rule == PivotRule::DantzigWithBlandFallback) {
      if (degenerate) {
        if (++degenerate_run >= opt.degenerate_streak) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }
}

}  // namespace detail

/// Solves the LP and returns an optimal basic feasible solution, or reports
/// infeasibility / unboundedness through the status field.
inline LpSolution solve(const LpProblem& lp, const SolverOptions& opt = {}) {
  lp.validate();
  const std::size_t n = lp.num_vars;

  // Map each original variable onto nonnegative standard-form columns:
  //   lower bound l:        v = l + s
  //   only upper bound u:   v = u - s
  //   free:                 v = s+ - s-
  // A finite upper bound next to a finite lower bound becomes an extra row.
  struct VarMap {
    std::size_t col;
    double sign;
    double offset;
    bool split;
  };
  std::vector<VarMap> vmap(n);
  std::size_t struct_cols = 0;
  std::vector<std::pair<std::size_t, double>> range_rows;  // (var, u - l)
  for (std::size_t j = 0; j < n; ++j) {
    const VariableBounds bd = lp.bounds.empty() ? VariableBounds{} : lp.bounds[j];
    if (bd.lower) {
      vmap[j] = {struct_cols++, 1.0, *bd.lower, false};
      if (bd.upper) range_rows.emplace_back(j, *bd.upper - *bd.lower);
    } else if (bd.upper) {
      vmap[j] = {struct_cols++, -1.0, *bd.upper, false};
    } else {
      vmap[j] = {struct_cols, 1.0, 0.0, true};
      struct_cols += 2;
    }
  }

  const std::size_t n_orig_rows = lp.constraints.size();
  const std::size_t n_rows = n_orig_rows + range_rows.size();

  // Row data in structural columns, normalized to rhs >= 0.
  struct StdRow {
    std::vector<double> coef;
    Relation rel;
    double rhs;
    double flip;
  };
  std::vector<StdRow> rows;
  rows.reserve(n_rows);
  for (const auto& c : lp.constraints) {
    StdRow r{std::vector<double>(struct_cols, 0.0), c.relation, c.rhs, 1.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = c.row[j];
      if (a == 0.0) continue;
      r.rhs -= a * vmap[j].offset;
      r.coef[vmap[j].col] += a * vmap[j].sign;
      if (vmap[j].split) r.coef[vmap[j].col + 1] -= a;
    }
    rows.push_back(std::move(r));
  }
  for (const auto& [j, width] : range_rows) {
    StdRow r{std::vector<double>(struct_cols, 0.0), Relation::LessEq, width, 1.0};
    r.coef[vmap[j].col] = 1.0;
    rows.push_back(std::move(r));
  }
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      r.flip = -1.0;
      r.rhs = -r.rhs;
      for (double& v : r.coef) v = -v;
      if (r.rel == Relation::LessEq) {
        r.rel = Relation::GreaterEq;
      } else if (r.rel == Relation::GreaterEq) {
        r.rel = Relation::LessEq;
      }
    }
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEq) ++n_art;
  }

  const std::size_t slack0 = struct_cols;
  const std::size_t art0 = slack0 + n_slack;
  const std::size_t total_cols = art0 + n_art;
  detail::Tableau t(n_rows, total_cols);

  // Column holding +-B^-1 e_r for each row: the slack of a <= row, the
  // artificial of a >= or = row.
  std::vector<std::size_t> unit_col(n_rows);
  {
    std::size_t s = slack0;
    std::size_t a = art0;
    for (std::size_t r = 0; r < n_rows; ++r) {
      for (std::size_t c = 0; c < struct_cols; ++c) t.at(r, c) = rows[r].coef[c];
      t.rhs(r) = rows[r].rhs;
      switch (rows[r].rel) {
        case Relation::LessEq:
          t.at(r, s) = 1.0;
          unit_col[r] = s;
          t.basis()[r] = s++;
          break;
        case Relation::GreaterEq:
          t.at(r, s++) = -1.0;
          t.at(r, a) = 1.0;
          unit_col[r] = a;
          t.basis()[r] = a++;
          break;
        case Relation::Equal:
          t.at(r, a) = 1.0;
          unit_col[r] = a;
          t.basis()[r] = a++;
          break;
      }
    }
  }

  std::size_t max_iter = opt.max_iterations;
  if (max_iter == 0) max_iter = 200 * (n_rows + total_cols) + 1000;

  LpSolution sol;
  std::vector<char> may_enter(total_cols, 1);
  for (std::size_t c = art0; c < total_cols; ++c) may_enter[c] = 0;

  if (n_art > 0) {
    std::vector<double> phase1(total_cols, 0.0);
    for (std::size_t c = art0; c < total_cols; ++c) phase1[c] = 1.0;
    t.set_costs(phase1);
    detail::run_phase(t, may_enter, opt, sol.iterations, max_iter);
    double rhs_scale = 1.0;
    for (const auto& r : rows) rhs_scale = std::max(rhs_scale, r.rhs);
    if (-t.neg_objective() > opt.feasibility_tol * rhs_scale) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (t.basis()[r] < art0) continue;
      std::size_t best = total_cols;
      double best_abs = opt.pivot_tol;
      for (std::size_t c = 0; c < art0; ++c) {
        if (std::abs(t.at(r, c)) > best_abs) {
          best_abs = std::abs(t.at(r, c));
          best = c;
        }
      }
      if (best < total_cols) t.pivot(r, best);
      t.rhs(r) = std::max(t.rhs(r), 0.0);
    }
  }

  std::vector<double> cost(total_cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = lp.objective[j];
    cost[vmap[j].col] += c * vmap[j].sign;
    if (vmap[j].split) cost[vmap[j].col + 1] -= c;
  }
  t.set_costs(cost);
  if (detail::run_phase(t, may_enter, opt, sol.iterations, max_iter) ==
      detail::PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  std::vector<double> xs(total_cols, 0.0);
  for (std::size_t r = 0; r < n_rows; ++r) xs[t.basis()[r]] = std::max(t.rhs(r), 0.0);

  sol.status = LpStatus::Optimal;
  sol.vertex.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = vmap[j].offset + vmap[j].sign * xs[vmap[j].col];
    if (vmap[j].split) v -= xs[vmap[j].col + 1];
    sol.vertex[j] = v;
  }
  sol.objective_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective_value += lp.objective[j] * sol.vertex[j];

  // y = c_B B^-1, read off the columns that started as identity columns.
  std::vector<double> y(n_rows, 0.0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n_rows; ++k) acc += cost[t.basis()[k]] * t.at(k, unit_col[r]);
    y[r] = acc * rows[r].flip;
  }
  sol.duals.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_orig_rows));
  sol.reduced_costs = lp.objective;
  for (std::size_t i = 0; i < n_orig_rows; ++i) {
    const auto& row = lp.constraints[i].row;
    for (std::size_t j = 0; j < n; ++j) sol.reduced_costs[j] -= sol.duals[i] * row[j];
  }

  for (std::size_t i = 0; i < n_orig_rows; ++i) {
    const auto& c = lp.constraints[i];
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) lhs += c.row[j] * sol.vertex[j];
    if (std::abs(lhs - c.rhs) <= opt.active_rel_tol * std::max(1.0, std::abs(c.rhs))) {
      sol.active_set.push_back(i);
    } else {
      sol.duals[i] = 0.0;
    }
  }
  if (!lp.bounds.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& bd = lp.bounds[j];
      const double v = sol.vertex[j];
      auto tight = [&](double bound) {
        return std::abs(v - bound) <= opt.active_rel_tol * std::max(1.0, std::abs(bound));
      };
      if ((bd.lower && tight(*bd.lower)) || (bd.upper && tight(*bd.upper))) {
        sol.active_bounds.push_back(j);
      }
    }
  }
  return sol;
}

/// Least-absolute-deviations program over (eps_1..eps_m, a, b):
///   minimize sum eps_i  s.t.  <a,x_i> + b - y_i <= eps_i,  -<a,x_i> - b + y_i <= eps_i.
/// eps_i >= 0 is implied by the two rows and left out. Constraint 2i is the
/// upper row of point i, 2i+1 the lower row.
inline LpProblem build_l1_lp(const Dataset& data) {
  const std::size_t m = data.size();
  const std::size_t d = data.dim();
  LpProblem lp(m + d + 1);
  for (std::size_t i = 0; i < m; ++i) lp.objective[i] = 1.0;
  lp.constraints.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& pt = data[i];
    std::vector<double> up(m + d + 1, 0.0);
    up[i] = -1.0;
    for (std::size_t j = 0; j < d; ++j) up[m + j] = pt.x[j];
    up[m + d] = 1.0;
    std::vector<double> down = up;
    for (std::size_t j = m; j < m + d + 1; ++j) down[j] = -down[j];
    lp.add(std::move(up), Relation::LessEq, pt.y);
    lp.add(std::move(down), Relation::LessEq, -pt.y);
  }
  return lp;
}

/// Chebyshev program over (eps, a, b):
///   minimize eps  s.t.  eps - <a,x_i> - b + y_i >= 0,  eps + <a,x_i> + b - y_i >= 0.
/// Constraint 2i is tight when the residual of point i equals +eps, 2i+1
/// when it equals -eps.
inline LpProblem build_linf_lp(const Dataset& data) {
  const std::size_t m = data.size();
  const std::size_t d = data.dim();
  LpProblem lp(d + 2);
  lp.objective[0] = 1.0;
  lp.constraints.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& pt = data[i];
    std::vector<double> plus(d + 2, 0.0);
    plus[0] = 1.0;
    for (std::size_t j = 0; j < d; ++j) plus[1 + j] = -pt.x[j];
    plus[d + 1] = -1.0;
    std::vector<double> minus(d + 2, 0.0);
    minus[0] = 1.0;
    for (std::size_t j = 0; j < d; ++j) minus[1 + j] = pt.x[j];
    minus[d + 1] = 1.0;
    lp.add(std::move(plus), Relation::GreaterEq, -pt.y);
    lp.add(std::move(minus), Relation::GreaterEq, pt.y);
  }
  return lp;
}

/// Splits the (a, b) part out of an LP vertex.
inline LinearModel model_from_l1_vertex(const std::vector<double>& vertex, std::size_t m,
                                        std::size_t d) {
  LinearModel model;
  model.a.assign(vertex.begin() + static_cast<std::ptrdiff_t>(m),
                 vertex.begin() + static_cast<std::ptrdiff_t>(m + d));
  model.b = vertex[m + d];
  return model;
}

inline LinearModel model_from_linf_vertex(const std::vector<double>& vertex, std::size_t d) {
  LinearModel model;
  model.a.assign(vertex.begin() + 1, vertex.begin() + 1 + static_cast<std::ptrdiff_t>(d));
  model.b = vertex[d + 1];
  return model;
}

/// Solves one of the regression programs above. Those are always feasible
/// and bounded below by zero, so any other status is a SolverError.
inline LpSolution solve_regression_lp(const LpProblem& lp, const SolverOptions& opt = {}) {
  LpSolution sol = solve(lp, opt);
  if (!sol.optimal()) {
    throw SolverError("regression LP reported " + to_string(sol.status));
  }
  bool finite = std::isfinite(sol.objective_value);
  for (double v : sol.vertex) finite = finite && std::isfinite(v);
  if (!finite) throw SolverError("regression LP overflowed (non-finite solution)");
  return sol;
}

}  // namespace lincompress
