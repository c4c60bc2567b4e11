#pragma once

// Size-(d+2) agnostic compression for Chebyshev (minimax) regression.
//
// The minimax LP over (eps, a, b) has d+2 variables. At an optimal vertex the
// KKT multipliers are supported on at most d+2 active constraints, and
// keeping only the datapoints behind those constraints leaves the optimum
// unchanged. Selection keeps such a set of support vectors; reconstruction
// re-solves the LP on it and picks a canonical point of its optimal face.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "lincompress/core.hpp"
#include "lincompress/linalg.hpp"
#include "lincompress/lp_solver.hpp"

namespace lincompress {

struct SupportVectorReport {
  std::vector<std::size_t> indices;
  /// +1 where the residual equals +eps, -1 where it equals -eps.
  std::vector<int> sides;
  double eps = 0.0;
};

/// Datapoints whose minimax constraints are active at `solution`, which must
/// be the optimal solve of build_linf_lp(data).
inline SupportVectorReport find_support_vectors(const Dataset& data, const LpSolution& solution) {
  detail::require(solution.optimal(), "find_support_vectors: solution is not optimal");
  detail::require(solution.vertex.size() == data.dim() + 2,
                  "find_support_vectors: solution does not match the data dimension");
  detail::require(solution.duals.size() == 2 * data.size(),
                  "find_support_vectors: solution does not match the sample size");
  SupportVectorReport rep;
  rep.eps = solution.vertex[0];
  std::vector<char> plus(data.size(), 0);
  std::vector<char> minus(data.size(), 0);
  for (std::size_t c : solution.active_set) {
    (c % 2 == 0 ? plus : minus)[c / 2] = 1;
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!plus[i] && !minus[i]) continue;
    rep.indices.push_back(i);
    rep.sides.push_back(plus[i] ? +1 : -1);
  }
  return rep;
}

namespace detail {

inline LpSolution solve_or_throw(const LpProblem& lp, const SolverOptions& opt) {
  LpSolution sol = solve(lp, opt);
  if (!sol.optimal()) {
    throw SolverError("minimax face selection: solver returned " + to_string(sol.status));
  }
  return sol;
}

/// Lexicographically smallest (||a||_1, a_1, ..., a_d) over the models whose
/// residuals on `data` are all at most `eps` in magnitude. Given a, the
/// intercept is the midrange of y - <a, x>, which is the only feasible one
/// when eps is the minimax optimum.
inline LinearModel lex_min_model(const Dataset& data, double eps, const SolverOptions& opt = {}) {
  const std::size_t d = data.dim();
  LinearModel model;
  model.a.assign(d, 0.0);
  if (d > 0) {
    // Variables: a (0..d-1), b (d), t (d+1..2d) with t_j >= |a_j|.
    LpProblem lp(2 * d + 1);
    lp.bounds.assign(2 * d + 1, VariableBounds{});
    for (std::size_t j = 0; j < d; ++j) lp.bounds[d + 1 + j].lower = 0.0;
    for (const auto& pt : data) {
      std::vector<double> row(2 * d + 1, 0.0);
      for (std::size_t j = 0; j < d; ++j) row[j] = pt.x[j];
      row[d] = 1.0;
      lp.add(row, Relation::LessEq, pt.y + eps);
      lp.add(std::move(row), Relation::GreaterEq, pt.y - eps);
    }
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> row(2 * d + 1, 0.0);
      row[d + 1 + j] = 1.0;
      row[j] = -1.0;
      lp.add(row, Relation::GreaterEq, 0.0);
      row[j] = 1.0;
      lp.add(std::move(row), Relation::GreaterEq, 0.0);
    }
    lp.objective.assign(2 * d + 1, 0.0);
    for (std::size_t j = 0; j < d; ++j) lp.objective[d + 1 + j] = 1.0;
    const double norm = solve_or_throw(lp, opt).objective_value;
    std::vector<double> budget(2 * d + 1, 0.0);
    for (std::size_t j = 0; j < d; ++j) budget[d + 1 + j] = 1.0;
    lp.add(std::move(budget), Relation::LessEq, norm);

    for (std::size_t j = 0; j < d; ++j) {
      lp.objective.assign(2 * d + 1, 0.0);
      lp.objective[j] = 1.0;
      const double v = solve_or_throw(lp, opt).vertex[j];
      model.a[j] = v;
      lp.bounds[j] = VariableBounds{v, v};
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& pt : data) {
    const double r = pt.y - predict(model, pt.x);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  model.b = 0.5 * (lo + hi);
  return model;
}

}  // namespace detail

/// Reconstruction: solves the minimax LP on the selected points, then returns
/// the lexicographically smallest (||a||_1, a_1, ..., a_d) on its optimal
/// face. The result depends only on the set of selected points.
inline LinearModel reconstruct_linf(const CompressionSet& cset) {
  detail::require(!cset.selected.empty(), "reconstruct_linf: empty compression set");
  const Dataset sub = Dataset(cset.selected).sorted();
  const LpSolution sol = solve_regression_lp(build_linf_lp(sub));
  return detail::lex_min_model(sub, sol.vertex[0]);
}

struct LinfSelection {
  CompressionSet cset;
  /// An optimal model on the full sample at which every selected point has
  /// residual of magnitude lp_optimum.
  LinearModel model;
  double lp_optimum = 0.0;
  SupportVectorReport support;  // indices refer to the lexicographically sorted sample
};

inline LinfSelection select_linf(const Dataset& data, const SolverOptions& opt = {}) {
  const Dataset sorted = data.sorted();
  const std::size_t d = data.dim();
  const std::size_t m = sorted.size();

  const LpSolution sol = solve_regression_lp(build_linf_lp(sorted), opt);
  LinfSelection out;
  out.cset.loss_kind = LossSpec::linf();
  out.cset.dim = d;
  out.lp_optimum = sol.objective_value;
  out.model = model_from_linf_vertex(sol.vertex, d);
  out.support = find_support_vectors(sorted, sol);
  const double eps = out.lp_optimum;

  double yscale = 1.0;
  for (const auto& pt : sorted) yscale = std::max(yscale, std::abs(pt.y));
  const double tol = 1e-9 * yscale;

  auto rebuild = [&](const std::vector<std::size_t>& idx) {
    CompressionSet c;
    c.dim = d;
    c.loss_kind = LossSpec::linf();
    for (std::size_t i : idx) c.selected.push_back(sorted[i]);
    return reconstruct_linf(c);
  };
  // Index of the largest excess residual over eps, or m when none exceeds tol.
  auto worst_violation = [&](const LinearModel& f) {
    std::size_t worst = m;
    double excess = tol;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = std::abs(residual(f, sorted[i])) - eps;
      if (e > excess) excess = e, worst = i;
    }
    return worst;
  };
  auto optimal_on_full = [&](const std::vector<std::size_t>& idx) {
    return worst_violation(rebuild(idx)) == m;
  };

  // Points carrying a nonzero multiplier come first: they alone certify the
  // optimum. The remaining support vectors extend them, in lexicographic
  // order, to a maximal independent set.
  const auto& sv = out.support.indices;
  auto row_of = [&](std::size_t k) {
    std::vector<double> v = linalg::augmented(sorted[sv[k]].x);
    v.push_back(static_cast<double>(out.support.sides[k]));
    return v;
  };
  std::vector<char> take(sv.size(), 0);
  std::vector<char> seen(sv.size(), 0);
  linalg::IndependenceTracker rows(d + 2);
  double dual_scale = 0.0;
  for (double y : sol.duals) dual_scale = std::max(dual_scale, std::abs(y));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    const double w = std::abs(sol.duals[2 * sv[k]]) + std::abs(sol.duals[2 * sv[k] + 1]);
    if (w > 1e-9 * dual_scale) {
      seen[k] = 1;
      take[k] = rows.try_add(row_of(k)) ? 1 : 0;
    }
  }
  for (std::size_t k = 0; k < sv.size() && !rows.full(); ++k) {
    if (seen[k]) continue;
    take[k] = rows.try_add(row_of(k)) ? 1 : 0;
  }
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < sv.size(); ++k) {
    if (take[k]) chosen.push_back(sv[k]);
  }

  if (!optimal_on_full(chosen)) {
    // Degenerate optimum: the canonical point of the subset's optimal face
    // is not optimal on the full sample. Add violated points until it is,
    // then drop what is not needed.
    for (std::size_t guard = 0; guard < m; ++guard) {
      const std::size_t i = worst_violation(rebuild(chosen));
      if (i == m) break;
      chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), i), i);
    }
    for (std::size_t k = chosen.size(); k-- > 0;) {
      std::vector<std::size_t> fewer = chosen;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(k));
      if (optimal_on_full(fewer)) chosen = std::move(fewer);
    }
    if (chosen.size() > d + 2) {
      const std::size_t n = chosen.size();
      bool found = false;
      for (std::size_t r = 1; r <= d + 2 && !found; ++r) {
        std::vector<char> mask(n, 0);
        std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(r), 1);
        do {
          std::vector<std::size_t> pick;
          for (std::size_t k = 0; k < n; ++k) {
            if (mask[k]) pick.push_back(chosen[k]);
          }
          if (optimal_on_full(pick)) {
            chosen = std::move(pick);
            found = true;
            break;
          }
        } while (std::prev_permutation(mask.begin(), mask.end()));
      }
    }
    out.model = rebuild(chosen);
  }

  for (std::size_t i : chosen) out.cset.selected.push_back(sorted[i]);
  return out;
}

/// Selection: at most d+2 support vectors of the minimax fit, and no bits.
inline CompressionSet compress_linf(const Dataset& data) { return select_linf(data).cset; }

}  // namespace lincompress
