#pragma once

// Size-(d+1) agnostic compression for least-absolute-deviations regression.
//
// Selection solves the LAD linear program, then moves the optimal hyperplane
// without increasing the loss until it passes through d+1 affinely
// independent datapoints, and keeps those points. Reconstruction fits the
// hyperplane through them.
//
// Every move relies on the same fact: while the sets of points strictly
// above and strictly below the hyperplane stay fixed, the summed loss is an
// affine function of (a, b), so along any segment it is minimized at an
// endpoint, which is where a new datapoint becomes incident.

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "lincompress/core.hpp"
#include "lincompress/linalg.hpp"
#include "lincompress/lp_solver.hpp"

namespace lincompress {

/// Coefficients of the summed l1 loss as an affine function of (a, b),
/// valid while the above/below partition is fixed:
///   L(a, b) = <lambda, a> + mu * b + nu.
struct AffineLoss {
  std::vector<double> lambda;
  double mu = 0.0;
  double nu = 0.0;

  double at(const LinearModel& model) const {
    double v = mu * model.b + nu;
    for (std::size_t j = 0; j < lambda.size(); ++j) v += lambda[j] * model.a[j];
    return v;
  }
};

struct RefinementState {
  LinearModel model;
  std::vector<std::size_t> incident;  // zero residual within tolerance
  std::vector<std::size_t> above;     // <a, x_i> + b < y_i
  std::vector<std::size_t> below;     // <a, x_i> + b > y_i
  AffineLoss affine_coeffs;

  /// Summed (unnormalized) loss from the affine form.
  double loss() const { return affine_coeffs.at(model); }
};

namespace detail {

inline double incidence_tol(double y) { return 1e-7 * std::max(1.0, std::abs(y)); }

inline double summed_l1(const LinearModel& model, const Dataset& data) {
  double total = 0.0;
  for (const auto& pt : data) total += std::abs(residual(model, pt));
  return total;
}

}  // namespace detail

/// Partitions the sample relative to `model` and records the affine loss form.
inline RefinementState make_refinement_state(const LinearModel& model, const Dataset& data) {
  detail::require(model.dim() == data.dim(), "make_refinement_state: dimension mismatch");
  RefinementState st;
  st.model = model;
  st.affine_coeffs.lambda.assign(data.dim(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& pt = data[i];
    const double r = residual(model, pt);
    if (std::abs(r) <= detail::incidence_tol(pt.y)) {
      st.incident.push_back(i);
    } else if (r < 0.0) {
      st.above.push_back(i);
      for (std::size_t j = 0; j < data.dim(); ++j) st.affine_coeffs.lambda[j] -= pt.x[j];
      st.affine_coeffs.mu -= 1.0;
      st.affine_coeffs.nu += pt.y;
    } else {
      st.below.push_back(i);
      for (std::size_t j = 0; j < data.dim(); ++j) st.affine_coeffs.lambda[j] += pt.x[j];
      st.affine_coeffs.mu += 1.0;
      st.affine_coeffs.nu -= pt.y;
    }
  }
  return st;
}

/// Moves the intercept to the nearest value at which the hyperplane touches
/// a datapoint, on the side where the affine loss does not increase (the
/// lower intercept on ties). Identity when a point is already incident.
inline RefinementState shift_intercept(const RefinementState& state, const Dataset& data) {
  if (!state.incident.empty()) return state;
  // Distances to the nearest touching intercept above and below.
  double up = std::numeric_limits<double>::infinity();
  double down = std::numeric_limits<double>::infinity();
  for (std::size_t i : state.above) up = std::min(up, -residual(state.model, data[i]));
  for (std::size_t i : state.below) down = std::min(down, residual(state.model, data[i]));

  const double mu = state.affine_coeffs.mu;
  LinearModel next = state.model;
  if (std::isfinite(down) && (mu >= 0.0 || !std::isfinite(up))) {
    next.b -= down;
  } else {
    next.b += up;
  }
#ifndef NDEBUG
  {
    LinearModel lo = state.model;
    lo.b -= down;
    LinearModel hi = state.model;
    hi.b += up;
    const double chosen = detail::summed_l1(next, data);
    const double other = (next.b == lo.b) ? detail::summed_l1(hi, data) : detail::summed_l1(lo, data);
    assert(!std::isfinite(other) || chosen <= other + 1e-9 * std::max(1.0, other));
  }
#endif
  return make_refinement_state(next, data);
}

/// Moves coordinate j of the slope, compensating along the directions that
/// keep every incident point incident (a rotation about the pinned points),
/// to the endpoint of the current partition cell where a new, affinely
/// independent datapoint becomes incident. The endpoint is chosen from the
/// sign of the affine loss slope along the move (the decreasing end of a(j)
/// on ties). Returns the state unchanged when the incident points already
/// determine a(j) or no datapoint can be reached.
inline RefinementState pin_coordinate(const RefinementState& state, const Dataset& data,
                                      std::size_t j) {
  const std::size_t d = data.dim();
  detail::require(j < d, "pin_coordinate: coordinate out of range");
  detail::require(!state.incident.empty(), "pin_coordinate: needs an incident point");

  linalg::IndependenceTracker pinned(d + 1);
  for (std::size_t i : state.incident) pinned.try_add(linalg::augmented(data[i].x));
  if (pinned.full()) return state;

  std::vector<double> unit(d + 1, 0.0);
  unit[j] = 1.0;
  Eigen::VectorXd dir = pinned.project_out(unit);
  if (dir(static_cast<Eigen::Index>(j)) <= 1e-10) return state;
  dir /= dir(static_cast<Eigen::Index>(j));

  // Residual of point k along the move: r_k + t * g_k.
  double t_up = std::numeric_limits<double>::infinity();
  double t_down = -std::numeric_limits<double>::infinity();
  double slope = 0.0;
  auto scan = [&](std::size_t k, double sign) {
    const auto& pt = data[k];
    double g = dir(static_cast<Eigen::Index>(d));
    double gscale = std::abs(g);
    for (std::size_t c = 0; c < d; ++c) {
      g += dir(static_cast<Eigen::Index>(c)) * pt.x[c];
      gscale += std::abs(dir(static_cast<Eigen::Index>(c)) * pt.x[c]);
    }
    slope += sign * g;
    if (std::abs(g) <= 1e-12 * std::max(1.0, gscale)) return;
    const double t = -residual(state.model, pt) / g;
    if (t > 0.0) {
      t_up = std::min(t_up, t);
    } else {
      t_down = std::max(t_down, t);
    }
  };
  for (std::size_t k : state.below) scan(k, +1.0);
  for (std::size_t k : state.above) scan(k, -1.0);

  double t = 0.0;
  const double slope_tol = 1e-9 * std::max(1.0, std::abs(slope));
  if (slope < -slope_tol && std::isfinite(t_up)) {
    t = t_up;
  } else if (slope > slope_tol && std::isfinite(t_down)) {
    t = t_down;
  } else if (std::abs(slope) <= slope_tol) {
    t = std::isfinite(t_down) ? t_down : (std::isfinite(t_up) ? t_up : 0.0);
  }
  if (t == 0.0) return state;

  LinearModel next = state.model;
  for (std::size_t c = 0; c < d; ++c) next.a[c] += t * dir(static_cast<Eigen::Index>(c));
  next.b += t * dir(static_cast<Eigen::Index>(d));
  RefinementState out = make_refinement_state(next, data);
  assert(out.incident.size() > state.incident.size());
  return out;
}

/// Runs the refinement from an optimal model until d+1 affinely independent
/// points are incident, or no coordinate can make progress.
inline RefinementState refine_to_incident_basis(const LinearModel& optimal, const Dataset& data) {
  RefinementState st = shift_intercept(make_refinement_state(optimal, data), data);
  const std::size_t d = data.dim();
  // Coordinates are visited in index order; a later pin can unlock an earlier
  // coordinate, so passes repeat until nothing changes.
  for (std::size_t pass = 0; pass <= d; ++pass) {
    bool progressed = false;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t before = st.incident.size();
      st = pin_coordinate(st, data, j);
      progressed = progressed || st.incident.size() > before;
    }
    if (!progressed) break;
  }
  return st;
}

namespace detail {

/// Lower median point in lexicographic order: smallest index in `sorted`
/// (which must be lex-ordered) whose label is the smaller middle value.
inline std::size_t lower_median_index(const Dataset& sorted) {
  std::vector<double> ys;
  ys.reserve(sorted.size());
  for (const auto& p : sorted) ys.push_back(p.y);
  std::vector<double> tmp = ys;
  const std::size_t mid = (tmp.size() - 1) / 2;
  std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid), tmp.end());
  const double med = tmp[mid];
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] == med) return i;
  }
  return 0;
}

}  // namespace detail

/// Detailed selection output, for callers that want the LP optimum and the
/// fitted model alongside the compression set.
struct L1Selection {
  CompressionSet cset;
  LinearModel model;
  double lp_optimum = 0.0;  // summed loss
  std::size_t effective_dim = 0;
};

inline L1Selection select_l1(const Dataset& data, const SolverOptions& opt = {}) {
  const Dataset sorted = data.sorted();
  const std::size_t d = data.dim();
  const auto coords = linalg::affine_coordinates(sorted);
  const Dataset reduced = linalg::restrict_coordinates(sorted, coords);

  L1Selection out;
  out.cset.loss_kind = LossSpec::l1();
  out.cset.dim = d;
  out.effective_dim = coords.size();

  if (coords.empty()) {
    // Constant predictors: the lower median.
    const std::size_t i = detail::lower_median_index(sorted);
    out.cset.selected.push_back(sorted[i]);
    out.model = LinearModel{std::vector<double>(d, 0.0), sorted[i].y};
    out.lp_optimum = detail::summed_l1(out.model, sorted);
    return out;
  }

  const LpSolution sol = solve_regression_lp(build_l1_lp(reduced), opt);
  const LinearModel lp_model = model_from_l1_vertex(sol.vertex, reduced.size(), reduced.dim());
  const RefinementState st = refine_to_incident_basis(lp_model, reduced);

  // Incident indices are already in lexicographic order of the points.
  std::vector<std::size_t> incident = st.incident;
  std::sort(incident.begin(), incident.end());
  linalg::IndependenceTracker basis(reduced.dim() + 1);
  for (std::size_t i : incident) {
    if (basis.try_add(linalg::augmented(reduced[i].x))) out.cset.selected.push_back(sorted[i]);
    if (basis.full()) break;
  }
  out.model = linalg::pad_model(st.model, coords, d);
  out.lp_optimum = sol.objective_value;
  return out;
}

/// Selection: at most d+1 points of `data` lying on a common loss-optimal
/// hyperplane, and no bits.
inline CompressionSet compress_l1(const Dataset& data) { return select_l1(data).cset; }

/// Reconstruction: the affine function through every selected point; the
/// minimum-norm (a, b) when the points do not determine it.
inline LinearModel reconstruct_l1(const CompressionSet& cset) {
  detail::require(!cset.selected.empty(), "reconstruct_l1: empty compression set");
  const std::size_t d = cset.selected.front().x.size();
  const auto k = static_cast<Eigen::Index>(cset.selected.size());
  Eigen::MatrixXd rows(k, static_cast<Eigen::Index>(d + 1));
  Eigen::VectorXd ys(k);
  double scale = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& pt = cset.selected[static_cast<std::size_t>(i)];
    detail::require(pt.x.size() == d, "reconstruct_l1: inconsistent dimensions");
    for (std::size_t j = 0; j < d; ++j) rows(i, static_cast<Eigen::Index>(j)) = pt.x[j];
    rows(i, static_cast<Eigen::Index>(d)) = 1.0;
    ys(i) = pt.y;
    scale = std::max(scale, std::abs(pt.y));
  }
  const Eigen::VectorXd z = linalg::min_norm_solve(rows, ys);
  const double misfit = (rows * z - ys).cwiseAbs().maxCoeff();
  detail::require(misfit <= 1e-6 * scale, "reconstruct_l1: selected points are not co-hyperplanar");
  LinearModel model;
  model.a.assign(z.data(), z.data() + d);
  model.b = z(static_cast<Eigen::Index>(d));
  return model;
}

}  // namespace lincompress
