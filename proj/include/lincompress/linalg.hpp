#pragma once

// Small dense helpers: incremental independence tests, minimum-norm
// interpolation and affine-rank reduction of a sample.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lincompress/core.hpp"

namespace lincompress::linalg {

/// Greedy linear-independence filter. A candidate is accepted when its
/// component orthogonal to the accepted set exceeds rel_tol times the
/// largest norm seen so far.
class IndependenceTracker {
 public:
  explicit IndependenceTracker(std::size_t dim, double rel_tol = 1e-8)
      : dim_(dim), rel_tol_(rel_tol) {}

  bool try_add(std::span<const double> v) {
    detail::require(v.size() == dim_, "IndependenceTracker: wrong vector length");
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(dim_));
    const double norm = r.norm();
    scale_ = std::max(scale_, norm);
    if (norm == 0.0 || basis_.size() == dim_) return false;
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) r -= q.dot(r) * q;
    }
    const double rn = r.norm();
    if (rn <= rel_tol_ * scale_) return false;
    basis_.push_back(r / rn);
    return true;
  }

  std::size_t rank() const { return basis_.size(); }
  bool full() const { return basis_.size() == dim_; }

  /// Component of v orthogonal to the accepted vectors.
  Eigen::VectorXd project_out(std::span<const double> v) const {
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(dim_));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) r -= q.dot(r) * q;
    }
    return r;
  }

 private:
  std::size_t dim_;
  double rel_tol_;
  double scale_ = 0.0;
  std::vector<Eigen::VectorXd> basis_;
};

/// (x, 1): the row of point x in the (a, b) parameter space.
inline std::vector<double> augmented(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  v.push_back(1.0);
  return v;
}

/// Minimum-Euclidean-norm solution of rows * z = rhs (least squares when
/// inconsistent).
inline Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& rows, const Eigen::VectorXd& rhs) {
  if (rows.rows() == 0 || rows.cols() == 0) return Eigen::VectorXd::Zero(rows.cols());
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(rows);
  cod.setThreshold(1e-12);
  return cod.solve(rhs);
}

/// Among affine functions with <a, x_i> + b = targets[i], the one with the
/// smallest ||a|| (b is not penalized).
inline LinearModel min_slope_interpolant(std::span<const std::vector<double>> xs,
                                         std::span<const double> targets, std::size_t dim) {
  detail::require(!xs.empty() && xs.size() == targets.size(),
                  "min_slope_interpolant: need matching non-empty inputs");
  const auto k = static_cast<Eigen::Index>(xs.size());
  const auto d = static_cast<Eigen::Index>(dim);
  // Eliminate b through the first equation.
  Eigen::MatrixXd diff(k - 1, d);
  Eigen::VectorXd rhs(k - 1);
  for (Eigen::Index i = 1; i < k; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) diff(i - 1, j) = xs[i][j] - xs[0][j];
    rhs(i - 1) = targets[i] - targets[0];
  }
  const Eigen::VectorXd a = min_norm_solve(diff, rhs);
  LinearModel model;
  model.a.assign(a.data(), a.data() + d);
  model.b = targets[0];
  for (Eigen::Index j = 0; j < d; ++j) model.b -= a(j) * xs[0][j];
  return model;
}

/// Coordinates of x that are affinely independent of the intercept and of
/// the earlier kept coordinates over the sample. Dropping the others does
/// not change which functions of the sample the affine class can realize.
inline std::vector<std::size_t> affine_coordinates(const Dataset& data, double rel_tol = 1e-9) {
  const std::size_t m = data.size();
  IndependenceTracker tracker(m, rel_tol);
  // Columns are normalized so that the test is relative per column and
  // small-scale coordinates are not dropped.
  std::vector<double> col(m, 1.0 / std::sqrt(static_cast<double>(m)));
  tracker.try_add(col);
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < data.dim(); ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      col[i] = data[i].x[j];
      norm += col[i] * col[i];
    }
    if (norm == 0.0) continue;
    norm = std::sqrt(norm);
    for (double& v : col) v /= norm;
    if (tracker.try_add(col)) kept.push_back(j);
  }
  return kept;
}

inline Dataset restrict_coordinates(const Dataset& data, std::span<const std::size_t> coords) {
  std::vector<LabeledPoint> pts;
  pts.reserve(data.size());
  for (const auto& p : data) {
    LabeledPoint q;
    q.y = p.y;
    q.x.reserve(coords.size());
    for (std::size_t j : coords) q.x.push_back(p.x[j]);
    pts.push_back(std::move(q));
  }
  return Dataset(std::move(pts), coords.size());
}

/// Lifts a model on the kept coordinates back to the full dimension.
inline LinearModel pad_model(const LinearModel& reduced, std::span<const std::size_t> coords,
                             std::size_t dim) {
  LinearModel full;
  full.a.assign(dim, 0.0);
  for (std::size_t k = 0; k < coords.size(); ++k) full.a[coords[k]] = reduced.a[k];
  full.b = reduced.b;
  return full;
}

}  // namespace lincompress::linalg
