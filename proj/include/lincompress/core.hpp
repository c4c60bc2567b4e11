#pragma once

// Shared domain types: labeled samples, affine hypotheses, loss
// specifications and compression sets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lincompress {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when the LP solver returns a status that cannot happen for a
/// well-posed regression program.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool cond, const char* what) {
  if (!cond) throw ContractViolation(what);
}
}  // namespace detail

struct LabeledPoint {
  std::vector<double> x;
  double y = 0.0;

  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// Lexicographic order on (x_1, ..., x_d, y). All tie-breaking in the
/// schemes goes through this so that results do not depend on sample order.
inline bool lex_less(const LabeledPoint& lhs, const LabeledPoint& rhs) {
  if (lhs.x != rhs.x) {
    return std::lexicographical_compare(lhs.x.begin(), lhs.x.end(),
                                        rhs.x.begin(), rhs.x.end());
  }
  return lhs.y < rhs.y;
}

/// A labeled sample ((x_1, y_1), ..., (x_m, y_m)) with x_i in R^d.
/// Non-empty, and every x has the same length.
class Dataset {
 public:
  Dataset(std::vector<LabeledPoint> points, std::size_t dim)
      : points_(std::move(points)), dim_(dim) {
    detail::require(!points_.empty(), "Dataset: at least one point required");
    for (const auto& p : points_) {
      detail::require(p.x.size() == dim_, "Dataset: inconsistent point dimension");
    }
  }

  explicit Dataset(std::vector<LabeledPoint> points)
      : Dataset(points, points.empty() ? 0 : points.front().x.size()) {}

  /// Zero-dimensional sample built from labels only.
  static Dataset from_labels(std::span<const double> ys) {
    std::vector<LabeledPoint> pts;
    pts.reserve(ys.size());
    for (double y : ys) pts.push_back({{}, y});
    return Dataset(std::move(pts), 0);
  }

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return dim_; }
  const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<LabeledPoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// Indices of the points in lexicographic (x, y) order; stable on ties.
  std::vector<std::size_t> lex_order() const {
    std::vector<std::size_t> order(points_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return lex_less(points_[a], points_[b]);
    });
    return order;
  }

  /// Copy with the points in lexicographic order.
  Dataset sorted() const {
    std::vector<LabeledPoint> pts;
    pts.reserve(points_.size());
    for (std::size_t i : lex_order()) pts.push_back(points_[i]);
    return Dataset(std::move(pts), dim_);
  }

  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<LabeledPoint> pts;
    pts.reserve(indices.size());
    for (std::size_t i : indices) {
      detail::require(i < points_.size(), "Dataset::subset: index out of range");
      pts.push_back(points_[i]);
    }
    return Dataset(std::move(pts), dim_);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<LabeledPoint> points_;
  std::size_t dim_ = 0;
};

/// Affine hypothesis x -> <a, x> + b.
struct LinearModel {
  std::vector<double> a;
  double b = 0.0;

  std::size_t dim() const { return a.size(); }
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

inline double predict(const LinearModel& model, std::span<const double> x) {
  detail::require(model.a.size() == x.size(), "predict: dimension mismatch");
  double acc = model.b;
  for (std::size_t j = 0; j < x.size(); ++j) acc += model.a[j] * x[j];
  return acc;
}

/// Signed residual <a, x> + b - y.
inline double residual(const LinearModel& model, const LabeledPoint& pt) {
  return predict(model, pt.x) - pt.y;
}

/// Loss exponent p in [1, inf], with infinity as a distinguished value.
class LossSpec {
 public:
  static LossSpec finite(double p) {
    detail::require(std::isfinite(p) && p >= 1.0, "LossSpec: p must lie in [1, inf)");
    return LossSpec(p);
  }
  static LossSpec l1() { return LossSpec(1.0); }
  static LossSpec linf() { return LossSpec(std::numeric_limits<double>::infinity()); }

  bool is_infinity() const { return std::isinf(p_); }
  bool is_l1() const { return p_ == 1.0; }
  double p() const { return p_; }

  std::string name() const {
    if (is_infinity()) return "linf";
    if (is_l1()) return "l1";
    return "l" + std::to_string(p_);
  }

  friend bool operator==(const LossSpec&, const LossSpec&) = default;

 private:
  explicit LossSpec(double p) : p_(p) {}
  double p_;
};

/// Empirical loss of `model` on `data`: the mean of |residual|^p for finite
/// p (no p-th root), the largest |residual| for p = infinity.
inline double evaluate_loss(const LinearModel& model, const Dataset& data, LossSpec loss) {
  detail::require(model.dim() == data.dim(), "evaluate_loss: dimension mismatch");
  if (loss.is_infinity()) {
    double worst = 0.0;
    for (const auto& pt : data) worst = std::max(worst, std::abs(residual(model, pt)));
    return worst;
  }
  double total = 0.0;
  for (const auto& pt : data) {
    const double r = std::abs(residual(model, pt));
    total += loss.is_l1() ? r : std::pow(r, loss.p());
  }
  return total / static_cast<double>(data.size());
}

/// Output of a selection function: k' labeled points plus k'' bits.
/// The points are stored by value so that the set is self-contained.
struct CompressionSet {
  std::vector<LabeledPoint> selected;
  std::vector<bool> bits;
  LossSpec loss_kind = LossSpec::l1();
  std::size_t dim = 0;

  std::size_t size() const { return selected.size() + bits.size(); }
};

}  // namespace lincompress
