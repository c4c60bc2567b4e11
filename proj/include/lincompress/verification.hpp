#pragma once

// Ground truth for the schemes at desk scale: exhaustive d=1 oracles, the
// competitiveness check, and an exact rational enumeration for small
// samples. None of this goes through the simplex except where the LP
// optimum is the quantity being compared against.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lincompress/core.hpp"
#include "lincompress/l1_scheme.hpp"
#include "lincompress/linf_scheme.hpp"
#include "lincompress/lp_solver.hpp"

namespace lincompress::verification {

struct OracleResult {
  /// Summed |residual| for l1, max |residual| for l-infinity.
  double optimum = 0.0;
  LinearModel witness_model;
  /// Indices into the input sample.
  std::vector<std::size_t> witness_points;
  /// True when every x is equal and the oracle fell back to a constant fit.
  bool constant_fallback = false;
  /// Exact optimum as "p/q" (exact_rational_check only).
  std::string exact_optimum;
};

namespace detail {

inline double summed_abs(const LinearModel& model, const Dataset& data) {
  double total = 0.0;
  for (const auto& pt : data) total += std::abs(residual(model, pt));
  return total;
}

inline double max_abs(const LinearModel& model, const Dataset& data) {
  double worst = 0.0;
  for (const auto& pt : data) worst = std::max(worst, std::abs(residual(model, pt)));
  return worst;
}

inline bool strictly_better(double candidate, double best) {
  if (!std::isfinite(best)) return candidate < best;
  return candidate < best - 1e-12 * std::max(1.0, std::abs(best));
}

}  // namespace detail

/// Best line through two datapoints under summed l1 loss, by exhaustive
/// enumeration of pairs with distinct x. Ties go to the lexicographically
/// first pair. With all x equal, falls back to the lower median.
inline OracleResult brute_force_l1_d1(const Dataset& data) {
  lincompress::detail::require(data.dim() == 1, "brute_force_l1_d1: needs d = 1");
  const auto order = data.lex_order();
  const std::size_t m = data.size();
  OracleResult best;
  best.optimum = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = p + 1; q < m; ++q) {
      const auto& u = data[order[p]];
      const auto& v = data[order[q]];
      if (u.x[0] == v.x[0]) continue;
      LinearModel line;
      line.a = {(v.y - u.y) / (v.x[0] - u.x[0])};
      line.b = u.y - line.a[0] * u.x[0];
      const double loss = detail::summed_abs(line, data);
      if (detail::strictly_better(loss, best.optimum)) {
        best.optimum = loss;
        best.witness_model = line;
        best.witness_points = {order[p], order[q]};
      }
    }
  }
  if (best.witness_points.empty()) {
    std::vector<double> ys;
    for (const auto& pt : data) ys.push_back(pt.y);
    std::vector<double> tmp = ys;
    const std::size_t mid = (m - 1) / 2;
    std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid), tmp.end());
    best.witness_model = LinearModel{{0.0}, tmp[mid]};
    best.optimum = detail::summed_abs(best.witness_model, data);
    for (std::size_t i : order) {
      if (data[i].y == tmp[mid]) {
        best.witness_points = {i};
        break;
      }
    }
    best.constant_fallback = true;
  }
  return best;
}

/// Chebyshev line by exhaustive enumeration: zero-error lines through pairs,
/// and equioscillating fits on triples (signs +,-,+ and -,+,- in x order).
/// A candidate is kept when no residual exceeds its eps.
inline OracleResult brute_force_linf_d1(const Dataset& data) {
  lincompress::detail::require(data.dim() == 1, "brute_force_linf_d1: needs d = 1");
  const auto order = data.lex_order();
  const std::size_t m = data.size();
  OracleResult best;
  best.optimum = std::numeric_limits<double>::infinity();

  double scale = 1.0;
  for (const auto& pt : data) scale = std::max({scale, std::abs(pt.y), std::abs(pt.x[0])});
  const double feas_tol = 1e-10 * scale;
  auto consider = [&](const LinearModel& line, double eps, std::vector<std::size_t> pts) {
    if (!(eps >= -feas_tol)) return;
    if (detail::max_abs(line, data) > eps + feas_tol) return;
    if (detail::strictly_better(std::max(eps, 0.0), best.optimum)) {
      best.optimum = std::max(eps, 0.0);
      best.witness_model = line;
      best.witness_points = std::move(pts);
    }
  };

  if (m == 1) {
    consider(LinearModel{{0.0}, data[0].y}, 0.0, {0});
  }
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = p + 1; q < m; ++q) {
      const auto& u = data[order[p]];
      const auto& v = data[order[q]];
      if (u.x[0] == v.x[0]) continue;
      LinearModel line;
      line.a = {(v.y - u.y) / (v.x[0] - u.x[0])};
      line.b = u.y - line.a[0] * u.x[0];
      consider(line, 0.0, {order[p], order[q]});
    }
  }
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = p + 1; q < m; ++q) {
      for (std::size_t r = q + 1; r < m; ++r) {
        const std::array<std::size_t, 3> idx{order[p], order[q], order[r]};
        for (double s : {1.0, -1.0}) {
          // a x_k + b - s_k eps = y_k with s = (s, -s, s).
          Eigen::Matrix3d sys;
          Eigen::Vector3d rhs;
          const std::array<double, 3> signs{s, -s, s};
          for (int k = 0; k < 3; ++k) {
            sys(k, 0) = data[idx[k]].x[0];
            sys(k, 1) = 1.0;
            sys(k, 2) = -signs[k];
            rhs(k) = data[idx[k]].y;
          }
          Eigen::FullPivLU<Eigen::Matrix3d> lu(sys);
          if (!lu.isInvertible()) continue;
          const Eigen::Vector3d z = lu.solve(rhs);
          consider(LinearModel{{z(0)}, z(1)}, z(2), {idx[0], idx[1], idx[2]});
        }
      }
    }
  }
  if (best.witness_points.empty()) {
    // All x equal: the midrange.
    double lo = data[0].y;
    double hi = data[0].y;
    std::size_t ilo = 0;
    std::size_t ihi = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (data[i].y < lo) lo = data[i].y, ilo = i;
      if (data[i].y > hi) hi = data[i].y, ihi = i;
    }
    best.witness_model = LinearModel{{0.0}, 0.5 * (lo + hi)};
    best.optimum = detail::max_abs(best.witness_model, data);
    best.witness_points = {ilo, ihi};
    best.constant_fallback = true;
  }
  return best;
}

/// Optimal empirical loss over all affine functions, from the LP
/// (normalized by m for l1, the max residual for l-infinity).
inline double optimal_loss(const Dataset& data, LossSpec loss) {
  lincompress::detail::require(loss.is_l1() || loss.is_infinity(),
                               "optimal_loss: only l1 and l-infinity are LP-representable");
  if (loss.is_l1()) {
    return solve_regression_lp(build_l1_lp(data)).objective_value /
           static_cast<double>(data.size());
  }
  return solve_regression_lp(build_linf_lp(data)).objective_value;
}

struct CompetitiveCheck {
  LinearModel model;
  double achieved = 0.0;
  double optimum = 0.0;
  bool competitive = false;
};

/// Reconstructs from `cset` and compares the loss on `data` with the class
/// infimum. Both directions are checked: beating the infimum by more than
/// tol means the infimum was computed wrong.
inline CompetitiveCheck check_competitive(const CompressionSet& cset, const Dataset& data,
                                          LossSpec loss, double tol) {
  lincompress::detail::require(cset.loss_kind == loss,
                               "verify_competitive: compression set built for a different loss");
  CompetitiveCheck out;
  out.model = loss.is_l1() ? reconstruct_l1(cset) : reconstruct_linf(cset);
  lincompress::detail::require(out.model.dim() == data.dim(),
                               "verify_competitive: dimension mismatch");
  out.achieved = evaluate_loss(out.model, data, loss);
  out.optimum = optimal_loss(data, loss);
  out.competitive = std::abs(out.achieved - out.optimum) <= tol;
  return out;
}

inline bool verify_competitive(const CompressionSet& cset, const Dataset& data, LossSpec loss,
                               double tol) {
  return check_competitive(cset, data, loss, tol).competitive;
}

// ---------------------------------------------------------------------------
// Exact rational enumeration

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

using RMatrix = std::vector<std::vector<Rational>>;

/// Solves a square system exactly; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_exact(RMatrix a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// Exact rank of a set of column vectors, with greedy selection.
inline bool exact_independent(RMatrix& basis, std::vector<Rational> v) {
  // basis holds echelon rows with recorded pivot positions at the front.
  for (const auto& row : basis) {
    std::size_t piv = 0;
    while (row[piv] == 0) ++piv;
    if (v[piv] != 0) {
      const Rational f = v[piv] / row[piv];
      for (std::size_t c = 0; c < v.size(); ++c) v[c] -= f * row[c];
    }
  }
  for (const auto& e : v) {
    if (e != 0) {
      basis.push_back(std::move(v));
      return true;
    }
  }
  return false;
}

template <typename Fn>
void for_each_subset(std::size_t m, std::size_t k, Fn&& fn) {
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Exact optimum by vertex enumeration in rational arithmetic, for m <= 12
/// and d <= 2. Coordinates that are affinely dependent over the sample are
/// dropped first, so that with r remaining coordinates:
///   l1:    every vertex interpolates r+1 points;
///   l-inf: every vertex interpolates r+1 points (eps = 0) or solves
///          <a,x_k> + b - y_k = s_k eps on r+2 points.
/// Each candidate (a, b) is scored by its exact loss on the whole sample.
inline OracleResult exact_rational_check(const Dataset& data, LossSpec loss) {
  lincompress::detail::require(data.size() <= 12 && data.dim() <= 2,
                               "exact_rational_check: instance too large (m <= 12, d <= 2)");
  lincompress::detail::require(loss.is_l1() || loss.is_infinity(),
                               "exact_rational_check: only l1 and l-infinity");
  const std::size_t m = data.size();
  const std::size_t d = data.dim();
  std::vector<std::vector<Rational>> xs(m, std::vector<Rational>(d));
  std::vector<Rational> ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) xs[i][j] = Rational(data[i].x[j]);
    ys[i] = Rational(data[i].y);
  }

  detail::RMatrix col_basis;
  detail::exact_independent(col_basis, std::vector<Rational>(m, Rational(1)));
  std::vector<std::size_t> coords;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Rational> col(m);
    for (std::size_t i = 0; i < m; ++i) col[i] = xs[i][j];
    if (detail::exact_independent(col_basis, std::move(col))) coords.push_back(j);
  }
  const std::size_t r = coords.size();

  auto loss_of = [&](const std::vector<Rational>& a, const Rational& b) {
    Rational acc = 0;
    for (std::size_t i = 0; i < m; ++i) {
      Rational res = b - ys[i];
      for (std::size_t k = 0; k < r; ++k) res += a[k] * xs[i][coords[k]];
      if (res < 0) res = -res;
      if (loss.is_l1()) {
        acc += res;
      } else if (res > acc) {
        acc = res;
      }
    }
    return acc;
  };

  std::optional<Rational> best;
  std::vector<Rational> best_a;
  Rational best_b;
  std::vector<std::size_t> best_pts;
  auto offer = [&](const std::vector<Rational>& a, const Rational& b,
                   const std::vector<std::size_t>& pts) {
    const Rational v = loss_of(a, b);
    if (!best || v < *best) {
      best = v;
      best_a = a;
      best_b = b;
      best_pts = pts;
    }
  };

  // Interpolation through r+1 points.
  detail::for_each_subset(m, r + 1, [&](const std::vector<std::size_t>& idx) {
    detail::RMatrix sys(r + 1, std::vector<Rational>(r + 1));
    std::vector<Rational> rhs(r + 1);
    for (std::size_t k = 0; k <= r; ++k) {
      for (std::size_t c = 0; c < r; ++c) sys[k][c] = xs[idx[k]][coords[c]];
      sys[k][r] = 1;
      rhs[k] = ys[idx[k]];
    }
    if (auto z = detail::solve_exact(std::move(sys), std::move(rhs))) {
      offer(std::vector<Rational>(z->begin(), z->begin() + static_cast<std::ptrdiff_t>(r)),
            (*z)[r], idx);
    }
  });
  if (loss.is_infinity()) {
    // Equal-magnitude residuals on r+2 points; flipping every sign gives
    // the same (a, b), so the first sign is fixed.
    detail::for_each_subset(m, r + 2, [&](const std::vector<std::size_t>& idx) {
      for (unsigned mask = 0; mask < (1u << (r + 1)); ++mask) {
        detail::RMatrix sys(r + 2, std::vector<Rational>(r + 2));
        std::vector<Rational> rhs(r + 2);
        for (std::size_t k = 0; k < r + 2; ++k) {
          const int sign = (k == 0 || !((mask >> (k - 1)) & 1u)) ? 1 : -1;
          for (std::size_t c = 0; c < r; ++c) sys[k][c] = xs[idx[k]][coords[c]];
          sys[k][r] = 1;
          sys[k][r + 1] = -sign;
          rhs[k] = ys[idx[k]];
        }
        if (auto z = detail::solve_exact(std::move(sys), std::move(rhs))) {
          offer(std::vector<Rational>(z->begin(), z->begin() + static_cast<std::ptrdiff_t>(r)),
                (*z)[r], idx);
        }
      }
    });
  }

  OracleResult out;
  out.optimum = static_cast<double>(*best);
  out.exact_optimum = best->str();
  out.witness_model.a.assign(d, 0.0);
  for (std::size_t k = 0; k < r; ++k) out.witness_model.a[coords[k]] = static_cast<double>(best_a[k]);
  out.witness_model.b = static_cast<double>(best_b);
  out.witness_points = best_pts;
  out.constant_fallback = r == 0 && d > 0;
  return out;
}

}  // namespace lincompress::verification
