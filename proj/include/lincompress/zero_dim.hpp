#pragma once

// Constant-predictor ERM under l_p and the counting argument showing that a
// k-selection scheme cannot represent all m+1 binary-sample minimizers once
// the sample is large.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lincompress/core.hpp"

namespace lincompress::zero_dim {

/// A {0,1}-labeled sample, summarized by its label counts.
struct BinarySample {
  std::size_t n0 = 0;
  std::size_t n1 = 0;

  BinarySample(std::size_t zeros, std::size_t ones) : n0(zeros), n1(ones) {
    detail::require(n0 + n1 >= 1, "BinarySample: empty sample");
  }

  std::size_t m() const { return n0 + n1; }

  std::vector<double> labels() const {
    std::vector<double> ys(n0, 0.0);
    ys.insert(ys.end(), n1, 1.0);
    return ys;
  }
};

/// Unique minimizer of N1 (1-s)^p + N0 s^p for finite p > 1:
///   s = mu^(1/(p-1)) / (1 + mu^(1/(p-1))),  mu = N1 / N0,
/// with the limits 1 (no zeros) and 0 (no ones).
inline double binary_erm_closed_form(const BinarySample& sample, double p) {
  detail::require(std::isfinite(p) && p > 1.0, "binary_erm_closed_form: p must lie in (1, inf)");
  if (sample.n0 == 0) return 1.0;
  if (sample.n1 == 0) return 0.0;
  const double q = 1.0 / (p - 1.0);
  // Same value as mu^q / (1 + mu^q), written as N1^q / (N1^q + N0^q) so
  // that p = 2 gives the sample mean N1 / m with a single rounding.
  const double u = std::pow(static_cast<double>(sample.n1), q);
  const double v = std::pow(static_cast<double>(sample.n0), q);
  if (std::isfinite(u + v)) return u / (u + v);
  const double mu = static_cast<double>(sample.n1) / static_cast<double>(sample.n0);
  const double t = std::pow(mu, q);
  if (std::isinf(t)) return 1.0;
  return t / (1.0 + t);
}

/// log(s / (1 - s)) for the minimizer above, which is (log N1 - log N0) / (p - 1).
/// Stays strictly monotone in N1 where s itself rounds to 1.
inline double binary_erm_log_odds(const BinarySample& sample, double p) {
  detail::require(std::isfinite(p) && p > 1.0, "binary_erm_log_odds: p must lie in (1, inf)");
  if (sample.n0 == 0) return std::numeric_limits<double>::infinity();
  if (sample.n1 == 0) return -std::numeric_limits<double>::infinity();
  return (std::log(static_cast<double>(sample.n1)) - std::log(static_cast<double>(sample.n0))) /
         (p - 1.0);
}

namespace detail {

/// |y - c|^p - |y - d|^p. When y is on the same side of c and d the
/// difference of the bases is taken as d - c, which is exact for nearby c, d.
inline double pow_diff(double y, double c, double d, double p) {
  const double u = std::abs(y - c);
  const double v = std::abs(y - d);
  if (c == d) return 0.0;
  if (u == 0.0) return -std::pow(v, p);
  if (v == 0.0) return std::pow(u, p);
  const bool same_side = (y > c) == (y > d);
  if (!same_side) return std::pow(u, p) - std::pow(v, p);
  const double gap = y > c ? d - c : c - d;
  return std::pow(v, p) * std::expm1(p * std::log1p(gap / v));
}

}  // namespace detail

/// Numerical minimizer of sum_i |y_i - s|^p.
///   p = 1: the lower median.   p = inf: the midrange.
///   otherwise: golden-section search on [min y, max y] to 1e-10 in s.
inline double erm_numeric(std::span<const double> ys, double p) {
  lincompress::detail::require(!ys.empty(), "erm_numeric: empty sample");
  lincompress::detail::require(p >= 1.0, "erm_numeric: p must be >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(ys.begin(), ys.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (std::isinf(p)) return 0.5 * (lo + hi);
  if (p == 1.0) {
    std::vector<double> tmp(ys.begin(), ys.end());
    const std::size_t mid = (tmp.size() - 1) / 2;
    std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid), tmp.end());
    return tmp[mid];
  }
  // F(u) - F(v), summed term by term so that comparisons near the minimum
  // stay accurate.
  auto compare = [&](double u, double v) {
    double acc = 0.0;
    for (double y : ys) acc += detail::pow_diff(y, u, v, p);
    return acc;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  while (hi - lo > 1e-10) {
    const double c = hi - inv_phi * (hi - lo);
    const double d = lo + inv_phi * (hi - lo);
    if (compare(c, d) < 0.0) {
      hi = d;
    } else {
      lo = c;
    }
  }
  return 0.5 * (lo + hi);
}

struct RepresentableCount {
  std::uint64_t exact_sum = 0;  // sum_{k'=0}^{k} k' 2^(k-k')
  std::int64_t bound = 0;       // 2^(k+1) - k
};

/// The count of reconstruction inputs used in the impossibility argument,
/// reproduced as the literal sum together with its closed-form bound.
inline RepresentableCount representable_count(unsigned k) {
  lincompress::detail::require(k <= 60, "representable_count: k too large");
  RepresentableCount rc;
  for (unsigned kp = 0; kp <= k; ++kp) rc.exact_sum += std::uint64_t{kp} << (k - kp);
  rc.bound = (std::int64_t{1} << (k + 1)) - static_cast<std::int64_t>(k);
  lincompress::detail::require(k == 0 || static_cast<std::int64_t>(rc.exact_sum) < rc.bound,
                               "representable_count: sum not below bound");
  return rc;
}

struct CountingReport {
  std::size_t m = 0;
  double p = 2.0;
  unsigned k = 0;
  std::uint64_t representable_sum = 0;
  std::int64_t representable = 0;  // the bound 2^(k+1) - k
  std::size_t num_minimizers = 0;  // m + 1
  bool minimizers_distinct = false;
  bool collision_forced = false;   // representable < num_minimizers
  bool below_log_threshold = false;  // k < log2(m)
  /// Minimizer for N0 = 0, ..., m.
  std::vector<double> minimizers;
};

/// Enumerates every binary sample of size m, computes its minimizer and
/// compares the number of distinct minimizers against the representable
/// count of a k-selection scheme.
inline CountingReport impossibility_demo(std::size_t m, double p, unsigned k) {
  lincompress::detail::require(m >= 1, "impossibility_demo: m must be >= 1");
  CountingReport rep;
  rep.m = m;
  rep.p = p;
  rep.k = k;
  rep.num_minimizers = m + 1;
  rep.minimizers.reserve(m + 1);
  for (std::size_t n0 = 0; n0 <= m; ++n0) {
    rep.minimizers.push_back(binary_erm_closed_form(BinarySample(n0, m - n0), p));
  }
  // More zeros pull the minimizer strictly down.
  // Compared through the log-odds, which separate values that round to the
  // same double near 0 or 1.
  rep.minimizers_distinct = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n0 = 0; n0 <= m; ++n0) {
    const double t = binary_erm_log_odds(BinarySample(n0, m - n0), p);
    if (!(t < prev) && n0 > 0) rep.minimizers_distinct = false;
    prev = t;
  }
  const RepresentableCount rc = representable_count(k);
  rep.representable_sum = rc.exact_sum;
  rep.representable = rc.bound;
  rep.collision_forced = rc.bound < static_cast<std::int64_t>(rep.num_minimizers);
  rep.below_log_threshold = static_cast<double>(k) < std::log2(static_cast<double>(m));
  return rep;
}

}  // namespace lincompress::zero_dim
