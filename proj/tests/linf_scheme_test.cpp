#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lincompress/io.hpp"
#include "lincompress/linf_scheme.hpp"
#include "lincompress/verification.hpp"
#include "test_support.hpp"

using namespace lincompress;
using lincompress::testing::make_1d;

namespace {

double lp_optimum(const Dataset& s) { return solve(build_linf_lp(s)).objective_value; }

std::vector<LabeledPoint> sorted_points(std::vector<LabeledPoint> v) {
  std::sort(v.begin(), v.end(), lex_less);
  return v;
}

}  // namespace

TEST(FindSupportVectors, ThreePointEquioscillation) {
  const Dataset s = make_1d({{0, 0}, {1, 1}, {2, 0}});
  const SupportVectorReport r = find_support_vectors(s, solve(build_linf_lp(s)));
  EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(r.sides, (std::vector<int>{1, -1, 1}));
  EXPECT_NEAR(r.eps, 0.5, 1e-12);
}

TEST(FindSupportVectors, RealizablePair) {
  const Dataset s = make_1d({{0, 0}, {1, 1}});
  const SupportVectorReport r = find_support_vectors(s, solve(build_linf_lp(s)));
  EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(r.eps, 0.0, 1e-12);
}

TEST(FindSupportVectors, UniformTwentyPointsHasThree) {
  const Dataset s = io::gen_uniform(20, 1, io::kDefaultSeed);
  const LpSolution sol = solve(build_linf_lp(s));
  const SupportVectorReport r = find_support_vectors(s, sol);
  EXPECT_EQ(r.indices.size(), 3u);
  const LinearModel f = model_from_linf_vertex(sol.vertex, 1);
  for (std::size_t k = 0; k < r.indices.size(); ++k) {
    EXPECT_NEAR(residual(f, s[r.indices[k]]), r.sides[k] * r.eps, 1e-9);
  }
}

TEST(FindSupportVectors, RejectsNonOptimal) {
  LpSolution bad;
  bad.status = LpStatus::Infeasible;
  EXPECT_THROW(find_support_vectors(make_1d({{0, 0}}), bad), ContractViolation);
}

TEST(CompressLinf, Examples) {
  const Dataset tri = make_1d({{0, 0}, {1, 1}, {2, 0}});
  EXPECT_EQ(sorted_points(compress_linf(tri).selected), tri.sorted().points());

  const Dataset one = make_1d({{7, 3}});
  const CompressionSet c1 = compress_linf(one);
  ASSERT_EQ(c1.selected.size(), 1u);
  EXPECT_EQ(evaluate_loss(reconstruct_linf(c1), one, LossSpec::linf()), 0.0);

  const Dataset line = make_1d({{0, 0}, {1, 1}, {2, 2}});
  const CompressionSet c3 = compress_linf(line);
  EXPECT_LE(c3.selected.size(), 2u);
  EXPECT_NEAR(evaluate_loss(reconstruct_linf(c3), line, LossSpec::linf()), 0.0, 1e-12);
}

TEST(ReconstructLinf, Examples) {
  CompressionSet c;
  c.loss_kind = LossSpec::linf();
  c.dim = 1;
  c.selected = {{{0}, 0}, {{1}, 1}, {{2}, 0}};
  LinearModel f = reconstruct_linf(c);
  EXPECT_NEAR(f.a[0], 0.0, 1e-12);
  EXPECT_NEAR(f.b, 0.5, 1e-12);

  c.selected = {{{7}, 3}};
  f = reconstruct_linf(c);
  EXPECT_NEAR(f.a[0], 0.0, 1e-12);
  EXPECT_NEAR(f.b, 3.0, 1e-12);

  c.selected = {{{1}, 1}, {{3}, 5}};
  f = reconstruct_linf(c);
  EXPECT_NEAR(f.a[0], 2.0, 1e-12);
  EXPECT_NEAR(f.b, -1.0, 1e-12);
}

TEST(ReconstructLinf, OrderOfSelectionIrrelevant) {
  CompressionSet a, b;
  a.dim = b.dim = 1;
  a.selected = {{{0}, 0}, {{1}, 1}, {{2}, 0}};
  b.selected = {{{2}, 0}, {{0}, 0}, {{1}, 1}};
  EXPECT_EQ(reconstruct_linf(a), reconstruct_linf(b));
}

class LinfSchemeProperties : public ::testing::TestWithParam<std::size_t> {};

TEST_P(LinfSchemeProperties, CompetitiveAndDiscardable) {
  const std::size_t d = GetParam();
  std::mt19937_64 rng(lincompress::testing::kSuiteSeed + 50 + d);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(trial) % 30;
    const bool grid = trial % 3 == 2;
    const Dataset s = grid ? lincompress::testing::random_grid(rng, m, d)
                           : lincompress::testing::random_uniform(rng, m, d);
    const double opt = lp_optimum(s);
    const LinfSelection sel = select_linf(s);
    const CompressionSet& c = sel.cset;
    EXPECT_LE(c.selected.size(), d + 2);
    EXPECT_TRUE(c.bits.empty());

    const LinearModel f = reconstruct_linf(c);
    const double achieved = evaluate_loss(f, s, LossSpec::linf());
    EXPECT_LE(achieved, opt + 1e-7) << "d=" << d << " m=" << m << " grid=" << grid;
    EXPECT_GE(achieved, opt - 1e-7);
    EXPECT_NEAR(lp_optimum(Dataset(c.selected, d)), opt, 1e-7);

    // Selected points are support vectors of the full solve.
    for (const auto& p : c.selected) {
      EXPECT_NE(std::find(s.begin(), s.end(), p), s.end());
      EXPECT_NEAR(std::abs(residual(sel.model, p)), opt, 1e-7);
    }

    // Dropping any point off the support leaves the optimum unchanged.
    if (!grid) {
      for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(std::abs(residual(sel.model, s[i])) - opt) <= 1e-7) continue;
        std::vector<std::size_t> keep;
        for (std::size_t k = 0; k < m; ++k) if (k != i) keep.push_back(k);
        EXPECT_NEAR(lp_optimum(s.subset(keep)), opt, 1e-9);
      }
    }

    std::vector<LabeledPoint> shuffled = s.points();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(sorted_points(compress_linf(Dataset(shuffled, d)).selected), sorted_points(c.selected));
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, LinfSchemeProperties, ::testing::Values(0u, 1u, 2u, 3u));

TEST(LinfScheme, ChebyshevOracleEquivalenceInOneDimension) {
  std::mt19937_64 rng(lincompress::testing::kSuiteSeed + 9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(trial) % 25;
    const Dataset s = lincompress::testing::random_uniform(rng, m, 1);
    EXPECT_NEAR(lp_optimum(s), verification::brute_force_linf_d1(s).optimum, 1e-8);
  }
}

TEST(LinfScheme, GenericOneDimensionalSamplesKeepThree) {
  std::mt19937_64 rng(lincompress::testing::kSuiteSeed + 10);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset s = lincompress::testing::random_uniform(rng, 5 + trial, 1);
    EXPECT_EQ(compress_linf(s).selected.size(), 3u);
  }
}

TEST(LinfScheme, HeavilyTiedSamplesStayCompetitive) {
  std::mt19937_64 rng(lincompress::testing::kSuiteSeed + 11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = static_cast<std::size_t>(trial) % 5;
    const std::size_t m = 1 + static_cast<std::size_t>(trial * 7) % 60;
    const Dataset s = lincompress::testing::random_grid(rng, m, d, 1 + trial % 3);
    const CompressionSet c = compress_linf(s);
    EXPECT_LE(c.selected.size(), d + 2);
    EXPECT_NEAR(evaluate_loss(reconstruct_linf(c), s, LossSpec::linf()), lp_optimum(s), 1e-7)
        << "trial " << trial;
  }
}
