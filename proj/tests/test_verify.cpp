#include "helpers.hpp"

#include "lpocv/bounds.hpp"
#include "lpocv/errors.hpp"
#include "lpocv/neighbors.hpp"
#include "lpocv/oracle.hpp"
#include "lpocv/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace lpocv;
using lpocv::testing::line;

namespace {

DistributionSpec mixture() { return {}; }

DistributionSpec checker() {
  DistributionSpec s;
  s.kind = DistributionKind::uniform_checker_1d;
  return s;
}

}  // namespace

TEST(Sampler, DeterministicAndClassBalanced) {
  const auto a = sample_dataset(mixture(), 100, 7);
  const auto b = sample_dataset(mixture(), 100, 7);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.size(), 100u);
  std::size_t ones = 0;
  for (auto y : a.labels()) ones += static_cast<std::size_t>(y);
  EXPECT_GT(ones, 20u);
  EXPECT_LT(ones, 80u);
}

TEST(Sampler, PriorOverManyDraws) {
  DistributionSpec s = mixture();
  s.class_prior = 0.3;
  Rng rng(4);
  const int draws = 100'000;
  int ones = 0;
  double sum1 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto pt = sample_point(s, rng);
    ones += pt.label;
    if (pt.label == 1) sum1 += pt.features(0);
  }
  const double sd = std::sqrt(0.3 * 0.7 / draws);
  EXPECT_NEAR(ones / double(draws), 0.3, 3.0 * sd);
  EXPECT_NEAR(sum1 / ones, 1.0, 0.03);
}

TEST(Sampler, CheckerSupportsAreDisjoint) {
  Rng rng(2);
  for (int i = 0; i < 5000; ++i) {
    const auto pt = sample_point(checker(), rng);
    const double x = pt.features(0);
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    const int cell = static_cast<int>(x * 4.0);
    EXPECT_EQ(cell % 2, pt.label);
    EXPECT_EQ(checker().eta(x), static_cast<double>(pt.label));
  }
}

TEST(Sampler, InvalidSpecs) {
  DistributionSpec s = mixture();
  s.class_prior = 1.0;
  EXPECT_THROW(s.validate(), InputError);
  s = mixture();
  s.sd0 = 0.0;
  EXPECT_THROW(s.validate(), InputError);
  s = mixture();
  s.kind = DistributionKind::gaussian_mixture_md;
  s.dimension = 0;
  EXPECT_THROW(s.validate(), InputError);
  EXPECT_THROW(parse_distribution_kind("cauchy"), InputError);
  EXPECT_EQ(parse_distribution_kind("uniform_checker_1d"), DistributionKind::uniform_checker_1d);
}

TEST(ConditionalError, ConstantZeroClassifier) {
  // Every training label is 0, so the fit predicts 0 everywhere.
  const auto data = line({-1.0, 0.0, 0.5, 2.0}, {0, 0, 0, 0});
  EXPECT_NEAR(conditional_error(data, 1, mixture()), 0.5, 1e-12);
  EXPECT_NEAR(conditional_error(data, 3, mixture()), 0.5, 1e-12);
}

TEST(ConditionalError, ClosedFormMatchesLargeTestSet) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto data = sample_dataset(mixture(), 80, seed);
    for (std::size_t k : {1u, 4u, 7u}) {
      const double exact = conditional_error(data, k, mixture());
      const double mc = conditional_error(
          data, k, mixture(), {.method = RiskMethod::test_set, .test_size = 1'000'000, .test_seed = seed + 10});
      const double se = std::sqrt(exact * (1.0 - exact) / 1e6);
      EXPECT_NEAR(mc, exact, 3.0 * se + 1e-12) << "seed " << seed << " k " << k;
    }
  }
}

TEST(ConditionalError, CheckerClosedFormAndSeparation) {
  const auto data = sample_dataset(checker(), 500, 9);
  const double exact = conditional_error(data, 1, checker());
  EXPECT_LT(exact, 0.01);
  const double mc =
      conditional_error(data, 1, checker(), {.method = RiskMethod::test_set, .test_size = 200'000, .test_seed = 3});
  EXPECT_NEAR(mc, exact, 3.0 * std::sqrt(std::max(exact, 1e-6) / 2e5) + 1e-4);
}

TEST(ConditionalError, ClosedFormNeedsOneDimension) {
  DistributionSpec s = mixture();
  s.kind = DistributionKind::gaussian_mixture_md;
  s.dimension = 2;
  const auto data = sample_dataset(s, 30, 1);
  EXPECT_THROW(conditional_error(data, 1, s), InputError);
  const double l = conditional_error(data, 1, s, {.method = RiskMethod::test_set, .test_size = 20'000});
  EXPECT_GT(l, 0.05);
  EXPECT_LT(l, 0.6);
}

TEST(Stone, SmallCases) {
  EXPECT_EQ(stone_counter(line({0.0, 1.0}, {0, 1}), 1), 1u);
  EXPECT_EQ(stone_counter(line({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1}), 1), 2u);
}

TEST(Stone, RandomLineConfigurations) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto data = random_dataset(50, 1, seed);
    for (std::size_t k : {1u, 3u, 7u}) EXPECT_LE(stone_counter(data, k), 2 * k);
  }
}

TEST(Stone, AdversarialLineConfigurations) {
  // Distance ties without coincident points: equal spacing, geometric
  // spacing, and two tight clusters far apart.
  std::vector<Matrix> configs;
  Matrix equal(40, 1), geometric(40, 1), clusters(40, 1);
  for (int i = 0; i < 40; ++i) {
    equal(i, 0) = i;
    geometric(i, 0) = std::pow(1.5, i);
    clusters(i, 0) = (i < 20 ? 0.0 : 1e6) + i % 20;
  }
  for (const Matrix& m : {equal, geometric, clusters}) {
    const Dataset data(m, std::vector<Label>(40, 0));
    for (std::size_t k : {1u, 2u, 3u, 5u, 9u}) EXPECT_LE(stone_counter(data, k), 2 * k);
  }
}

TEST(Stone, CoincidentPointsCanExceedTheCeiling) {
  // Exact duplicates have probability zero under a density; with them the
  // index tie-break lets a point collect more than 2k in-edges.
  Matrix m(40, 1);
  for (int i = 0; i < 40; ++i) m(i, 0) = static_cast<double>(i / 2);
  const Dataset data(m, std::vector<Label>(40, 0));
  EXPECT_GT(stone_counter(data, 2), 4u);
}

TEST(Stability, DuplicatedRemovalsNeverDisagree) {
  // The last p points duplicate the first p, so dropping them keeps every
  // distance multiset and, with k = 1 and distinct queries, every prediction.
  const std::size_t n = 40, p = 10;
  const auto base = sample_dataset(mixture(), n - p, 5);
  Matrix m(n, 1);
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = i < n - p ? i : i - (n - p);
    m(static_cast<Eigen::Index>(i), 0) = base.point(src)(0);
    y[i] = base.label(src);
  }
  const Dataset data(m, y);
  Rng rng(3);
  for (int q = 0; q < 2000; ++q) {
    const Vector x = sample_point(mixture(), rng).features;
    EXPECT_EQ(knn_predict(data, n, x, 1), knn_predict(data, n - p, x, 1));
  }
}

TEST(Stability, UnderBoundAndGrowingInP) {
  const auto s1 = stability_experiment(mixture(), 200, 1, 1, 3000, 11, 4);
  EXPECT_LE(s1.frequency, s1.bound + 3.0 * s1.standard_error);
  EXPECT_NEAR(s1.bound, 0.007978845608028654, 1e-15);
  double prev = -1.0;
  for (std::size_t p : {1u, 20u, 80u}) {
    const auto s = stability_experiment(mixture(), 200, p, 3, 3000, 12, 4);
    EXPECT_GT(s.frequency, prev);
    prev = s.frequency;
  }
}

TEST(Campaign, SmallRunHasNoViolationsAndIsReproducible) {
  CampaignConfig cfg;
  cfg.n = 60;
  cfg.p = 10;
  cfg.k = 3;
  cfg.replicates = 200;
  cfg.seed = 42;
  cfg.workers = 1;
  const auto a = empirical_campaign(cfg);
  EXPECT_FALSE(a.any_violation());
  EXPECT_EQ(a.central_moments.size(), 4u);
  EXPECT_LE(a.stone_max, 6u);
  for (std::size_t i = 1; i < a.tails.size(); ++i) EXPECT_LE(a.tails[i].empirical, a.tails[i - 1].empirical);

  cfg.workers = 4;
  const auto b = empirical_campaign(cfg);
  EXPECT_EQ(a.mean_estimate, b.mean_estimate);
  EXPECT_EQ(a.mse, b.mse);
  EXPECT_EQ(a.central_moments, b.central_moments);
}

TEST(Campaign, FaultHookTriggersViolation) {
  CampaignConfig cfg;
  cfg.n = 40;
  cfg.p = 5;
  cfg.k = 1;
  cfg.replicates = 100;
  cfg.bound_scale = 1e-3;
  EXPECT_TRUE(empirical_campaign(cfg).any_violation());
}

TEST(Campaign, Guards) {
  CampaignConfig cfg;
  cfg.replicates = 50;
  EXPECT_THROW(empirical_campaign(cfg), InputError);
  cfg.replicates = 100;
  cfg.n = 10;
  cfg.p = 8;
  cfg.k = 3;
  EXPECT_THROW(empirical_campaign(cfg), InfeasibleError);
  cfg = {};
  cfg.spec.kind = DistributionKind::gaussian_mixture_md;
  cfg.spec.dimension = 2;
  EXPECT_THROW(empirical_campaign(cfg), MissingConstantError);
}
