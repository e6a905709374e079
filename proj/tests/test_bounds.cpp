#include "lpocv/bounds.hpp"
#include "lpocv/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace lpocv;

namespace {

constexpr double kE = std::numbers::e;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Constants, AuditAtGammaTwo) {
  const auto c = BoundConstants::from_gamma(2.0);
  EXPECT_DOUBLE_EQ(c.c1_loo, 34.0);
  EXPECT_NEAR(c.c2, 12.754920619117941, 1e-12);
  EXPECT_NEAR(c.c1_lpo, 129.80624342789656, 1e-10);
  EXPECT_NEAR(c.delta, 84.11723572332559, 1e-10);
  EXPECT_NEAR(c.gamma, 118.95973558926165, 1e-10);
  EXPECT_NEAR(c.square, 10613.564018600282, 1e-8);
}

TEST(Constants, StoneGamma) {
  EXPECT_EQ(stone_gamma(1), 2.0);
  EXPECT_EQ(stone_gamma(3, 20.0), 20.0);
  EXPECT_THROW(stone_gamma(2), MissingConstantError);
}

TEST(Resampling, Identities) {
  const auto r = resampling_probs(10, 3, 2);
  EXPECT_NEAR(r.p_test, 0.3, 1e-15);
  EXPECT_NEAR(r.neighbor_sum, 0.6, 1e-15);
  EXPECT_NEAR(r.far_rank_sum, 0.6 * 2.0 / 9.0, 1e-15);
  EXPECT_EQ(resampling_probs(10, 1, 2).far_rank_sum, 0.0);
  EXPECT_THROW(resampling_probs(10, 9, 2), InfeasibleError);
}

TEST(BiasAndStability, Values) {
  EXPECT_NEAR(bias_bound(100, 10, 4), 0.31915382432114614, 1e-14);
  EXPECT_NEAR(bias_bound(100, 1, 1), 0.015957691216057307, 1e-15);
  EXPECT_NEAR(bias_bound(100, 20, 4), 2.0 * bias_bound(100, 10, 4), 1e-14);
  EXPECT_EQ(stability_bound(100, 10, 4), bias_bound(100, 10, 4));
  EXPECT_NEAR(stability_bound(200, 1, 1), 0.007978845608028654, 1e-15);
  EXPECT_NEAR(stability_bound(200, 20, 5), 0.35682482323055426, 1e-14);
}

TEST(Mse, ValuesAndDominance) {
  EXPECT_NEAR(mse_bound(100, 1, 1), 0.08978845608028654, 1e-15);
  // Wherever the bias bound is informative (<= 1).
  for (std::size_t n : {20u, 100u, 1000u})
    for (std::size_t k : {1u, 3u, 9u})
      for (std::size_t p = 1; p + k <= n; p += 3) {
        const double b = bias_bound(n, p, k);
        if (b > 1.0) continue;
        EXPECT_GT(mse_bound(n, p, k), b * b);
      }
}

TEST(Tails, McDiarmid) {
  EXPECT_NEAR(mcdiarmid_tail(100, 1, 1, 2.0, 0.5), 2.0 * std::exp(-25.0 / 32.0), 1e-15);
  EXPECT_NEAR(mcdiarmid_tail(100, 1, 1, 2.0, 1e-9), 2.0, 1e-12);
  EXPECT_LT(mcdiarmid_tail(100, 1, 1, 2.0, 1e3), 1e-300);
}

TEST(Tails, Poly) {
  EXPECT_NEAR(concentration_tail_poly(100, 1, 1, 2.0, 0.5), 0.9976472955168585, 1e-14);
  // p = 1 collapses the bracket.
  const double sq = BoundConstants::from_gamma(2.0).square;
  EXPECT_NEAR(concentration_tail_poly(100, 1, 3, 2.0, 0.2), std::exp(-100 * 0.04 / (sq * 9)), 1e-15);
  EXPECT_LT(concentration_tail_poly(100, 5, 3, 2.0, 0.2), concentration_tail_poly(100, 10, 3, 2.0, 0.2));
}

TEST(Tails, SmallP) {
  EXPECT_NEAR(concentration_tail_small_p(100, 1, 1, 2.0, 0.5), 0.9964730197968219, 1e-14);
  // Beats the polynomial-bracket bound at large t when p is about n / 2.
  for (double t = 2.0; t <= 50.0; t += 2.0)
    EXPECT_LT(concentration_tail_small_p(1000, 500, 3, 2.0, t), concentration_tail_poly(1000, 500, 3, 2.0, t));
}

TEST(Tails, LargeP) {
  // Independent transcription of the displayed formula at (100, 98, 2).
  EXPECT_NEAR(concentration_tail_large_p(100, 98, 2, 2.0, 0.05), 89.70327483245751, 1e-10);
  EXPECT_NEAR(concentration_tail_large_p(100, 98, 2, 2.0, 1.0), 89.69309824150311, 1e-10);
  EXPECT_NEAR(concentration_tail_large_p(100, 98, 2, 2.0, 3.0), 89.61152322007999, 1e-10);
  EXPECT_NEAR(concentration_tail_large_p(100, 98, 2, 2.0, 1e-12), kE * 33.0, 1e-9);
  EXPECT_THROW(concentration_tail_large_p(100, 51, 2, 2.0, 1.0), RegimeError);
  EXPECT_NO_THROW(concentration_tail_large_p(100, 52, 2, 2.0, 1.0));
}

TEST(Tails, MonotoneInT) {
  double prev[4] = {1e300, 1e300, 1e300, 1e300};
  for (double t = 0.01; t < 400.0; t *= 1.5) {
    const double v[4] = {mcdiarmid_tail(60, 52, 2, 2.0, t), concentration_tail_poly(60, 52, 2, 2.0, t),
                         concentration_tail_small_p(60, 52, 2, 2.0, t),
                         concentration_tail_large_p(60, 52, 2, 2.0, t)};
    for (int j = 0; j < 4; ++j) {
      EXPECT_LE(v[j], prev[j]);
      EXPECT_GE(v[j], 0.0);
      prev[j] = v[j];
    }
  }
}

TEST(Deviation, LargePTerms) {
  const auto d = deviation_terms_large_p(100, 98, 2, 2.0, 1.0);
  EXPECT_NEAR(d.sub_gaussian_term, 46.88318723704025, 1e-10);
  EXPECT_NEAR(d.heavy_term, 52.76453740808605, 1e-10);
  EXPECT_NEAR(d.prefactor, 89.70330033914848, 1e-10);
  const auto z = deviation_terms_large_p(100, 98, 2, 2.0, 0.0);
  EXPECT_EQ(z.sub_gaussian_term, 0.0);
  EXPECT_EQ(z.heavy_term, 0.0);
  EXPECT_THROW(deviation_terms_large_p(100, 10, 2, 2.0, 1.0), RegimeError);
}

TEST(Deviation, BothTermsScaleLikeInverseRootN) {
  // p / n fixed at 0.8.
  std::vector<double> sub, heavy;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const auto d = deviation_terms_large_p(n, n * 8 / 10, 3, 2.0, 1.0);
    sub.push_back(d.sub_gaussian_term);
    heavy.push_back(d.heavy_term);
  }
  for (std::size_t j = 1; j < sub.size(); ++j) {
    EXPECT_NEAR(sub[j - 1] / sub[j], std::sqrt(10.0), 0.05 * std::sqrt(10.0));
    EXPECT_NEAR(heavy[j - 1] / heavy[j], std::sqrt(10.0), 0.05 * std::sqrt(10.0));
  }
}

TEST(Deviation, HeavyTermVanishesRelativeWhenPOverNTendsToOne) {
  double prev = 1e300, first = 0.0;
  for (std::size_t n : {100u, 400u, 1600u, 6400u, 25600u}) {
    const auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));  // n - p ~ sqrt(n)
    const auto d = deviation_terms_large_p(n, n - r, 2, 2.0, 1.0);
    const double ratio = d.heavy_term / d.sub_gaussian_term;
    EXPECT_LT(ratio, prev);
    if (n == 100u) first = ratio;
    prev = ratio;
  }
  // The ratio behaves like (n / (n - p))^{-1/2}, here n^{-1/4}.
  EXPECT_LT(prev, first / 3.0);
}

TEST(Moments, Loo) {
  EXPECT_NEAR(moment_bound_loo(2, 1, 100, 2.0), 0.34, 1e-15);
  EXPECT_NEAR(moment_bound_loo(4, 1, 100, 2.0), 42.34781655040489, 1e-9);
  EXPECT_NEAR(moment_bound_loo(2, 3, 50, 2.0), 2.0 * moment_bound_loo(2, 3, 100, 2.0), 1e-14);
}

TEST(Moments, Lpo) {
  EXPECT_NEAR(moment_bound_lpo(2, 100, 1, 1, 2.0), 1.2980624342789656, 1e-12);
  EXPECT_NEAR(moment_bound_lpo(4, 100, 10, 4, 2.0), 13091.46363591644, 1e-7);
  double prev = 0.0;
  for (std::size_t p = 1; p + 3 <= 100; ++p) {
    const double v = moment_bound_lpo(2, 100, p, 3, 2.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Moments, LargeP) {
  EXPECT_NEAR(moment_bound_lpo_large_p(2, 100, 98, 2, 2.0), 3.7085606047764594, 1e-12);
  EXPECT_NEAR(rel(moment_bound_lpo_large_p(4, 100, 98, 2, 2.0), 86308482.57775746), 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(moment_bound_lpo_large_p(3, 101, 100, 1, 2.0)));
  EXPECT_THROW(moment_bound_lpo_large_p(2, 100, 40, 2, 2.0), RegimeError);
  EXPECT_THROW(moment_bound_lpo_large_p(2, 100, 99, 2, 2.0), InfeasibleError);
}

TEST(Moments, LargePDecayRates) {
  // n - p = 4 fixed, k fixed. The q > 2 rate needs n large enough for the
  // sub-Gaussian term to dominate the maximum.
  const auto slopes = [](double q, std::size_t n0) {
    const double a = moment_bound_lpo_large_p(q, n0, n0 - 4, 2, 2.0);
    const double b = moment_bound_lpo_large_p(q, 2 * n0, 2 * n0 - 4, 2, 2.0);
    const double c = moment_bound_lpo_large_p(q, 4 * n0, 4 * n0 - 4, 2, 2.0);
    return std::pair{std::log2(a / b), std::log2(b / c)};
  };
  const auto [s0, s1] = slopes(2.0, 50);
  EXPECT_NEAR(s0, 1.0, 0.05);
  EXPECT_NEAR(s1, 1.0, 0.05);
  for (double q : {3.0, 4.0, 6.0}) {
    const auto [a, b] = slopes(q, 1600);
    EXPECT_NEAR(a, q / 2.0 - 1.0, 0.05);
    EXPECT_NEAR(b, q / 2.0 - 1.0, 0.05);
  }
}

TEST(Transfer, BlockCounts) {
  EXPECT_NEAR(moment_transfer_lpo_from_loo(2, 100, 98, 0.0, 0.66), 0.02, 1e-15);
  EXPECT_EQ(moment_transfer_lpo_from_loo(2, 100, 30, 0.7, 0.2), 0.7);
  EXPECT_EQ(moment_transfer_lpo_from_loo(4, 100, 30, 0.7, 0.2), 0.7);
  for (double var : {0.01, 0.1, 1.0}) EXPECT_LE(moment_transfer_lpo_from_loo(2, 100, 70, var, var), var);
}

TEST(Rosenthal, Constants) {
  EXPECT_NEAR(rosenthal_constant(4).scalar, 7566.393445304985, 1e-9);
  EXPECT_NEAR(rosenthal_constant(3).scalar, 526.9368675905552, 1e-10);
  const auto r = rosenthal_constant(4);
  EXPECT_NEAR(r.scale, std::pow(2.0 * std::sqrt(2.0 * kE), 4), 1e-9);
  EXPECT_DOUBLE_EQ(r.heavy_weight, 256.0);
  EXPECT_DOUBLE_EQ(r.gaussian_weight, 16.0);
  EXPECT_LT(rosenthal_constant(3.5).scalar, rosenthal_constant(3.6).scalar);
  EXPECT_THROW(rosenthal_constant(2.0), InputError);
}

TEST(MomentTail, SingleTerm) {
  const std::vector<double> l{1.0}, a{1.0};
  EXPECT_NEAR(tail_from_moments(1.0, 2.0, l, a, kE), kE, 1e-14);
  EXPECT_GT(tail_from_moments(1.0, 2.0, l, a, 1.0), tail_from_moments(1.0, 2.0, l, a, 2.0));
  const std::vector<double> bad{1.0, 2.0};
  EXPECT_THROW(tail_from_moments(1.0, 2.0, l, bad, 1.0), InputError);
}

TEST(MomentTail, CrossConsistencyWithLargeP) {
  for (std::size_t n : {20u, 60u, 100u, 500u}) {
    for (std::size_t p = n / 2 + 2; p + 1 <= n; p += std::max<std::size_t>(1, n / 17)) {
      for (std::size_t k : {1u, 2u, 5u}) {
        if (p + k > n) continue;
        const double m = static_cast<double>(n - p + 1);
        const double f = static_cast<double>(block_count(n, p));
        const double big = BoundConstants::from_gamma(2.0).gamma;
        const double kd = static_cast<double>(k);
        const std::vector<double> lam{big * std::sqrt(kd * std::sqrt(kd) / (m * f)),
                                      big * std::sqrt(kd * kd / (m * f * f))};
        const std::vector<double> alp{0.5, 1.5};
        for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
          const double lhs = concentration_tail_large_p(n, p, k, 2.0, t);
          EXPECT_LE(rel(lhs, tail_from_moments(f, 2.0, lam, alp, t)), 1e-12);
        }
      }
    }
  }
}

TEST(Devroye, LinearExponent) {
  EXPECT_NEAR(l1o_concentration_devroye(100, 1, 2.0, 0.1), 2.0 * std::exp(-2.5), 1e-15);
  EXPECT_NEAR(l1o_concentration_devroye(100, 1, 2.0, 1e-12), 2.0, 1e-9);
  EXPECT_LT(l1o_concentration_devroye(200, 1, 2.0, 0.1), l1o_concentration_devroye(100, 1, 2.0, 0.1));
}

TEST(ConfidenceGap, Values) {
  EXPECT_NEAR(confidence_gap_bound(100, 1, 1, 2.0, 1.0), 8.427681263548616, 1e-12);
  EXPECT_NEAR(confidence_gap_bound(100, 5, 2, 2.0, 0.0), bias_bound(100, 5, 2), 1e-15);
  EXPECT_THROW(confidence_gap_bound(100, 52, 1, 2.0, 1.0), RegimeError);
  EXPECT_NO_THROW(confidence_gap_bound(100, 51, 1, 2.0, 1.0));
}

TEST(ConfidenceGap, RootNRate) {
  std::vector<double> v;
  for (double n : {1e3, 1e4, 1e5}) {
    const auto nn = static_cast<std::size_t>(n);
    v.push_back(confidence_gap_bound(nn, static_cast<std::size_t>(std::sqrt(n)), 3, 2.0, 1.0));
  }
  EXPECT_NEAR(std::log10(v[1] / v[0]), -0.5, 0.05);
  EXPECT_NEAR(std::log10(v[2] / v[1]), -0.5, 0.05);
}

TEST(Report, RoutesRegimes) {
  const auto small = evaluate_bounds({.n = 100, .p = 10, .k = 4, .q = 4, .t = 0.5, .x = 1, .gamma_d = 2});
  ASSERT_NE(small.find("bias_bound"), nullptr);
  EXPECT_NEAR(small.find("bias_bound")->value, 0.31915382432114614, 1e-14);
  EXPECT_FALSE(small.find("concentration_tail_large_p")->applicable);
  EXPECT_TRUE(small.find("confidence_gap_bound")->applicable);

  const auto large = evaluate_bounds({.n = 100, .p = 98, .k = 2});
  EXPECT_TRUE(large.find("concentration_tail_large_p")->applicable);
  EXPECT_TRUE(large.find("deviation_large_p.heavy_term")->applicable);
  EXPECT_FALSE(large.find("confidence_gap_bound")->applicable);
  const auto* tail = large.find("concentration_tail_large_p");
  EXPECT_TRUE(tail->probability);
  EXPECT_GT(tail->value, 1.0);
  EXPECT_EQ(tail->clipped, 1.0);

  for (const auto& e : large.entries) {
    if (!e.applicable) continue;
    EXPECT_TRUE(std::isfinite(e.value)) << e.id;
    EXPECT_GE(e.value, 0.0) << e.id;
    if (e.probability) EXPECT_LE(e.clipped, 1.0) << e.id;
  }
  EXPECT_THROW(evaluate_bounds({.n = 10, .p = 8, .k = 3}), InfeasibleError);
}
